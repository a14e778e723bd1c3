#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "carleman/field.hpp"
#include "carleman/multi_index.hpp"

namespace carleman {

/// One block A_{k,l}(t) of the lifted state matrix. Rows are indexed by the
/// degree-k monomials, columns by the degree-l monomials, both in the
/// canonical enumeration order. Entry (alpha, beta) is
/// sum_j alpha_j * f_{j, beta - alpha + e_j}(t).
struct CarlemanBlock {
  int k = 0;
  int l = 0;
  double time = 0.0;
  Eigen::MatrixXd entries;
};

CarlemanBlock build_block(const MaclaurinField& field, int k, int l, double t);

/// Concatenation of the degree blocks z_1, ..., z_N of a lifted state.
struct LiftedVector {
  int d = 0;
  int order = 0;
  Eigen::VectorXd values;  // size total_dim(d, order)

  /// View of block k (1-based degree).
  Eigen::VectorBlock<const Eigen::VectorXd> block(int k) const;
  /// Entry addressed by a multi-index (routes through rank()).
  double at(const MultiIndex& alpha) const;
};

/// Initial condition of the lifted system: block k holds x0^alpha over the
/// degree-k monomials.
LiftedVector lift_initial(const Eigen::VectorXd& x0, int order);

/// The order-N truncation of the lifted system. Equilibrium fields produce a
/// block upper-triangular matrix; a drift term adds one sub-diagonal block
/// row. Structurally zero blocks are never built. Fields with constant
/// coefficients are assembled once and cached.
class FiniteSection {
public:
  FiniteSection(std::shared_ptr<const MaclaurinField> field, int order);

  int order() const { return order_; }
  int dim() const { return field_->dim(); }
  std::int64_t total_dimension() const { return offsets_.back(); }
  /// Offset of block k (1-based degree) inside the assembled state vector.
  std::int64_t block_offset(int k) const { return offsets_[static_cast<std::size_t>(k - 1)]; }
  std::int64_t block_dim(int k) const { return block_offset(k + 1) - block_offset(k); }

  bool is_constant() const { return constant_; }
  bool is_equilibrium() const { return equilibrium_; }
  const MaclaurinField& field() const { return *field_; }
  std::shared_ptr<const MaclaurinField> field_ptr() const { return field_; }

  /// Block degree pairs (k, l) that can be structurally nonzero.
  const std::vector<std::pair<int, int>>& structural_blocks() const { return blocks_; }

  Eigen::MatrixXd assemble(double t) const;
  /// Cached assembly for time-invariant fields (throws otherwise).
  const Eigen::MatrixXd& matrix() const;

  /// CSV dump of the assembled matrix, preceded by a header row naming the
  /// block boundaries (k=1:0..d-1, ...).
  void dump_csv(std::ostream& out, double t) const;

private:
  std::shared_ptr<const MaclaurinField> field_;
  int order_;
  bool equilibrium_;
  bool constant_;
  std::vector<std::int64_t> offsets_;            // size order_ + 1, offsets_[0] = 0
  std::vector<std::pair<int, int>> blocks_;      // structurally nonzero (k, l)
  Eigen::MatrixXd cached_;                       // filled when constant_
};

inline FiniteSection assemble_finite_section(std::shared_ptr<const MaclaurinField> field,
                                             int order) {
  return FiniteSection(std::move(field), order);
}

/// max(max absolute row sum, max absolute column sum).
double schur_norm(const Eigen::MatrixXd& m);

/// Result of sweeping the block-norm estimates over a (k, l, t) range:
/// every upper block must satisfy ||A_{k,l}(t)||_S <= d0 * k * R^{k-l-1},
/// and when the field has a drift term, ||A_{k+1,k}(t)||_S <= nu0 * (k+1).
struct BlockNormReport {
  bool all_within = true;
  int violations = 0;
  double worst_ratio = 0.0;  // max of measured / bound over all checked blocks
  int worst_k = 0;
  int worst_l = 0;
  double worst_time = 0.0;
};

BlockNormReport verify_block_norm_lemma(const MaclaurinField& field, double d0, double radius,
                                        int k_max, int l_max,
                                        std::span<const double> t_samples);

/// Entry-wise comparison of an assembled section against independently built
/// blocks over every (k, l) pair, zero regions included. Returns the maximum
/// absolute deviation (0 for a correct assembly).
double assembly_deviation(const FiniteSection& section, double t);

}  // namespace carleman
