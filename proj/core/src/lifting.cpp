#include "carleman/lifting.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace carleman {

CarlemanBlock build_block(const MaclaurinField& field, int k, int l, double t) {
  if (k < 1 || l < 1) throw std::invalid_argument("build_block: k, l must be >= 1");
  const int d = field.dim();
  const auto rows = enumerate_zkd(d, k);
  const auto cols_size = block_size(d, l);

  CarlemanBlock block{k, l, t, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                     static_cast<Eigen::Index>(cols_size))};
  // Only coefficients of total degree l - k + 1 can contribute; beta is
  // recovered as alpha + gamma - e_j rather than scanned.
  const int coeff_degree = l - k + 1;
  if (coeff_degree < 0) return block;
  if (field.is_series()) field.expand_to(coeff_degree);

  std::vector<std::pair<const MultiIndex*, Eigen::VectorXd>> active;
  for (const auto& [gamma, provider] : field.terms())
    if (gamma.degree() == coeff_degree) active.emplace_back(&gamma, provider(t));

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const MultiIndex& alpha = rows[r];
    for (const auto& [gamma_ptr, f] : active) {
      const MultiIndex& gamma = *gamma_ptr;
      for (int j = 0; j < d; ++j) {
        if (alpha[j] == 0 || f[j] == 0.0) continue;
        // beta = alpha + gamma - e_j; componentwise non-negative since alpha_j >= 1
        std::vector<int> beta(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
          beta[static_cast<std::size_t>(i)] = alpha[i] + gamma[i] - (i == j ? 1 : 0);
        const auto c = rank(MultiIndex(std::move(beta)));
        block.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
            alpha[j] * f[j];
      }
    }
  }
  return block;
}

Eigen::VectorBlock<const Eigen::VectorXd> LiftedVector::block(int k) const {
  if (k < 1 || k > order) throw std::out_of_range("LiftedVector::block: degree out of range");
  const auto off = total_dim(d, k) - block_size(d, k);
  return values.segment(static_cast<Eigen::Index>(off),
                        static_cast<Eigen::Index>(block_size(d, k)));
}

double LiftedVector::at(const MultiIndex& alpha) const {
  const int k = alpha.degree();
  if (alpha.dim() != d || k < 1 || k > order)
    throw std::out_of_range("LiftedVector::at: index outside stored blocks");
  const auto off = total_dim(d, k) - block_size(d, k);
  return values[static_cast<Eigen::Index>(off + rank(alpha))];
}

LiftedVector lift_initial(const Eigen::VectorXd& x0, int order) {
  if (order < 1) throw std::invalid_argument("lift_initial: order must be >= 1");
  const int d = static_cast<int>(x0.size());
  LiftedVector z{d, order, Eigen::VectorXd(static_cast<Eigen::Index>(total_dim(d, order)))};
  Eigen::Index at = 0;
  for (int k = 1; k <= order; ++k)
    for (const auto& alpha : enumerate_zkd(d, k)) z.values[at++] = monomial_eval(x0, alpha);
  return z;
}

FiniteSection::FiniteSection(std::shared_ptr<const MaclaurinField> field, int order)
    : field_(std::move(field)), order_(order) {
  if (!field_) throw std::invalid_argument("FiniteSection: null field");
  if (order_ < 1) throw std::invalid_argument("FiniteSection: order must be >= 1");
  const int d = field_->dim();
  total_dim(d, order_);  // overflow check before any allocation
  offsets_.resize(static_cast<std::size_t>(order_) + 1);
  offsets_[0] = 0;
  for (int k = 1; k <= order_; ++k)
    offsets_[static_cast<std::size_t>(k)] =
        offsets_[static_cast<std::size_t>(k - 1)] + block_size(d, k);

  if (field_->is_series()) field_->expand_to(order_);
  equilibrium_ = field_->is_equilibrium();
  constant_ = field_->is_constant();

  // Structural pattern: block (k, l) needs a coefficient of degree l - k + 1.
  const int max_degree = field_->is_series() ? order_ : field_->degree().value_or(0);
  for (int k = 1; k <= order_; ++k) {
    if (!equilibrium_ && k > 1) blocks_.emplace_back(k, k - 1);
    for (int l = k; l <= std::min(order_, k + max_degree - 1); ++l)
      blocks_.emplace_back(k, l);
  }

  if (constant_) cached_ = assemble(0.0);
}

Eigen::MatrixXd FiniteSection::assemble(double t) const {
  const auto n = static_cast<Eigen::Index>(total_dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [k, l] : blocks_) {
    const auto b = build_block(*field_, k, l, t);
    m.block(static_cast<Eigen::Index>(block_offset(k)),
            static_cast<Eigen::Index>(block_offset(l)), b.entries.rows(), b.entries.cols()) =
        b.entries;
  }
  return m;
}

const Eigen::MatrixXd& FiniteSection::matrix() const {
  if (!constant_)
    throw std::logic_error("FiniteSection::matrix: field is time-varying; use assemble(t)");
  return cached_;
}

void FiniteSection::dump_csv(std::ostream& out, double t) const {
  for (int k = 1; k <= order_; ++k) {
    if (k > 1) out << ',';
    out << "k=" << k << ':' << block_offset(k) << ".." << block_offset(k + 1) - 1;
  }
  out << '\n';
  const Eigen::MatrixXd m = constant_ ? cached_ : assemble(t);
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf;
    }
    out << '\n';
  }
}

double schur_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const double row = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double col = m.cwiseAbs().colwise().sum().maxCoeff();
  return std::max(row, col);
}

double assembly_deviation(const FiniteSection& section, double t) {
  const Eigen::MatrixXd m = section.is_constant() ? section.matrix() : section.assemble(t);
  double worst = 0.0;
  for (int k = 1; k <= section.order(); ++k) {
    for (int l = 1; l <= section.order(); ++l) {
      const auto b = build_block(section.field(), k, l, t);
      const auto region = m.block(static_cast<Eigen::Index>(section.block_offset(k)),
                                  static_cast<Eigen::Index>(section.block_offset(l)),
                                  b.entries.rows(), b.entries.cols());
      worst = std::max(worst, (region - b.entries).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

BlockNormReport verify_block_norm_lemma(const MaclaurinField& field, double d0, double radius,
                                        int k_max, int l_max,
                                        std::span<const double> t_samples) {
  if (t_samples.empty()) throw std::invalid_argument("verify_block_norm_lemma: no t samples");
  BlockNormReport report;
  const double nu0 = drift_bound(field);
  auto record = [&report](double measured, double bound, int k, int l, double t) {
    const double ratio = bound > 0.0 ? measured / bound : (measured > 0.0 ? HUGE_VAL : 0.0);
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_k = k;
      report.worst_l = l;
      report.worst_time = t;
    }
    if (measured > bound * (1.0 + 1e-12)) {
      report.all_within = false;
      ++report.violations;
    }
  };
  for (double t : t_samples) {
    for (int k = 1; k <= k_max; ++k) {
      for (int l = k; l <= l_max; ++l) {
        const auto b = build_block(field, k, l, t);
        record(schur_norm(b.entries), d0 * k * std::pow(radius, k - l - 1), k, l, t);
      }
      if (nu0 > 0.0) {
        // sub-diagonal estimate: nu0 times the row degree (the row sums are
        // sum_j alpha_j |f_{j,0}| <= |alpha| nu0, and the column sums are
        // sum_j (beta_j + 1) |f_{j,0}| <= (|beta| + 1) nu0)
        const auto b = build_block(field, k + 1, k, t);
        record(schur_norm(b.entries), nu0 * (k + 1), k + 1, k, t);
      }
    }
  }
  return report;
}

}  // namespace carleman
