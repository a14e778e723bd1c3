#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace carleman {

/// Exponent vector of a monomial x^alpha = x_1^{a_1} ... x_d^{a_d}.
/// All entries are non-negative; degree() is the total degree |alpha|.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  static MultiIndex zero(int dim);
  /// Standard basis vector e_j (0-based j).
  static MultiIndex unit(int dim, int j);

  int dim() const { return static_cast<int>(exponents_.size()); }
  int degree() const;
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  std::span<const int> exponents() const { return exponents_; }

  bool is_zero() const { return degree() == 0; }

  /// Componentwise this + e_j.
  MultiIndex plus_unit(int j) const;
  /// Componentwise this - e_j; requires exponent at j to be positive.
  MultiIndex minus_unit(int j) const;

  bool operator==(const MultiIndex&) const = default;
  /// Lexicographic comparison of the raw exponent vectors.
  bool lex_less(const MultiIndex& other) const { return exponents_ < other.exponents_; }

  std::string to_string() const;

private:
  std::vector<int> exponents_;
};

/// Ordering used everywhere a set of multi-indices is laid out linearly:
/// by total degree first, then decreasing lexicographic within a degree,
/// so that for d = 2 a degree block reads [x1^k, x1^{k-1}x2, ..., x2^k].
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// All alpha with |alpha| = k in d variables, in decreasing lexicographic
/// order. Size is block_size(d, k).
std::vector<MultiIndex> enumerate_zkd(int d, int k);

/// Position of alpha inside enumerate_zkd(alpha.dim(), alpha.degree()).
std::int64_t rank(const MultiIndex& alpha);

/// Inverse of rank: the i-th element of enumerate_zkd(d, k).
/// Throws std::out_of_range when i is not in [0, block_size(d, k)).
MultiIndex unrank(int d, int k, std::int64_t i);

/// C(k+d-1, d-1): the number of degree-k monomials in d variables.
/// Exact integer arithmetic; throws std::overflow_error instead of wrapping.
std::int64_t block_size(int d, int k);

/// C(N+d, d) - 1 = sum of block_size(d, k) for k = 1..N.
std::int64_t total_dim(int d, int N);

/// x^alpha with the 0^0 = 1 convention.
double monomial_eval(const Eigen::VectorXd& x, const MultiIndex& alpha);

}  // namespace carleman
