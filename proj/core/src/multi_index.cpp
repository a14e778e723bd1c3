#include "carleman/multi_index.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace carleman {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("integer overflow in binomial coefficient");
  return r;
}

// Exact C(n, k); multiplies before dividing, keeping every intermediate an
// integer (prefix products of C(n-k+i, i) are themselves binomials).
std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = checked_mul(r, n - k + i);
    r /= i;
  }
  return r;
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  require(!exponents_.empty(), "MultiIndex: dimension must be >= 1");
  for (int e : exponents_) require(e >= 0, "MultiIndex: exponents must be non-negative");
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex MultiIndex::zero(int dim) {
  require(dim >= 1, "MultiIndex: dimension must be >= 1");
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

MultiIndex MultiIndex::unit(int dim, int j) {
  require(j >= 0 && j < dim, "MultiIndex::unit: coordinate out of range");
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(j)] = 1;
  return MultiIndex(std::move(e));
}

int MultiIndex::degree() const {
  return std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

MultiIndex MultiIndex::plus_unit(int j) const {
  require(j >= 0 && j < dim(), "MultiIndex::plus_unit: coordinate out of range");
  std::vector<int> e = exponents_;
  ++e[static_cast<std::size_t>(j)];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::minus_unit(int j) const {
  require(j >= 0 && j < dim(), "MultiIndex::minus_unit: coordinate out of range");
  require(exponents_[static_cast<std::size_t>(j)] > 0,
          "MultiIndex::minus_unit: exponent already zero");
  std::vector<int> e = exponents_;
  --e[static_cast<std::size_t>(j)];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim(); ++i) {
    if (i) os << ',';
    os << (*this)[i];
  }
  os << ')';
  return os.str();
}

bool GradedOrder::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return b.lex_less(a);  // decreasing lex within a degree
}

std::vector<MultiIndex> enumerate_zkd(int d, int k) {
  if (d < 1) throw std::invalid_argument("enumerate_zkd: d must be >= 1");
  if (k < 0) throw std::invalid_argument("enumerate_zkd: k must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(block_size(d, k)));
  std::vector<int> current(static_cast<std::size_t>(d), 0);
  // First coordinate runs from k down to 0, recursively; this realizes the
  // decreasing lexicographic order.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      current[static_cast<std::size_t>(pos)] = remaining;
      out.emplace_back(current);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(pos)] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  rec(rec, 0, k);
  return out;
}

std::int64_t rank(const MultiIndex& alpha) {
  // Count indices that precede alpha: those whose first differing coordinate
  // is larger. With c entries of the first coordinate fixed above alpha[0],
  // the remainder is a full (d-1)-dimensional degree block.
  std::int64_t r = 0;
  int remaining = alpha.degree();
  const int d = alpha.dim();
  for (int pos = 0; pos < d - 1; ++pos) {
    for (int c = remaining; c > alpha[pos]; --c) r += block_size(d - pos - 1, remaining - c);
    remaining -= alpha[pos];
  }
  return r;
}

MultiIndex unrank(int d, int k, std::int64_t i) {
  if (i < 0 || i >= block_size(d, k))
    throw std::out_of_range("unrank: index outside [0, block_size)");
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  int remaining = k;
  for (int pos = 0; pos < d - 1; ++pos) {
    for (int c = remaining;; --c) {
      const std::int64_t tail = block_size(d - pos - 1, remaining - c);
      if (i < tail) {
        e[static_cast<std::size_t>(pos)] = c;
        remaining -= c;
        break;
      }
      i -= tail;
    }
  }
  e[static_cast<std::size_t>(d - 1)] = remaining;
  return MultiIndex(std::move(e));
}

std::int64_t block_size(int d, int k) {
  if (d < 1) throw std::invalid_argument("block_size: d must be >= 1");
  if (k < 0) throw std::invalid_argument("block_size: k must be >= 0");
  return binomial(static_cast<std::int64_t>(k) + d - 1, d - 1);
}

std::int64_t total_dim(int d, int N) {
  if (d < 1) throw std::invalid_argument("total_dim: d must be >= 1");
  if (N < 1) throw std::invalid_argument("total_dim: N must be >= 1");
  return binomial(static_cast<std::int64_t>(N) + d, d) - 1;
}

double monomial_eval(const Eigen::VectorXd& x, const MultiIndex& alpha) {
  if (x.size() != alpha.dim())
    throw std::invalid_argument("monomial_eval: dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < alpha.dim(); ++j)
    for (int p = 0; p < alpha[j]; ++p) v *= x[j];
  return v;
}

}  // namespace carleman
