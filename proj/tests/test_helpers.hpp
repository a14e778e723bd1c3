#pragma once

// Shared test oracles. Everything here recomputes expected values by an
// independent route (brute-force enumeration, dense polynomial algebra,
// trigonometric differentiation) so the library under test never checks
// itself against itself.

#include <array>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "carleman/field.hpp"
#include "carleman/multi_index.hpp"

namespace testhelpers {

// ---------------------------------------------------------------------------
// Brute-force multi-index enumeration: odometer over [0, k]^d, filter by
// total degree, sort by decreasing lexicographic order.
inline std::vector<std::vector<int>> brute_force_zkd(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    int sum = 0;
    for (int v : idx) sum += v;
    if (sum == k) out.push_back(idx);
    int pos = d - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == k) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a > b; });
  return out;
}

// ---------------------------------------------------------------------------
// Dense polynomial algebra over exponent maps, for deriving lifted blocks
// symbolically: d/dt x^alpha = sum_j alpha_j x^{alpha-e_j} f_j(x).
using Poly = std::map<std::vector<int>, double>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  return out;
}

inline void poly_add_scaled(Poly& acc, const Poly& p, double s) {
  for (const auto& [e, c] : p) acc[e] += s * c;
}

// Component polynomials f_j of a field with constant coefficients, as dense
// exponent maps (series fields must be expanded to the needed degree first).
inline std::vector<Poly> field_polys(const carleman::MaclaurinField& field, double t) {
  std::vector<Poly> f(static_cast<std::size_t>(field.dim()));
  for (const auto& [alpha, provider] : field.terms()) {
    const Eigen::VectorXd c = provider(t);
    std::vector<int> e(alpha.exponents().begin(), alpha.exponents().end());
    for (int j = 0; j < field.dim(); ++j)
      if (c[j] != 0.0) f[static_cast<std::size_t>(j)][e] += c[j];
  }
  return f;
}

// Independent route to the block A_{k,l}(t): differentiate each degree-k
// monomial along the field and collect the degree-l coefficients.
inline Eigen::MatrixXd oracle_block(const carleman::MaclaurinField& field, int k, int l,
                                    double t) {
  const int d = field.dim();
  if (field.is_series()) field.expand_to(std::max(l - k + 1, 1));
  const auto f = field_polys(field, t);
  const auto rows = brute_force_zkd(d, k);
  const auto cols = brute_force_zkd(d, l);
  std::map<std::vector<int>, std::size_t> col_of;
  for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = j;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Poly derivative;
    for (int j = 0; j < d; ++j) {
      const int aj = rows[r][static_cast<std::size_t>(j)];
      if (aj == 0) continue;
      std::vector<int> down = rows[r];
      --down[static_cast<std::size_t>(j)];
      Poly monomial{{down, static_cast<double>(aj)}};
      poly_add_scaled(derivative, poly_mul(monomial, f[static_cast<std::size_t>(j)]), 1.0);
    }
    for (const auto& [e, c] : derivative) {
      int deg = 0;
      for (int v : e) deg += v;
      if (deg != l) continue;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_of.at(e))) = c;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Taylor coefficients of an analytic function at 0 by high-order numerical
// differentiation on a circle of radius r (discrete Cauchy integral):
// c_m = (1 / (K r^m)) sum_i f(r w^i) w^{-im}.
inline std::vector<double> taylor_coefficients(
    const std::function<std::complex<double>(std::complex<double>)>& f, int max_degree,
    double r = 0.8, int samples = 512) {
  std::vector<std::complex<double>> values(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double theta = 2.0 * M_PI * i / samples;
    values[static_cast<std::size_t>(i)] = f(std::polar(r, theta));
  }
  std::vector<double> coeffs(static_cast<std::size_t>(max_degree) + 1);
  for (int m = 0; m <= max_degree; ++m) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double theta = -2.0 * M_PI * i * m / samples;
      acc += values[static_cast<std::size_t>(i)] *
             std::complex<double>(std::cos(theta), std::sin(theta));
    }
    coeffs[static_cast<std::size_t>(m)] = (acc / static_cast<double>(samples)).real() /
                                          std::pow(r, m);
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// CLI driver: run a command line, capture stdout and the exit status.
struct CliResult {
  int status = -1;
  std::string output;
};

inline CliResult run_command(const std::string& command) {
  CliResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) result.output.append(buf, n);
  const int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20240515u);
  return gen;
}

}  // namespace testhelpers
