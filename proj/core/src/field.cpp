#include "carleman/field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carleman {

CoefficientProvider CoefficientProvider::constant(Eigen::VectorXd value) {
  CoefficientProvider p;
  p.constant_ = std::move(value);
  return p;
}

CoefficientProvider CoefficientProvider::time_varying(
    std::function<Eigen::VectorXd(double)> fn, std::optional<Eigen::VectorXd> abs_sup) {
  if (!fn) throw std::invalid_argument("CoefficientProvider: null function");
  CoefficientProvider p;
  p.fn_ = std::move(fn);
  p.abs_sup_ = std::move(abs_sup);
  return p;
}

Eigen::VectorXd CoefficientProvider::operator()(double t) const {
  return constant_ ? *constant_ : fn_(t);
}

const Eigen::VectorXd& CoefficientProvider::constant_value() const {
  if (!constant_) throw std::logic_error("CoefficientProvider: not constant");
  return *constant_;
}

Eigen::VectorXd CoefficientProvider::abs_sup() const {
  if (constant_) return constant_->cwiseAbs();
  if (abs_sup_) return *abs_sup_;
  throw std::invalid_argument(
      "time-varying coefficient without a declared sup; sup-over-t quantities "
      "are not computable");
}

void MaclaurinField::insert_term(const MultiIndex& alpha, const CoefficientProvider& p) {
  if (alpha.dim() != dim_)
    throw std::invalid_argument("field term: multi-index dimension mismatch");
  auto [it, inserted] = terms_.emplace(alpha, p);
  if (!inserted) {
    // duplicate alpha entries are summed
    if (!it->second.is_constant() || !p.is_constant())
      throw std::invalid_argument("duplicate time-varying term at " + alpha.to_string());
    it->second = CoefficientProvider::constant(it->second.constant_value() + p.constant_value());
  }
}

MaclaurinField MaclaurinField::polynomial(
    int dim, const std::vector<std::pair<MultiIndex, Eigen::VectorXd>>& terms) {
  std::vector<std::pair<MultiIndex, CoefficientProvider>> providers;
  providers.reserve(terms.size());
  for (const auto& [alpha, coeff] : terms)
    providers.emplace_back(alpha, CoefficientProvider::constant(coeff));
  return with_providers(dim, providers);
}

MaclaurinField MaclaurinField::with_providers(
    int dim, const std::vector<std::pair<MultiIndex, CoefficientProvider>>& terms) {
  if (dim < 1) throw std::invalid_argument("field: dimension must be >= 1");
  MaclaurinField f;
  f.dim_ = dim;
  for (const auto& [alpha, p] : terms) {
    if (p.is_constant() && p.constant_value().size() != dim)
      throw std::invalid_argument("field term: coefficient length != dimension");
    f.insert_term(alpha, p);
  }
  // drop terms that summed to zero
  for (auto it = f.terms_.begin(); it != f.terms_.end();) {
    if (it->second.is_constant() && it->second.constant_value().isZero(0.0))
      it = f.terms_.erase(it);
    else
      ++it;
  }
  return f;
}

MaclaurinField MaclaurinField::series(int dim, DegreeGenerator generator) {
  if (dim < 1) throw std::invalid_argument("field: dimension must be >= 1");
  if (!generator) throw std::invalid_argument("field: null generator");
  MaclaurinField f;
  f.dim_ = dim;
  f.generator_ = std::move(generator);
  return f;
}

std::optional<int> MaclaurinField::degree() const {
  if (generator_) return std::nullopt;
  int deg = 0;
  for (const auto& [alpha, p] : terms_) deg = std::max(deg, alpha.degree());
  return deg;
}

bool MaclaurinField::is_equilibrium() const {
  return !terms_.contains(MultiIndex::zero(dim_));
}

bool MaclaurinField::is_constant() const {
  for (const auto& [alpha, p] : terms_)
    if (!p.is_constant()) return false;
  return true;
}

void MaclaurinField::expand_to(int max_degree) const {
  if (!generator_) return;
  std::lock_guard<std::mutex> lock(*expand_mutex_);
  for (int k = expanded_degree_ + 1; k <= max_degree; ++k) {
    for (const auto& [alpha, coeff] : generator_(k)) {
      if (alpha.dim() != dim_ || alpha.degree() != k)
        throw std::logic_error("generator produced a term of the wrong degree");
      if (coeff.size() != dim_)
        throw std::logic_error("generator produced a coefficient of the wrong length");
      if (!coeff.isZero(0.0))
        terms_.emplace(alpha, CoefficientProvider::constant(coeff));
    }
    expanded_degree_ = k;
  }
}

int MaclaurinField::expanded_degree() const {
  if (!generator_) return degree().value_or(0);
  std::lock_guard<std::mutex> lock(*expand_mutex_);
  return expanded_degree_;
}

Eigen::VectorXd MaclaurinField::evaluate(double t, const Eigen::VectorXd& x,
                                         std::optional<int> truncation_degree) const {
  if (x.size() != dim_) throw std::invalid_argument("evaluate: state dimension mismatch");
  int cutoff;
  if (generator_) {
    if (!truncation_degree)
      throw std::invalid_argument("evaluate: series field needs a truncation degree");
    cutoff = *truncation_degree;
    expand_to(cutoff);
  } else {
    cutoff = truncation_degree.value_or(degree().value_or(0));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (const auto& [alpha, p] : terms_) {
    if (alpha.degree() > cutoff) break;  // GradedOrder: degrees ascend
    out += p(t) * monomial_eval(x, alpha);
  }
  return out;
}

Eigen::VectorXd eval_field(const MaclaurinField& field, double t, const Eigen::VectorXd& x,
                           std::optional<int> truncation_degree) {
  return field.evaluate(t, x, truncation_degree);
}

std::vector<double> ak_sums(const MaclaurinField& field, std::optional<int> max_degree) {
  int top;
  if (field.is_series()) {
    if (!max_degree)
      throw std::invalid_argument("ak_sums: series field needs an explicit max degree");
    top = *max_degree;
    field.expand_to(top);
  } else {
    top = max_degree.value_or(field.degree().value_or(0));
  }
  std::vector<double> a(static_cast<std::size_t>(std::max(top, 0)), 0.0);
  for (const auto& [alpha, p] : field.terms()) {
    const int k = alpha.degree();
    if (k < 1 || k > top) continue;
    a[static_cast<std::size_t>(k - 1)] += p.abs_sup().sum();
  }
  return a;
}

double d0_for_radius(const MaclaurinField& field, double radius,
                     std::optional<int> max_degree) {
  if (!(radius > 0.0)) throw std::invalid_argument("d0_for_radius: radius must be > 0");
  const auto a = ak_sums(field, max_degree);
  double d0 = 0.0, rk = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rk *= radius;
    d0 = std::max(d0, rk * a[i]);
  }
  return d0;
}

Outcome<double> check_assumption2(const MaclaurinField& field) {
  const int d = field.dim();
  if (field.is_series()) field.expand_to(1);
  // Jacobian at the origin: column j is the coefficient vector at e_j.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const auto it = field.terms().find(MultiIndex::unit(d, j));
    if (it == field.terms().end()) continue;
    if (!it->second.is_constant())
      return Outcome<double>::refuse("Jacobian at the origin is not constant in t");
    jac.col(j) = it->second.constant_value();
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && jac(i, j) != 0.0) {
        std::ostringstream os;
        os << "Jacobian at the origin is not diagonal: entry (" << i << "," << j
           << ") = " << jac(i, j);
        return Outcome<double>::refuse(os.str());
      }
  double mu0 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    if (!(jac(j, j) < 0.0)) {
      std::ostringstream os;
      os << "Jacobian diagonal entry " << j << " = " << jac(j, j) << " is not negative";
      return Outcome<double>::refuse(os.str());
    }
    mu0 = std::min(mu0, -jac(j, j));
  }
  return Outcome<double>::accept(mu0);
}

double drift_bound(const MaclaurinField& field) {
  const auto it = field.terms().find(MultiIndex::zero(field.dim()));
  if (it == field.terms().end()) return 0.0;
  return it->second.abs_sup().sum();
}

Assumption1Certificate verify_assumption1(const MaclaurinField& field, double radius,
                                          std::optional<int> check_degree) {
  Assumption1Certificate cert;
  cert.radius = radius;
  int top;
  if (field.is_series()) {
    if (!check_degree)
      throw std::invalid_argument("verify_assumption1: series field needs a check degree");
    top = *check_degree;
  } else {
    top = check_degree.value_or(field.degree().value_or(0));
  }
  cert.checked_degree = top;
  cert.d0 = d0_for_radius(field, radius, top);
  cert.valid = cert.d0 > 0.0;
  // Per-entry variant: |f_{j,alpha}(t)| <= d_tilde * radius^{-|alpha|}.
  double d_tilde = 0.0;
  for (const auto& [alpha, p] : field.terms()) {
    const int k = alpha.degree();
    if (k < 1 || k > top) continue;
    d_tilde = std::max(d_tilde, p.abs_sup().maxCoeff() * std::pow(radius, k));
  }
  cert.d_tilde = d_tilde;
  return cert;
}

AssumptionReport assumption_report(const MaclaurinField& field, double radius,
                                   std::optional<int> check_degree) {
  AssumptionReport rep;
  rep.radius = radius;
  const auto cert = verify_assumption1(field, radius, check_degree);
  rep.d0 = cert.d0;
  rep.degree = field.is_series() ? std::nullopt : field.degree();
  const auto mu = check_assumption2(field);
  if (mu.ok()) {
    rep.mu0 = mu.value();
    rep.jacobian_diagonal = true;
  } else {
    rep.mu0_refusal = mu.refusal();
    rep.jacobian_diagonal = mu.refusal().find("not diagonal") == std::string::npos &&
                            mu.refusal().find("not constant") == std::string::npos;
  }
  rep.nu0 = drift_bound(field);
  return rep;
}

}  // namespace carleman
