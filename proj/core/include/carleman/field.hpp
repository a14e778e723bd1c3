#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "carleman/multi_index.hpp"
#include "carleman/outcome.hpp"

namespace carleman {

/// One Maclaurin coefficient vector f_alpha(t), either constant or a
/// function of time. Time-varying providers may declare a componentwise
/// bound on |f_j(t)| so that sup-over-t quantities stay computable.
class CoefficientProvider {
public:
  static CoefficientProvider constant(Eigen::VectorXd value);
  static CoefficientProvider time_varying(std::function<Eigen::VectorXd(double)> fn,
                                          std::optional<Eigen::VectorXd> abs_sup = {});

  Eigen::VectorXd operator()(double t) const;
  bool is_constant() const { return constant_.has_value(); }
  const Eigen::VectorXd& constant_value() const;
  /// Componentwise sup of |f_j(t)| over t; the absolute value itself for
  /// constants, the declared bound otherwise. Throws when undeclared.
  Eigen::VectorXd abs_sup() const;

private:
  CoefficientProvider() = default;
  std::optional<Eigen::VectorXd> constant_;
  std::function<Eigen::VectorXd(double)> fn_;
  std::optional<Eigen::VectorXd> abs_sup_;
};

/// Certificate for the uniform coefficient-decay hypothesis:
/// sum_j sum_{|alpha|=k} |f_{j,alpha}(t)| <= d0 * radius^{-k} for all k >= 1.
struct Assumption1Certificate {
  double d0 = 0.0;
  double radius = 0.0;
  int checked_degree = 0;   // degree up to which the sums were checked
  bool valid = false;       // requires d0 > 0
  double d_tilde = 0.0;     // tightest per-entry constant |f_{j,alpha}| <= d_tilde * radius^{-|alpha|}
};

/// Everything the bound machinery needs to know about a field:
/// decay constants, linear-part decay rate, drift magnitude.
struct AssumptionReport {
  double radius = 0.0;
  double d0 = 0.0;
  std::optional<double> mu0;   // present only when the Jacobian qualifies
  std::string mu0_refusal;     // clause violated when mu0 is absent
  double nu0 = 0.0;
  bool jacobian_diagonal = false;
  std::optional<int> degree;   // nullopt: series field of unbounded degree
};

/// The vector field f(t, x) as a Maclaurin series: a map from multi-indices
/// to d-dimensional coefficient providers. Polynomial fields store all terms
/// eagerly; series fields carry a per-degree generator expanded on demand.
class MaclaurinField {
public:
  using TermMap = std::map<MultiIndex, CoefficientProvider, GradedOrder>;
  /// Generator contract: return all constant terms of exact total degree k.
  using DegreeGenerator =
      std::function<std::vector<std::pair<MultiIndex, Eigen::VectorXd>>(int k)>;

  static MaclaurinField polynomial(
      int dim, const std::vector<std::pair<MultiIndex, Eigen::VectorXd>>& terms);
  static MaclaurinField with_providers(
      int dim, const std::vector<std::pair<MultiIndex, CoefficientProvider>>& terms);
  static MaclaurinField series(int dim, DegreeGenerator generator);

  int dim() const { return dim_; }
  /// Max |alpha| over stored terms; nullopt for series fields.
  std::optional<int> degree() const;
  bool is_series() const { return static_cast<bool>(generator_); }
  /// True when there is no alpha = 0 term, i.e. f(t, 0) = 0.
  bool is_equilibrium() const;
  /// True when every coefficient provider is constant in t.
  bool is_constant() const;

  /// Materialize generator terms up to the given total degree. Safe to call
  /// repeatedly; expansion happens at most once per degree.
  void expand_to(int max_degree) const;
  int expanded_degree() const;

  /// Stored terms. For series fields only degrees <= expanded_degree() are
  /// present; call expand_to first. Iteration follows GradedOrder.
  const TermMap& terms() const { return terms_; }

  /// f(t, x) = sum_alpha f_alpha(t) x^alpha. Series fields must be given an
  /// explicit truncation degree.
  Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x,
                           std::optional<int> truncation_degree = {}) const;

private:
  MaclaurinField() : expand_mutex_(std::make_unique<std::mutex>()) {}
  void insert_term(const MultiIndex& alpha, const CoefficientProvider& p);

  int dim_ = 0;
  mutable TermMap terms_;
  DegreeGenerator generator_;
  mutable int expanded_degree_ = 0;
  mutable std::unique_ptr<std::mutex> expand_mutex_;
};

/// f(t, x) for a field (free-function spelling of MaclaurinField::evaluate).
Eigen::VectorXd eval_field(const MaclaurinField& field, double t, const Eigen::VectorXd& x,
                           std::optional<int> truncation_degree = {});

/// a_k = sup_t sum_j sum_{|alpha|=k} |f_{j,alpha}(t)| for k = 1..degree.
/// Polynomial fields use their own degree; series fields need max_degree.
std::vector<double> ak_sums(const MaclaurinField& field,
                            std::optional<int> max_degree = {});

/// Decay constant for a polynomial field at convergence radius R:
/// d0 = max_k R^k a_k.
double d0_for_radius(const MaclaurinField& field, double radius,
                     std::optional<int> max_degree = {});

/// Decay rate of the linear part: requires the degree-1 coefficients to form
/// a constant diagonal matrix with negative diagonal entries lambda_j, and
/// returns mu0 = min_j(-lambda_j). Refusals name the violated clause.
Outcome<double> check_assumption2(const MaclaurinField& field);

/// nu0 = sup_t sum_j |f_{j,0}(t)|; zero for equilibrium fields.
double drift_bound(const MaclaurinField& field);

/// Check the uniform decay hypothesis at radius R up to check_degree
/// (defaults to the polynomial degree) and report the witnessing d0.
Assumption1Certificate verify_assumption1(const MaclaurinField& field, double radius,
                                          std::optional<int> check_degree = {});

/// Bundle of all assumption-related constants for a field at radius R.
AssumptionReport assumption_report(const MaclaurinField& field, double radius,
                                   std::optional<int> check_degree = {});

}  // namespace carleman
