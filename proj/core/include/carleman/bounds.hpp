#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "carleman/field.hpp"
#include "carleman/outcome.hpp"

namespace carleman {

/// Inputs shared by every error bound: the decay constants (d0, R), the
/// initial-state norms, the linear decay rate mu0 when available, the drift
/// magnitude nu0, and the initial time.
struct BoundInputs {
  double d0 = 0.0;
  double radius = 0.0;
  double x0_inf = 0.0;
  double x0_two = 0.0;
  std::optional<double> mu0;
  double nu0 = 0.0;
  double t0 = 0.0;

  static BoundInputs from_state(double d0, double radius, const Eigen::VectorXd& x0,
                                std::optional<double> mu0 = {}, double nu0 = 0.0,
                                double t0 = 0.0);
  /// Throws std::invalid_argument when a structural invariant is broken
  /// (non-positive constants, inconsistent norms).
  void validate() const;
};

/// A bound evaluation: the numeric value together with a validity flag.
/// Probing outside a theorem's hypotheses yields valid = false and a
/// violation message naming the failed condition; it never throws, so sweep
/// harnesses can probe freely.
struct BoundValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;
  std::string violation;

  static BoundValue ok(double v) { return {v, true, {}}; }
  static BoundValue bad(std::string why) {
    return {std::numeric_limits<double>::quiet_NaN(), false, std::move(why)};
  }
};

/// Convergence horizon of the local error bound (theorem 3.1):
/// T* = (e-1) R / ((2e-1) d0) * ln(R / (e ||x0||_inf)).
/// Requires 0 < ||x0||_inf < R/e.
BoundValue tstar(const BoundInputs& in);

/// Inverse map of tstar at fixed (d0, R): the ||x0||_inf whose horizon
/// equals the given T*.
double tstar_inverse_x0(double d0, double radius, double t_star);

/// Local sup-norm bound on the true solution over [t0, t0 + T*]:
/// M0 = ||x0||_inf^{(e-1)/(2e-1)} (R/e)^{e/(2e-1)} < R/e.
BoundValue m0(const BoundInputs& in);

/// Error envelope of theorem 3.1 at truncation order N and time t.
BoundValue thm31_envelope(const BoundInputs& in, int N, double t);

/// Error envelope under an a-priori solution bound ||x(t)||_inf <= M on
/// [t0, t0+T1] (corollary 3.2), valid for t <= t0 + min{T1, R/d0 ln(R/(Me))}.
struct Cor32Result {
  BoundValue bound;
  double horizon = 0.0;  // the min above, measured from t0
};
Cor32Result cor32_envelope(const BoundInputs& in, double sup_bound, double t1, int N,
                           double t);

/// Best achievable horizon for a degree-L polynomial field, optimizing the
/// tstar expression over the convergence radius (corollary 3.3). Uses the
/// closed form
///   (e-1) / ((2e-1)(L-1) e^L a_L) ||x0||_inf^{1-L},  R = e^{L/(L-1)}||x0||_inf
/// whenever ||x0||_inf >= e^{-1} max_k (a_k/a_L)^{1/(L-k)}, and a log-spaced
/// grid search refined by golden-section otherwise.
struct Cor33Result {
  double horizon = 0.0;
  double maximizing_radius = 0.0;
  bool closed_form = false;
};
Outcome<Cor33Result> cor33_horizon(const MaclaurinField& field, const Eigen::VectorXd& x0);

/// The grid + golden-section route of cor33_horizon regardless of whether the
/// closed form applies; kept public so the two routes can be cross-checked.
Outcome<Cor33Result> cor33_horizon_numeric(const MaclaurinField& field,
                                           const Eigen::VectorXd& x0);

/// Whole-horizon envelope for fields with a negative diagonal Jacobian
/// (theorem 3.4): ||x0||_2 ((d0 + R mu0)||x0||_2 / (R^2 mu0))^N, independent
/// of t. Requires 0 < ||x0||_2 < R^2 mu0 / (d0 + R mu0).
BoundValue thm34_envelope(const BoundInputs& in, int N);

/// Parameters of the drift-perturbed whole-horizon bound (theorem 3.6):
/// eta0 = nu0/d0, eta1 = R mu0/d0, and the quadratic roots eps0 > eps1.
/// Refused when eta0 > 2 + eta1 - 2 sqrt(1 + eta1).
struct Thm36Params {
  double eta0 = 0.0;
  double eta1 = 0.0;
  double eps0 = 0.0;
  double eps1 = 0.0;
};
Outcome<Thm36Params> thm36_params(const BoundInputs& in);

/// Drift-perturbed whole-horizon envelope (theorem 3.6), valid when
/// ||x0||_2 < R eps0.
BoundValue thm36_envelope(const BoundInputs& in, const Thm36Params& params, int N);

/// Exponential decay envelope for the true solution (corollary 5.6):
/// ||x0||_2 exp(-(mu0 - d0 ||x0||_2 / (R (R - ||x0||_2))) (t - t0)).
BoundValue decay_envelope(const BoundInputs& in, double t);

/// Uniform bound on the solution norm under the theorem 3.6 hypotheses:
/// max{||x0||_2, R eps1}.
BoundValue state_bound(const BoundInputs& in, const Thm36Params& params);

/// Flat key=value report of every applicable bound for a field/initial pair,
/// with one section per theorem tag (thm31, cor33, thm34, thm36, cor56).
struct BoundReport {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, bool value);
  std::string to_text() const;
};

BoundReport make_bound_report(const MaclaurinField& field, const Eigen::VectorXd& x0,
                              double radius, double t0 = 0.0,
                              std::optional<int> check_degree = {});

}  // namespace carleman
