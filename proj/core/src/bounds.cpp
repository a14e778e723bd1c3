#include "carleman/bounds.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace carleman {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

std::string describe(const char* cond, double threshold, double got) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: threshold %.17g, got %.17g", cond, threshold, got);
  return buf;
}

}  // namespace

BoundInputs BoundInputs::from_state(double d0, double radius, const Eigen::VectorXd& x0,
                                    std::optional<double> mu0, double nu0, double t0) {
  BoundInputs in;
  in.d0 = d0;
  in.radius = radius;
  in.x0_inf = x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0;
  in.x0_two = x0.norm();
  in.mu0 = mu0;
  in.nu0 = nu0;
  in.t0 = t0;
  in.validate();
  return in;
}

void BoundInputs::validate() const {
  if (!(d0 > 0.0)) throw std::invalid_argument("bound inputs: d0 must be > 0");
  if (!(radius > 0.0)) throw std::invalid_argument("bound inputs: radius must be > 0");
  if (x0_inf < 0.0 || x0_two < 0.0)
    throw std::invalid_argument("bound inputs: norms must be >= 0");
  if (x0_inf > x0_two * (1.0 + 1e-12))
    throw std::invalid_argument("bound inputs: ||x0||_inf must not exceed ||x0||_2");
  if (mu0 && !(*mu0 > 0.0)) throw std::invalid_argument("bound inputs: mu0 must be > 0");
  if (nu0 < 0.0) throw std::invalid_argument("bound inputs: nu0 must be >= 0");
}

BoundValue tstar(const BoundInputs& in) {
  if (in.x0_inf == 0.0)
    return BoundValue::bad("eq. 3.1 requires x0 != 0; the horizon is unbounded at the origin");
  // the boundary ||x0||_inf = R/e is admitted with the degenerate horizon 0
  if (in.x0_inf > in.radius / kE)
    return BoundValue::bad(
        describe("eq. 3.1 requires ||x0||_inf < R/e", in.radius / kE, in.x0_inf));
  const double value = (kE - 1.0) * in.radius / ((2.0 * kE - 1.0) * in.d0) *
                       std::log(in.radius / (kE * in.x0_inf));
  return BoundValue::ok(value);
}

double tstar_inverse_x0(double d0, double radius, double t_star) {
  // Solve t_star = (e-1)R/((2e-1)d0) ln(R/(e x0)) for x0.
  return radius / kE * std::exp(-t_star * (2.0 * kE - 1.0) * d0 / ((kE - 1.0) * radius));
}

BoundValue m0(const BoundInputs& in) {
  const auto guard = tstar(in);
  if (!guard.valid) return guard;
  const double value = std::pow(in.x0_inf, (kE - 1.0) / (2.0 * kE - 1.0)) *
                       std::pow(in.radius / kE, kE / (2.0 * kE - 1.0));
  return BoundValue::ok(value);
}

BoundValue thm31_envelope(const BoundInputs& in, int N, double t) {
  if (N < 1) return BoundValue::bad("truncation order must be >= 1");
  const auto horizon = tstar(in);
  if (!horizon.valid) return horizon;
  if (t < in.t0 || t > in.t0 + horizon.value + 1e-12 * std::abs(horizon.value))
    return BoundValue::bad(
        describe("thm. 3.1 bound holds on [t0, t0+T*] only", in.t0 + horizon.value, t));
  const double m = m0(in).value;
  const double prefactor = in.radius * m / (std::sqrt(2.0 * M_PI) * (in.radius - m));
  const double value = prefactor * std::pow(N, -1.5) *
                       std::exp(in.d0 * (t - in.t0) * N / in.radius) *
                       std::pow(in.x0_inf * kE / in.radius, (kE - 1.0) * N / (2.0 * kE - 1.0));
  return BoundValue::ok(value);
}

Cor32Result cor32_envelope(const BoundInputs& in, double sup_bound, double t1, int N,
                           double t) {
  Cor32Result result;
  if (N < 1) {
    result.bound = BoundValue::bad("truncation order must be >= 1");
    return result;
  }
  if (!(sup_bound > 0.0) || !(sup_bound < in.radius / kE)) {
    result.bound =
        BoundValue::bad(describe("cor. 3.2 requires 0 < M < R/e", in.radius / kE, sup_bound));
    return result;
  }
  result.horizon =
      std::min(t1, in.radius / in.d0 * std::log(in.radius / (sup_bound * kE)));
  if (t < in.t0 || t > in.t0 + result.horizon + 1e-12 * std::abs(result.horizon)) {
    result.bound = BoundValue::bad(
        describe("cor. 3.2 bound holds on [t0, t0+T~*] only", in.t0 + result.horizon, t));
    return result;
  }
  const double prefactor =
      in.radius * sup_bound / (std::sqrt(2.0 * M_PI) * (in.radius - sup_bound));
  const double base = sup_bound * std::exp(in.d0 * (t - in.t0) / in.radius + 1.0) / in.radius;
  result.bound = BoundValue::ok(prefactor * std::pow(N, -1.5) * std::pow(base, N));
  return result;
}

namespace {

Outcome<Cor33Result> cor33_check_inputs(const MaclaurinField& field,
                                        const Eigen::VectorXd& x0, std::vector<double>& a,
                                        double& x0_inf) {
  if (field.is_series())
    return Outcome<Cor33Result>::refuse("cor. 3.3 applies to polynomial fields only");
  const int degree = field.degree().value_or(0);
  if (degree < 2)
    return Outcome<Cor33Result>::refuse("cor. 3.3 requires polynomial degree >= 2");
  x0_inf = x0.cwiseAbs().maxCoeff();
  if (x0_inf == 0.0) return Outcome<Cor33Result>::refuse("cor. 3.3 requires x0 != 0");
  a = ak_sums(field);
  if (!(a.back() > 0.0))
    return Outcome<Cor33Result>::refuse("leading-degree coefficient mass is zero");
  return Outcome<Cor33Result>::accept(Cor33Result{});
}

}  // namespace

Outcome<Cor33Result> cor33_horizon(const MaclaurinField& field, const Eigen::VectorXd& x0) {
  std::vector<double> a;
  double x0_inf = 0.0;
  if (auto gate = cor33_check_inputs(field, x0, a, x0_inf); !gate.ok()) return gate;
  const int degree = field.degree().value_or(0);
  const double a_top = a.back();

  // Radius above which d0(R) = a_L R^L.
  double pivot = 0.0;
  for (int k = 1; k < degree; ++k)
    if (a[static_cast<std::size_t>(k - 1)] > 0.0)
      pivot = std::max(pivot, std::pow(a[static_cast<std::size_t>(k - 1)] / a_top,
                                       1.0 / (degree - k)));

  if (x0_inf >= pivot / kE) {
    Cor33Result result;
    result.closed_form = true;
    result.maximizing_radius = std::pow(kE, static_cast<double>(degree) / (degree - 1)) * x0_inf;
    result.horizon = (kE - 1.0) /
                     ((2.0 * kE - 1.0) * (degree - 1) * std::pow(kE, degree) * a_top) *
                     std::pow(x0_inf, 1.0 - degree);
    return Outcome<Cor33Result>::accept(result);
  }
  return cor33_horizon_numeric(field, x0);
}

Outcome<Cor33Result> cor33_horizon_numeric(const MaclaurinField& field,
                                           const Eigen::VectorXd& x0) {
  std::vector<double> a;
  double x0_inf = 0.0;
  if (auto gate = cor33_check_inputs(field, x0, a, x0_inf); !gate.ok()) return gate;

  // Objective is tstar as a function of R with d0 = d0(field, R).
  auto objective = [&](double R) {
    double d0 = 0.0, rk = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      rk *= R;
      d0 = std::max(d0, rk * a[i]);
    }
    return (kE - 1.0) * R / ((2.0 * kE - 1.0) * d0) * std::log(R / (kE * x0_inf));
  };
  const double lo = kE * x0_inf;
  const double hi = 1e3 * lo;
  constexpr int kGridPoints = 512;
  double best_r = lo * (1.0 + 1e-12), best_v = 0.0;
  for (int i = 1; i <= kGridPoints; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / kGridPoints);
    const double v = objective(r);
    if (v > best_v) {
      best_v = v;
      best_r = r;
    }
  }
  // Golden-section refinement around the best grid point.
  double lo_r = best_r / std::pow(hi / lo, 1.0 / kGridPoints);
  double hi_r = best_r * std::pow(hi / lo, 1.0 / kGridPoints);
  lo_r = std::max(lo_r, lo * (1.0 + 1e-15));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi_r - inv_phi * (hi_r - lo_r);
  double d = lo_r + inv_phi * (hi_r - lo_r);
  double fc = objective(c), fd = objective(d);
  while ((hi_r - lo_r) > 1e-10 * hi_r) {
    if (fc > fd) {
      hi_r = d;
      d = c;
      fd = fc;
      c = hi_r - inv_phi * (hi_r - lo_r);
      fc = objective(c);
    } else {
      lo_r = c;
      c = d;
      fc = fd;
      d = lo_r + inv_phi * (hi_r - lo_r);
      fd = objective(d);
    }
  }
  Cor33Result result;
  result.maximizing_radius = 0.5 * (lo_r + hi_r);
  result.horizon = objective(result.maximizing_radius);
  result.closed_form = false;
  return Outcome<Cor33Result>::accept(result);
}

BoundValue thm34_envelope(const BoundInputs& in, int N) {
  if (N < 1) return BoundValue::bad("truncation order must be >= 1");
  if (!in.mu0) return BoundValue::bad("thm. 3.4 requires the decay rate mu0");
  const double threshold =
      in.radius * in.radius * *in.mu0 / (in.d0 + in.radius * *in.mu0);
  if (!(in.x0_two > 0.0) || !(in.x0_two < threshold))
    return BoundValue::bad(
        describe("eq. 3.5 requires 0 < ||x0||_2 < R^2 mu0/(d0 + R mu0)", threshold, in.x0_two));
  const double base = in.x0_two / threshold;
  return BoundValue::ok(in.x0_two * std::pow(base, N));
}

Outcome<Thm36Params> thm36_params(const BoundInputs& in) {
  if (!in.mu0) return Outcome<Thm36Params>::refuse("thm. 3.6 requires the decay rate mu0");
  Thm36Params p;
  p.eta0 = in.nu0 / in.d0;
  p.eta1 = in.radius * *in.mu0 / in.d0;
  const double gate = 2.0 + p.eta1 - 2.0 * std::sqrt(1.0 + p.eta1);
  if (p.eta0 > gate)
    return Outcome<Thm36Params>::refuse(
        describe("eq. 3.16 requires eta0 <= 2 + eta1 - 2 sqrt(1 + eta1)", gate, p.eta0));
  const double disc = (p.eta1 - p.eta0) * (p.eta1 - p.eta0) - 4.0 * p.eta0;
  if (disc < 0.0)
    throw std::logic_error("thm36_params: negative discriminant despite eq. 3.16");
  p.eps0 = (p.eta0 + p.eta1 + std::sqrt(disc)) / (2.0 * (1.0 + p.eta1));
  p.eps1 = p.eta0 == 0.0 ? 0.0 : p.eta0 / ((1.0 + p.eta1) * p.eps0);
  return Outcome<Thm36Params>::accept(p);
}

BoundValue thm36_envelope(const BoundInputs& in, const Thm36Params& p, int N) {
  if (N < 1) return BoundValue::bad("truncation order must be >= 1");
  const double gate = in.radius * p.eps0;
  if (!(in.x0_two > 0.0) || !(in.x0_two < gate))
    return BoundValue::bad(describe("eq. 3.17 requires 0 < ||x0||_2 < R eps0", gate, in.x0_two));
  const double level = std::max(in.x0_two, in.radius * p.eps1);
  const double value = p.eps0 * level / (p.eta1 * (1.0 - p.eps0)) *
                       std::pow(level / (in.radius * p.eps0), N);
  return BoundValue::ok(value);
}

BoundValue decay_envelope(const BoundInputs& in, double t) {
  if (!in.mu0) return BoundValue::bad("cor. 5.6 requires the decay rate mu0");
  const double threshold =
      in.radius * in.radius * *in.mu0 / (in.d0 + in.radius * *in.mu0);
  if (!(in.x0_two > 0.0) || !(in.x0_two < threshold))
    return BoundValue::bad(
        describe("eq. 3.5 requires 0 < ||x0||_2 < R^2 mu0/(d0 + R mu0)", threshold, in.x0_two));
  if (t < in.t0) return BoundValue::bad("time precedes t0");
  const double rate =
      *in.mu0 - in.d0 * in.x0_two / (in.radius * (in.radius - in.x0_two));
  return BoundValue::ok(in.x0_two * std::exp(-rate * (t - in.t0)));
}

BoundValue state_bound(const BoundInputs& in, const Thm36Params& p) {
  const double gate = in.radius * p.eps0;
  if (!(in.x0_two < gate))
    return BoundValue::bad(describe("eq. 3.17 requires ||x0||_2 < R eps0", gate, in.x0_two));
  return BoundValue::ok(std::max(in.x0_two, in.radius * p.eps1));
}

void BoundReport::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void BoundReport::add(const std::string& key, double value) {
  // shortest representation that round-trips exactly
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  entries.emplace_back(key, std::string(buf, res.ptr));
}

void BoundReport::add(const std::string& key, bool value) {
  entries.emplace_back(key, value ? "true" : "false");
}

std::string BoundReport::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
  return os.str();
}

BoundReport make_bound_report(const MaclaurinField& field, const Eigen::VectorXd& x0,
                              double radius, double t0, std::optional<int> check_degree) {
  BoundReport report;
  const auto cert = verify_assumption1(field, radius, check_degree);
  const auto mu = check_assumption2(field);
  const double nu0 = drift_bound(field);
  BoundInputs in = BoundInputs::from_state(
      cert.d0, radius, x0, mu.ok() ? std::optional<double>(mu.value()) : std::nullopt, nu0, t0);

  report.add("inputs.d0", in.d0);
  report.add("inputs.radius", in.radius);
  report.add("inputs.x0_inf", in.x0_inf);
  report.add("inputs.x0_two", in.x0_two);
  report.add("inputs.t0", in.t0);
  report.add("assumption1.valid", cert.valid);
  report.add("assumption1.checked_degree", static_cast<double>(cert.checked_degree));
  report.add("assumption1.d_tilde", cert.d_tilde);
  if (mu.ok())
    report.add("assumption2.mu0", mu.value());
  else
    report.add("assumption2.refusal", mu.refusal());
  report.add("drift.nu0", nu0);

  const auto T = tstar(in);
  report.add("thm31.valid", T.valid);
  if (T.valid) {
    report.add("thm31.tstar", T.value);
    report.add("thm31.m0", m0(in).value);
  } else {
    report.add("thm31.violation", T.violation);
  }

  const auto c33 = cor33_horizon(field, x0);
  report.add("cor33.valid", c33.ok());
  if (c33.ok()) {
    report.add("cor33.horizon", c33.value().horizon);
    report.add("cor33.radius", c33.value().maximizing_radius);
    report.add("cor33.closed_form", c33.value().closed_form);
  } else {
    report.add("cor33.violation", c33.refusal());
  }

  if (in.mu0) {
    const double threshold =
        in.radius * in.radius * *in.mu0 / (in.d0 + in.radius * *in.mu0);
    report.add("thm34.threshold", threshold);
    const auto t34 = thm34_envelope(in, 1);
    report.add("thm34.valid", t34.valid);
    if (t34.valid) {
      report.add("thm34.base", in.x0_two / threshold);
      report.add("thm34.bound_n1", t34.value);
    } else {
      report.add("thm34.violation", t34.violation);
    }

    const auto params = thm36_params(in);
    report.add("thm36.valid", params.ok());
    if (params.ok()) {
      const auto& p = params.value();
      report.add("thm36.eta0", p.eta0);
      report.add("thm36.eta1", p.eta1);
      report.add("thm36.eps0", p.eps0);
      report.add("thm36.eps1", p.eps1);
      const auto env = thm36_envelope(in, p, 1);
      report.add("thm36.applicable", env.valid);
      if (env.valid) {
        report.add("thm36.base", std::max(in.x0_two, in.radius * p.eps1) / (in.radius * p.eps0));
        report.add("thm36.bound_n1", env.value);
        report.add("thm36.state_bound", state_bound(in, p).value);
      } else {
        report.add("thm36.violation", env.violation);
      }
    } else {
      report.add("thm36.violation", params.refusal());
    }

    const auto decay = decay_envelope(in, in.t0 + 1.0);
    report.add("cor56.valid", decay.valid);
    if (decay.valid) {
      report.add("cor56.rate",
                 *in.mu0 - in.d0 * in.x0_two / (in.radius * (in.radius - in.x0_two)));
    }
  } else {
    report.add("thm34.valid", false);
    report.add("thm34.violation", std::string("assumption 2 refused: ") + mu.refusal());
    report.add("thm36.valid", false);
    report.add("thm36.violation", std::string("assumption 2 refused: ") + mu.refusal());
    report.add("cor56.valid", false);
  }
  return report;
}

}  // namespace carleman
