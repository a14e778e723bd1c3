#include "carleman/sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace carleman {

namespace {

constexpr double kBlowupGuard = 1e10;

bool finite_and_bounded(const Eigen::VectorXd& v) {
  return v.allFinite() && v.cwiseAbs().maxCoeff() <= kBlowupGuard;
}

// Shared stepping loop: `step(t, h, x) -> x_next`.
template <class StepFn>
Trajectory run_fixed_step(const Eigen::VectorXd& x0, double t0, double t_final, double h,
                          int record_every, StepFn&& step) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate: step size must be > 0");
  if (t_final < t0) throw std::invalid_argument("integrate: t_final precedes t0");
  if (record_every < 1) throw std::invalid_argument("integrate: record_every must be >= 1");

  Trajectory out;
  const auto n_full = static_cast<std::size_t>(std::floor((t_final - t0) / h + 1e-9));
  out.times.reserve(n_full / static_cast<std::size_t>(record_every) + 2);
  out.states.reserve(out.times.capacity());
  out.times.push_back(t0);
  out.states.push_back(x0);

  Eigen::VectorXd x = x0;
  double t = t0;
  for (std::size_t i = 1;; ++i) {
    double dt = h;
    double t_next = t0 + static_cast<double>(i) * h;
    bool last = false;
    if (t_next >= t_final - 1e-12 * std::max(1.0, std::abs(t_final))) {
      dt = t_final - t;
      t_next = t_final;
      last = true;
    }
    if (dt <= 0.0) break;
    x = step(t, dt, x);
    t = t_next;
    if (!finite_and_bounded(x)) {
      out.blew_up = true;
      out.blowup_index = out.times.size();
      break;
    }
    if (last || i % static_cast<std::size_t>(record_every) == 0) {
      out.times.push_back(t);
      out.states.push_back(x);
    }
    if (last) break;
  }
  return out;
}

}  // namespace

Trajectory integrate_nonlinear(const MaclaurinField& field, const Eigen::VectorXd& x0,
                               double t0, double t_final, double h,
                               std::optional<int> truncation_degree, int record_every) {
  if (x0.size() != field.dim())
    throw std::invalid_argument("integrate_nonlinear: initial state dimension mismatch");
  auto rhs = [&](double t, const Eigen::VectorXd& x) {
    return field.evaluate(t, x, truncation_degree);
  };
  auto step = [&](double t, double dt, const Eigen::VectorXd& x) {
    const Eigen::VectorXd k1 = rhs(t, x);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
    return (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };
  Trajectory out = run_fixed_step(x0, t0, t_final, h, record_every, step);
  out.kind = Trajectory::Kind::nonlinear;
  out.compare_dim = field.dim();
  return out;
}

Trajectory integrate_section(const FiniteSection& section, const Eigen::VectorXd& x0,
                             double t0, double t_final, double h, int record_every) {
  if (x0.size() != section.dim())
    throw std::invalid_argument("integrate_section: initial state dimension mismatch");
  const Eigen::VectorXd z0 = lift_initial(x0, section.order()).values;

  Trajectory out;
  if (section.is_constant()) {
    const Eigen::MatrixXd& a = section.matrix();
    // One-step RK4 propagator for a constant matrix:
    // I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24.
    auto propagator = [&a](double dt) {
      const Eigen::MatrixXd ha = dt * a;
      const auto n = a.rows();
      Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n) + ha;
      Eigen::MatrixXd term = ha;
      for (int p = 2; p <= 4; ++p) {
        term = (term * ha / p).eval();
        phi += term;
      }
      return phi;
    };
    const Eigen::MatrixXd phi_full = propagator(h);
    double cached_dt = h;
    Eigen::MatrixXd phi_partial;
    auto step = [&](double, double dt, const Eigen::VectorXd& z) -> Eigen::VectorXd {
      if (dt == h) return phi_full * z;
      if (phi_partial.size() == 0 || dt != cached_dt) {
        phi_partial = propagator(dt);
        cached_dt = dt;
      }
      return phi_partial * z;
    };
    out = run_fixed_step(z0, t0, t_final, h, record_every, step);
  } else {
    auto step = [&](double t, double dt, const Eigen::VectorXd& z) -> Eigen::VectorXd {
      const Eigen::MatrixXd a1 = section.assemble(t);
      const Eigen::MatrixXd a2 = section.assemble(t + 0.5 * dt);
      const Eigen::MatrixXd a3 = section.assemble(t + dt);
      const Eigen::VectorXd k1 = a1 * z;
      const Eigen::VectorXd k2 = a2 * (z + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = a2 * (z + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = a3 * (z + dt * k3);
      return z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    out = run_fixed_step(z0, t0, t_final, h, record_every, step);
  }
  out.kind = Trajectory::Kind::lifted;
  out.lifted_order = section.order();
  out.compare_dim = section.dim();
  return out;
}

double oracle_1d(int sign, double x0, double t) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("oracle_1d: sign must be +-1");
  if (!(x0 > 0.0)) throw std::invalid_argument("oracle_1d: x0 must be > 0");
  // g(x) = ln x + x^2/2 is strictly increasing on x > 0; solve g(x) = target.
  const double target = std::log(x0) + 0.5 * x0 * x0 + sign * t;
  auto g = [](double x) { return std::log(x) + 0.5 * x * x; };
  double lo = x0, hi = x0;
  while (g(lo) > target) lo *= 0.5;
  while (g(hi) < target) hi *= 2.0;
  if (!(g(lo) <= target && target <= g(hi)))
    throw std::runtime_error("oracle_1d: bracketing failed");
  while (hi - lo > 1e-13 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  // Newton polish; the bisection tolerance alone is too coarse in relative
  // terms once the stable branch has decayed to ~1e-14.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 40; ++it) {
    const double step = (g(x) - target) / (1.0 / x + x);
    double next = x - step;
    if (!(next > 0.0)) next = 0.5 * x;
    const bool done = std::abs(next - x) <= 1e-15 * next;
    x = next;
    if (done) break;
  }
  return x;
}

namespace {

void check_grids_match(const Trajectory& a, const Trajectory& b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max({1.0, std::abs(a.times[i]), std::abs(b.times[i])});
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * scale)
      throw std::invalid_argument("error metric: time grids do not match");
  }
}

}  // namespace

double sup_error(const Trajectory& lifted, const Trajectory& reference) {
  const auto series = error_series(lifted, reference);
  double sup = 0.0;
  for (double e : series.raw) sup = std::max(sup, e);
  return sup;
}

double clipped_log(double e) {
  if (e < 0.0) throw std::invalid_argument("clipped_log: error must be >= 0");
  return std::log10(std::min(std::max(e, 1e-15), 1e5));
}

ErrorSeries error_series(const Trajectory& lifted, const Trajectory& reference) {
  const int d = std::min(lifted.compare_dim, reference.compare_dim);
  if (d < 1) throw std::invalid_argument("error metric: no comparable components");
  const std::size_t full = std::max(lifted.times.size(), reference.times.size());
  const std::size_t common = std::min(lifted.times.size(), reference.times.size());
  if (!lifted.blew_up && !reference.blew_up && lifted.times.size() != reference.times.size())
    throw std::invalid_argument("error metric: time grids differ in length");
  check_grids_match(lifted, reference, common);

  ErrorSeries out;
  out.times.reserve(full);
  out.raw.reserve(full);
  out.clipped.reserve(full);
  for (std::size_t i = 0; i < common; ++i) {
    const double e =
        (lifted.states[i].head(d) - reference.states[i].head(d)).cwiseAbs().maxCoeff();
    out.times.push_back(lifted.times[i]);
    out.raw.push_back(e);
    out.clipped.push_back(clipped_log(e));
  }
  // a truncated (blown-up) trajectory counts as +inf past its end
  const auto& longer = lifted.times.size() >= reference.times.size() ? lifted : reference;
  for (std::size_t i = common; i < full; ++i) {
    out.times.push_back(longer.times[i]);
    out.raw.push_back(std::numeric_limits<double>::infinity());
    out.clipped.push_back(clipped_log(std::numeric_limits<double>::infinity()));
  }
  return out;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  const char* prefix = trajectory.kind == Trajectory::Kind::lifted ? "y" : "x";
  out << 't';
  const Eigen::Index width = trajectory.states.empty() ? 0 : trajectory.states[0].size();
  for (Eigen::Index j = 0; j < width; ++j) out << ',' << prefix << (j + 1);
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", trajectory.times[i]);
    out << buf;
    for (Eigen::Index j = 0; j < width; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", trajectory.states[i][j]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace carleman
