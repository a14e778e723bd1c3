#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "carleman/field.hpp"
#include "carleman/lifting.hpp"

namespace carleman {

/// A fixed-step trajectory. The grid is uniform except that the final step
/// may be shortened to land exactly on t_final. When the integration hits the
/// blow-up guard (sup-norm above 1e10 or a non-finite entry), the trajectory
/// is truncated at the last finite sample and blew_up is set.
struct Trajectory {
  enum class Kind { nonlinear, lifted, oracle };

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  Kind kind = Kind::nonlinear;
  int lifted_order = 0;   // N for lifted trajectories
  int compare_dim = 0;    // components entering sup_error (first block for lifted)
  bool blew_up = false;
  std::size_t blowup_index = 0;
};

/// Classical 4-stage Runge-Kutta on dx/dt = f(t, x). Series fields must be
/// given a truncation degree. record_every keeps every n-th step (plus the
/// final point), for fine integrations sampled on a coarse grid.
Trajectory integrate_nonlinear(const MaclaurinField& field, const Eigen::VectorXd& x0,
                               double t0, double t_final, double h,
                               std::optional<int> truncation_degree = {},
                               int record_every = 1);

/// Same stepping applied to the lifted linear system dz/dt = A(t) z with
/// z(t0) = lift_initial(x0, N). Constant fields use a precomputed one-step
/// propagator (the RK4 update map I + hA + ... + (hA)^4/24).
Trajectory integrate_section(const FiniteSection& section, const Eigen::VectorXd& x0,
                             double t0, double t_final, double h, int record_every = 1);

/// Solution of dx/dt = +- x/(1+x^2), x(0) = x0 > 0, from its implicit form
/// ln x + x^2/2 -+ t = ln x0 + x0^2/2, by bracketing bisection to 1e-13.
double oracle_1d(int sign, double x0, double t);

/// max over the common grid of ||y(t) - x_ref(t)||_inf, where y takes the
/// first compare_dim components of each trajectory. Grids must agree to
/// 1e-12 relative; a trajectory truncated by blow-up compares as +inf on the
/// missing tail.
double sup_error(const Trajectory& lifted, const Trajectory& reference);

/// log10 of the error clipped into [1e-15, 1e5].
double clipped_log(double e);

/// Pointwise error e(t) = ||y(t) - x_ref(t)||_inf with its clipped log.
struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> raw;
  std::vector<double> clipped;
};
ErrorSeries error_series(const Trajectory& lifted, const Trajectory& reference);

/// Trajectory CSV: header t,x1,... (nonlinear/oracle) or t,y1,... (lifted);
/// 17 significant digits throughout.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace carleman
