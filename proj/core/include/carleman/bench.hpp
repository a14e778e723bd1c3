#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "carleman/field.hpp"
#include "carleman/lifting.hpp"
#include "carleman/sim.hpp"

namespace carleman {

/// A built-in benchmark system: its field, certified constants at the
/// canonical radius, the default sweep horizon rule, and (when available) an
/// exact scalar solution and a closed-form finite-section pattern.
struct Benchmark {
  std::string name;
  std::shared_ptr<const MaclaurinField> field;
  double d0 = 0.0;
  double radius = 1.0;
  std::optional<double> mu0;
  int sign = 0;  // +-1 for the scalar family, 0 otherwise

  /// Default integration horizon as a function of the initial state.
  std::function<double(const Eigen::VectorXd&)> horizon;
  /// Exact solution x(t) for scalar benchmarks.
  std::function<double(double x0, double t)> oracle;
  /// Closed-form order-N section matrix, when one is known; sweeps and the
  /// CLI prefer this path, and tests cross-check it against the
  /// coefficient-derived assembly.
  std::function<Eigen::MatrixXd(int order)> analytic_section;
  /// Step size of the fine reference integration when there is no oracle.
  double reference_step = 1e-5;
};

/// The scalar family dx/dt = sign * x/(1+x^2): series coefficients
/// sign*(-1)^n at degree 2n+1, constants d0 = R = 1, mu0 = 1 for the stable
/// sign, and the horizon rules T- = 10,
/// T+ = max{(e-1)/(2e-1) (ln(1/x0) - 1), 0.1}.
Benchmark benchmark_1d(int sign);

/// The Van der Pol oscillator x'' - mu (1 - x^2) x' + x = 0 in first-order
/// form; polynomial of degree 3, d0(R) = max{(2+mu) R, mu R^3}.
Benchmark benchmark_vdp(double mu);

double vdp_d0(double mu, double radius);

/// Order-N section matrix for a benchmark (analytic pattern when available).
Eigen::MatrixXd section_matrix(const Benchmark& bench, int order);

/// Reference trajectory on the uniform grid with spacing h_record: exact
/// oracle samples when the benchmark has one, otherwise a fine fixed-step
/// integration recorded on that grid.
Trajectory benchmark_reference(const Benchmark& bench, const Eigen::VectorXd& x0,
                               double t_final, double h_record);

/// A grid of clipped-log errors with labelled axes. Rows follow ys, columns
/// follow xs; metadata is echoed into emitted CSV files.
struct SweepGrid {
  std::string corner;  // "<ylabel>\<xlabel>"
  std::vector<double> xs;
  std::vector<double> ys;
  Eigen::MatrixXd values;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Errors over initial conditions and truncation orders: cell (N, x0) is the
/// clipped-log sup error of the order-N section against the reference on
/// [0, T(x0)]. The horizon defaults to the benchmark rule; pass fixed_horizon
/// to use one T* for every column.
SweepGrid sweep_x0_N(const Benchmark& bench, const std::vector<double>& x0_axis,
                     const std::vector<int>& N_axis,
                     std::optional<double> fixed_horizon, double h);

/// Van der Pol error landscape over initial (x0, v0) at a fixed order and
/// horizon.
SweepGrid sweep_x0_v0(const Benchmark& bench, const std::vector<double>& x0_axis,
                      const std::vector<double>& v0_axis, int order, double t_star, double h);

/// Pointwise error over (t, N) for one scalar initial condition.
SweepGrid sweep_time(const Benchmark& bench, double x0, const std::vector<int>& N_axis,
                     double t_final, double h, int record_every = 1);

/// Largest x-axis value whose cells converge (value below the threshold) in
/// the row with y == row_value, scanning contiguously from the smallest x.
/// Returns 0 when even the first column fails.
double convergence_threshold(const SweepGrid& grid, double row_value,
                             double clipped_threshold = -12.0);

/// n equally spaced values from a to b inclusive (n >= 2), or {a} for n = 1.
std::vector<double> linspace(double a, double b, int n);

/// Worker count for sweep parallelism: the CARLEMAN_WORKERS environment
/// variable when set, hardware concurrency otherwise.
int sweep_worker_count();

/// CSV layout: '#'-prefixed metadata lines, then the corner label and x-axis
/// values, then one row per y value. 17 significant digits; byte-identical
/// across runs for identical inputs.
void emit_csv(const SweepGrid& grid, std::ostream& out);
void emit_csv_file(const SweepGrid& grid, const std::string& path);
SweepGrid parse_sweep_csv(std::istream& in);

/// Color ramp over the clipped-log range [-15, 5].
struct Palette {
  std::vector<std::array<int, 3>> stops;
  static Palette viridis();
  std::array<int, 3> sample(double unit) const;  // unit in [0, 1]
};

/// Self-contained SVG heatmap: one rect per cell, linear color map over
/// [-15, 5], axis labels and a colorbar; no external assets.
void emit_svg_heatmap(const SweepGrid& grid, std::ostream& out,
                      const Palette& palette = Palette::viridis());
void emit_svg_heatmap_file(const SweepGrid& grid, const std::string& path,
                           const Palette& palette = Palette::viridis());

}  // namespace carleman
