#include "carleman/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace carleman {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;
constexpr double kBlowupGuard = 1e10;

// Uniform recording grid matching the fixed-step integrators: multiples of h
// plus a shortened final point landing on t_final.
std::vector<double> uniform_grid(double t_final, double h) {
  std::vector<double> grid;
  const auto n_full = static_cast<std::size_t>(std::floor(t_final / h + 1e-9));
  grid.reserve(n_full + 2);
  for (std::size_t i = 0; i <= n_full; ++i) grid.push_back(static_cast<double>(i) * h);
  if (grid.back() < t_final - 1e-12 * std::max(1.0, t_final)) grid.push_back(t_final);
  return grid;
}

// RK4 one-step propagator for a constant system matrix.
Eigen::MatrixXd rk4_propagator(const Eigen::MatrixXd& a, double dt) {
  const Eigen::MatrixXd ha = dt * a;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(a.rows(), a.cols()) + ha;
  Eigen::MatrixXd term = ha;
  for (int p = 2; p <= 4; ++p) {
    term = (term * ha / p).eval();
    phi += term;
  }
  return phi;
}

// Hand-rolled fixed-size RK4 for the Van der Pol reference; the generic
// integrator's dynamic vectors are too slow for 10^4-cell sweeps.
std::vector<Eigen::Vector2d> vdp_reference_states(double mu, const Eigen::Vector2d& x0,
                                                  const std::vector<double>& grid,
                                                  double h_fine) {
  auto rhs = [mu](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(x[1], -x[0] + mu * (1.0 - x[0] * x[0]) * x[1]);
  };
  auto rk4 = [&rhs](Eigen::Vector2d x, double dt) {
    const Eigen::Vector2d k1 = rhs(x);
    const Eigen::Vector2d k2 = rhs(x + 0.5 * dt * k1);
    const Eigen::Vector2d k3 = rhs(x + 0.5 * dt * k2);
    const Eigen::Vector2d k4 = rhs(x + dt * k3);
    return (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };
  std::vector<Eigen::Vector2d> out;
  out.reserve(grid.size());
  Eigen::Vector2d x = x0;
  double t = 0.0;
  out.push_back(x);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double span = grid[g] - t;
    const auto steps = static_cast<std::size_t>(std::floor(span / h_fine + 1e-9));
    for (std::size_t i = 0; i < steps; ++i) x = rk4(x, h_fine);
    const double rest = span - static_cast<double>(steps) * h_fine;
    if (rest > 1e-12 * std::max(1.0, grid[g])) x = rk4(x, rest);
    t = grid[g];
    out.push_back(x);
  }
  return out;
}

void run_parallel(std::size_t jobs, const std::function<void(std::size_t)>& body) {
  const int workers = std::min<int>(sweep_worker_count(), static_cast<int>(jobs));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

Benchmark benchmark_1d(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("benchmark_1d: sign must be +-1");
  Benchmark b;
  b.name = sign > 0 ? "1d-unstable" : "1d-stable";
  b.sign = sign;
  b.d0 = 1.0;
  b.radius = 1.0;
  if (sign < 0) b.mu0 = 1.0;
  // x/(1+x^2) = sum (-1)^n x^{2n+1}
  b.field = std::make_shared<MaclaurinField>(MaclaurinField::series(
      1, [sign](int k) -> std::vector<std::pair<MultiIndex, Eigen::VectorXd>> {
        if (k % 2 == 0) return {};
        const int n = (k - 1) / 2;
        Eigen::VectorXd c(1);
        c[0] = (n % 2 == 0 ? 1.0 : -1.0) * sign;
        return {{MultiIndex{k}, c}};
      }));
  if (sign > 0) {
    b.horizon = [](const Eigen::VectorXd& x0) {
      const double a = x0.cwiseAbs().maxCoeff();
      return std::max((kE - 1.0) / (2.0 * kE - 1.0) * (std::log(1.0 / a) - 1.0), 0.1);
    };
  } else {
    b.horizon = [](const Eigen::VectorXd&) { return 10.0; };
  }
  b.oracle = [sign](double x0, double t) { return oracle_1d(sign, x0, t); };
  // Entry (k, l), 1-based: sign * k * cos((l-k) pi / 2).
  b.analytic_section = [sign](int order) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k <= order; ++k)
      for (int l = k; l <= order; l += 2) {
        const int half = (l - k) / 2;
        m(k - 1, l - 1) = sign * k * (half % 2 == 0 ? 1.0 : -1.0);
      }
    return m;
  };
  return b;
}

double vdp_d0(double mu, double radius) {
  return std::max((2.0 + mu) * radius, mu * radius * radius * radius);
}

Benchmark benchmark_vdp(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("benchmark_vdp: mu must be > 0");
  Benchmark b;
  b.name = "vdp";
  b.radius = 1.0;
  b.d0 = vdp_d0(mu, b.radius);
  b.field = std::make_shared<MaclaurinField>(MaclaurinField::polynomial(
      2, {{MultiIndex{1, 0}, Eigen::Vector2d(0.0, -1.0)},
          {MultiIndex{0, 1}, Eigen::Vector2d(1.0, mu)},
          {MultiIndex{2, 1}, Eigen::Vector2d(0.0, -mu)}}));
  b.horizon = [](const Eigen::VectorXd&) { return 0.1; };
  return b;
}

Eigen::MatrixXd section_matrix(const Benchmark& bench, int order) {
  if (bench.analytic_section) return bench.analytic_section(order);
  return FiniteSection(bench.field, order).matrix();
}

Trajectory benchmark_reference(const Benchmark& bench, const Eigen::VectorXd& x0,
                               double t_final, double h_record) {
  Trajectory out;
  out.compare_dim = bench.field->dim();
  if (bench.oracle) {
    const double a = x0[0];
    out.kind = Trajectory::Kind::oracle;
    for (double t : uniform_grid(t_final, h_record)) {
      out.times.push_back(t);
      Eigen::VectorXd s(1);
      s[0] = bench.oracle(a, t);
      out.states.push_back(std::move(s));
    }
    return out;
  }
  const int every = std::max(1, static_cast<int>(std::llround(h_record / bench.reference_step)));
  return integrate_nonlinear(*bench.field, x0, 0.0, t_final, bench.reference_step, {}, every);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(a);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

int sweep_worker_count() {
  if (const char* env = std::getenv("CARLEMAN_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Propagate z through the constant-matrix RK4 map over the grid, comparing
// the first block against reference states as it goes. Returns the sup of
// the pointwise errors (+inf once the state hits the blow-up guard), or
// fills `pointwise` when provided.
double propagate_and_compare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& phi_full,
                             double h, Eigen::VectorXd z,
                             const std::vector<double>& grid,
                             const std::vector<Eigen::VectorXd>& reference, int d,
                             std::vector<double>* pointwise = nullptr) {
  auto error_at = [&](std::size_t g, const Eigen::VectorXd& state) {
    return (state.head(d) - reference[g].head(d)).cwiseAbs().maxCoeff();
  };
  double sup = error_at(0, z);
  if (pointwise) pointwise->push_back(sup);
  Eigen::VectorXd scratch(z.size());
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double dt = grid[g] - grid[g - 1];
    if (std::abs(dt - h) <= 1e-12 * std::max(1.0, h)) {
      scratch.noalias() = phi_full * z;
      z.swap(scratch);
    } else {
      // staged step for the shortened final interval
      const Eigen::VectorXd k1 = a * z;
      const Eigen::VectorXd k2 = a * (z + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = a * (z + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = a * (z + dt * k3);
      z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!z.allFinite() || z.cwiseAbs().maxCoeff() > kBlowupGuard) {
      sup = std::numeric_limits<double>::infinity();
      if (pointwise)
        pointwise->resize(grid.size(), std::numeric_limits<double>::infinity());
      break;
    }
    const double e = error_at(g, z);
    sup = std::max(sup, e);
    if (pointwise) pointwise->push_back(e);
  }
  return sup;
}

}  // namespace

SweepGrid sweep_x0_N(const Benchmark& bench, const std::vector<double>& x0_axis,
                     const std::vector<int>& N_axis, std::optional<double> fixed_horizon,
                     double h) {
  if (x0_axis.empty() || N_axis.empty())
    throw std::invalid_argument("sweep_x0_N: axes must be non-empty");
  if (bench.field->dim() != 1)
    throw std::invalid_argument("sweep_x0_N: scalar benchmarks only");

  SweepGrid grid;
  grid.corner = "N\\x0";
  grid.xs = x0_axis;
  grid.ys.assign(N_axis.begin(), N_axis.end());
  grid.values.resize(static_cast<Eigen::Index>(N_axis.size()),
                     static_cast<Eigen::Index>(x0_axis.size()));
  grid.metadata.emplace_back("benchmark", bench.name);
  grid.metadata.emplace_back(
      "horizon", fixed_horizon ? "fixed:" + std::to_string(*fixed_horizon) : "default-rule");
  grid.metadata.emplace_back("h", std::to_string(h));

  // Per-column horizon, grid, and reference states (shared across rows).
  const std::size_t n_cols = x0_axis.size();
  std::vector<std::vector<double>> grids(n_cols);
  std::vector<std::vector<Eigen::VectorXd>> refs(n_cols);
  run_parallel(n_cols, [&](std::size_t j) {
    Eigen::VectorXd x0(1);
    x0[0] = x0_axis[j];
    const double T = fixed_horizon ? *fixed_horizon : bench.horizon(x0);
    grids[j] = uniform_grid(T, h);
    auto ref = benchmark_reference(bench, x0, T, h);
    refs[j] = std::move(ref.states);
  });

  // Rows are independent jobs; each builds its section and propagator once.
  run_parallel(N_axis.size(), [&](std::size_t i) {
    const Eigen::MatrixXd a = section_matrix(bench, N_axis[i]);
    const Eigen::MatrixXd phi = rk4_propagator(a, h);
    for (std::size_t j = 0; j < n_cols; ++j) {
      Eigen::VectorXd x0(1);
      x0[0] = x0_axis[j];
      const Eigen::VectorXd z0 = lift_initial(x0, N_axis[i]).values;
      const double sup =
          propagate_and_compare(a, phi, h, z0, grids[j], refs[j], 1);
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          clipped_log(sup);
    }
  });
  return grid;
}

SweepGrid sweep_x0_v0(const Benchmark& bench, const std::vector<double>& x0_axis,
                      const std::vector<double>& v0_axis, int order, double t_star,
                      double h) {
  if (x0_axis.empty() || v0_axis.empty())
    throw std::invalid_argument("sweep_x0_v0: axes must be non-empty");
  if (bench.field->dim() != 2)
    throw std::invalid_argument("sweep_x0_v0: two-dimensional benchmarks only");

  SweepGrid grid;
  grid.corner = "v0\\x0";
  grid.xs = x0_axis;
  grid.ys = v0_axis;
  grid.values.resize(static_cast<Eigen::Index>(v0_axis.size()),
                     static_cast<Eigen::Index>(x0_axis.size()));
  grid.metadata.emplace_back("benchmark", bench.name);
  grid.metadata.emplace_back("order", std::to_string(order));
  grid.metadata.emplace_back("t_star", std::to_string(t_star));
  grid.metadata.emplace_back("h", std::to_string(h));

  const Eigen::MatrixXd a = FiniteSection(bench.field, order).matrix();
  const Eigen::MatrixXd phi = rk4_propagator(a, h);
  const auto times = uniform_grid(t_star, h);

  // The Van der Pol reference runs through a fixed-size integrator; other
  // two-dimensional fields take the generic path.
  const bool fast_vdp = bench.name == "vdp";
  const auto& terms = bench.field->terms();
  const auto it = terms.find(MultiIndex{2, 1});
  const double mu = it == terms.end() ? 0.0 : -it->second.constant_value()[1];

  const std::size_t jobs = x0_axis.size() * v0_axis.size();
  run_parallel(jobs, [&](std::size_t cell) {
    const std::size_t i = cell / x0_axis.size();  // v0 row
    const std::size_t j = cell % x0_axis.size();  // x0 column
    const Eigen::Vector2d x0(x0_axis[j], v0_axis[i]);
    std::vector<Eigen::VectorXd> ref;
    if (fast_vdp) {
      const auto ref2 = vdp_reference_states(mu, x0, times, bench.reference_step);
      ref.reserve(ref2.size());
      for (const auto& s : ref2) ref.push_back(s);
    } else {
      ref = benchmark_reference(bench, x0, t_star, h).states;
    }
    const Eigen::VectorXd z0 = lift_initial(x0, order).values;
    const double sup = propagate_and_compare(a, phi, h, z0, times, ref, 2);
    grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        clipped_log(sup);
  });
  return grid;
}

SweepGrid sweep_time(const Benchmark& bench, double x0, const std::vector<int>& N_axis,
                     double t_final, double h, int record_every) {
  if (N_axis.empty()) throw std::invalid_argument("sweep_time: N axis must be non-empty");
  if (bench.field->dim() != 1)
    throw std::invalid_argument("sweep_time: scalar benchmarks only");
  if (record_every < 1) throw std::invalid_argument("sweep_time: record_every must be >= 1");

  const auto fine = uniform_grid(t_final, h);
  std::vector<double> recorded;
  for (std::size_t g = 0; g < fine.size(); ++g)
    if (g % static_cast<std::size_t>(record_every) == 0 || g + 1 == fine.size())
      recorded.push_back(fine[g]);

  SweepGrid grid;
  grid.corner = "N\\t";
  grid.xs = recorded;
  grid.ys.assign(N_axis.begin(), N_axis.end());
  grid.values.resize(static_cast<Eigen::Index>(N_axis.size()),
                     static_cast<Eigen::Index>(recorded.size()));
  grid.metadata.emplace_back("benchmark", bench.name);
  grid.metadata.emplace_back("x0", std::to_string(x0));
  grid.metadata.emplace_back("h", std::to_string(h));

  Eigen::VectorXd x0v(1);
  x0v[0] = x0;
  const auto ref = benchmark_reference(bench, x0v, t_final, h);

  run_parallel(N_axis.size(), [&](std::size_t i) {
    const Eigen::MatrixXd a = section_matrix(bench, N_axis[i]);
    const Eigen::MatrixXd phi = rk4_propagator(a, h);
    const Eigen::VectorXd z0 = lift_initial(x0v, N_axis[i]).values;
    std::vector<double> pointwise;
    pointwise.reserve(fine.size());
    propagate_and_compare(a, phi, h, z0, fine, ref.states, 1, &pointwise);
    Eigen::Index col = 0;
    for (std::size_t g = 0; g < fine.size(); ++g)
      if (g % static_cast<std::size_t>(record_every) == 0 || g + 1 == fine.size())
        grid.values(static_cast<Eigen::Index>(i), col++) = clipped_log(pointwise[g]);
  });
  return grid;
}

double convergence_threshold(const SweepGrid& grid, double row_value,
                             double clipped_threshold) {
  Eigen::Index row = -1;
  for (std::size_t i = 0; i < grid.ys.size(); ++i)
    if (grid.ys[i] == row_value) row = static_cast<Eigen::Index>(i);
  if (row < 0) throw std::invalid_argument("convergence_threshold: row value not on the axis");
  double best = 0.0;
  for (std::size_t j = 0; j < grid.xs.size(); ++j) {
    if (grid.values(row, static_cast<Eigen::Index>(j)) >= clipped_threshold) break;
    best = grid.xs[j];
  }
  return best;
}

}  // namespace carleman
