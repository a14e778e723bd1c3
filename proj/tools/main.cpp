// carleman: lift polynomial/analytic ODE systems into their truncated linear
// form, evaluate the convergence bounds, integrate, and reproduce the
// benchmark error landscapes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "carleman/bench.hpp"
#include "carleman/bounds.hpp"
#include "carleman/field.hpp"
#include "carleman/lifting.hpp"
#include "carleman/sim.hpp"
#include "carleman/spec_parser.hpp"

namespace {

using namespace carleman;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;

/// Raised when a requested computation is blocked by a theorem hypothesis;
/// the message names the violated condition.
struct PreconditionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void atomic_write_text(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << payload;
    if (!out.flush()) throw IoError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename into place: " + path);
  }
}

struct SystemChoice {
  std::string spec_path;
  std::string bench_name;
  double mu = 0.5;

  bool is_bench() const { return !bench_name.empty(); }

  Benchmark bench() const {
    if (bench_name == "1d-stable") return benchmark_1d(-1);
    if (bench_name == "1d-unstable") return benchmark_1d(+1);
    if (bench_name == "vdp") return benchmark_vdp(mu);
    throw CLI::ValidationError("--bench", "unknown benchmark: " + bench_name);
  }

  /// The field plus t0, from whichever source was given.
  std::pair<std::shared_ptr<const MaclaurinField>, double> field() const {
    if (is_bench()) return {bench().field, 0.0};
    auto parsed = parse_field_file(spec_path);
    return {std::make_shared<MaclaurinField>(std::move(parsed.field)), parsed.t0};
  }
};

void add_system_options(CLI::App* cmd, SystemChoice& sys, bool bench_only = false) {
  auto* bench = cmd->add_option("--bench", sys.bench_name,
                                "built-in benchmark: 1d-stable, 1d-unstable, vdp")
                    ->check(CLI::IsMember({"1d-stable", "1d-unstable", "vdp"}));
  cmd->add_option("--mu", sys.mu, "Van der Pol nonlinearity parameter")
      ->capture_default_str();
  if (bench_only) {
    bench->required();
    return;
  }
  auto* spec = cmd->add_option("--spec", sys.spec_path, "system spec file")
                   ->check(CLI::ExistingFile);
  spec->excludes(bench);
  cmd->callback([&sys, spec, bench]() {
    if (spec->count() == 0 && bench->count() == 0)
      throw CLI::RequiredError("--spec or --bench");
  });
}

Eigen::VectorXd parse_vector(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    vals.push_back(std::stod(tok, &used));
    if (used != tok.size()) throw CLI::ValidationError("--x0", "not a number: " + tok);
  }
  if (vals.empty()) throw CLI::ValidationError("--x0", "empty vector");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- lift ----

int run_lift(const SystemChoice& sys, int order, double time, const std::string& out_path) {
  std::ostringstream os;
  if (sys.is_bench() && sys.bench().analytic_section) {
    // scalar benchmarks: closed-form pattern, one block per degree
    const Benchmark b = sys.bench();
    const Eigen::MatrixXd m = b.analytic_section(order);
    for (int k = 1; k <= order; ++k) {
      if (k > 1) os << ',';
      os << "k=" << k << ':' << k - 1 << ".." << k - 1;
    }
    os << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) os << ',';
        os << fmt17(m(i, j));
      }
      os << '\n';
    }
  } else {
    auto [field, t0] = sys.field();
    (void)t0;
    FiniteSection section(field, order);
    section.dump_csv(os, time);
  }
  if (out_path.empty())
    std::cout << os.str();
  else
    atomic_write_text(out_path, os.str());
  return kExitOk;
}

// -------------------------------------------------------------- bounds ----

int run_bounds(const SystemChoice& sys, const std::string& x0_csv, double radius,
               int check_degree, const std::string& require) {
  const Eigen::VectorXd x0 = parse_vector(x0_csv);
  auto [field, t0] = sys.field();
  std::optional<int> degree;
  if (field->is_series()) degree = check_degree;
  const BoundReport report = make_bound_report(*field, x0, radius, t0, degree);
  std::cout << report.to_text();
  if (!require.empty()) {
    const std::string valid_key = require + ".valid";
    for (const auto& [k, v] : report.entries)
      if (k == valid_key && v != "true") {
        std::string why = "hypothesis of " + require + " not met";
        for (const auto& [k2, v2] : report.entries)
          if (k2 == require + ".violation") why = v2;
        throw PreconditionViolation(why);
      }
  }
  return kExitOk;
}

// ------------------------------------------------------------ simulate ----

int run_simulate(const SystemChoice& sys, const std::string& x0_csv, int order,
                 double t_final, double h, const std::string& prefix) {
  const Eigen::VectorXd x0 = parse_vector(x0_csv);
  auto [field, t0] = sys.field();

  FiniteSection section(field, order);
  const Trajectory lifted = integrate_section(section, x0, t0, t0 + t_final, h);

  Trajectory reference;
  if (sys.is_bench()) {
    const Benchmark b = sys.bench();
    reference = benchmark_reference(b, x0, t_final, h);
  } else {
    // fine fixed-step reference recorded on the coarse grid
    const int every = 100;
    reference = integrate_nonlinear(*field, x0, t0, t0 + t_final, h / every, {}, every);
  }

  Trajectory first_block = lifted;
  for (auto& s : first_block.states) s = s.head(field->dim()).eval();

  const ErrorSeries err = error_series(lifted, reference);
  std::ostringstream lifted_os, ref_os, err_os;
  write_trajectory_csv(first_block, lifted_os);
  write_trajectory_csv(reference, ref_os);
  err_os << "t,error,clipped_log10\n";
  for (std::size_t i = 0; i < err.times.size(); ++i)
    err_os << fmt17(err.times[i]) << ',' << fmt17(err.raw[i]) << ',' << fmt17(err.clipped[i])
           << '\n';
  atomic_write_text(prefix + "_lifted.csv", lifted_os.str());
  atomic_write_text(prefix + "_reference.csv", ref_os.str());
  atomic_write_text(prefix + "_error.csv", err_os.str());
  if (lifted.blew_up)
    std::cout << "note: lifted state hit the blow-up guard at t=" << lifted.times.back()
              << "; trajectory truncated\n";
  return kExitOk;
}

// --------------------------------------------------------------- sweep ----

struct SweepOptions {
  double x0_min = 0.01, x0_max = 1.0;
  int x0_count = 100;
  double v0_min = -6.0, v0_max = 6.0;
  int v0_count = 100;
  int n_min = 1, n_max = 100, n_step = 1;
  int order = 10;
  double t_star = 0.0;  // 0: benchmark default rule
  double h = 1e-3;
  std::string out_csv, out_svg;
};

int run_sweep(const SystemChoice& sys, const SweepOptions& opt) {
  const Benchmark b = sys.bench();
  SweepGrid grid;
  if (b.field->dim() == 1) {
    std::vector<int> n_axis;
    for (int n = opt.n_min; n <= opt.n_max; n += opt.n_step) n_axis.push_back(n);
    std::optional<double> fixed;
    if (opt.t_star > 0.0) fixed = opt.t_star;
    grid = sweep_x0_N(b, linspace(opt.x0_min, opt.x0_max, opt.x0_count), n_axis, fixed, opt.h);
  } else {
    const double t_star = opt.t_star > 0.0 ? opt.t_star : 0.1;
    grid = sweep_x0_v0(b, linspace(opt.x0_min, opt.x0_max, opt.x0_count),
                       linspace(opt.v0_min, opt.v0_max, opt.v0_count), opt.order, t_star,
                       opt.h);
  }
  emit_csv_file(grid, opt.out_csv);
  if (!opt.out_svg.empty()) emit_svg_heatmap_file(grid, opt.out_svg);
  return kExitOk;
}

// -------------------------------------------------------------- verify ----

int run_verify(const SystemChoice& sys, double radius, int k_max, int l_max,
               int check_degree, int assemble_order) {
  auto [field, t0] = sys.field();
  bool all_ok = true;
  auto line = [&all_ok](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << ' ' << name;
    if (!detail.empty()) std::cout << " (" << detail << ')';
    std::cout << '\n';
    all_ok = all_ok && ok;
  };

  std::optional<int> degree;
  if (field->is_series()) degree = check_degree;
  const auto cert = verify_assumption1(*field, radius, degree);
  line("assumption1", cert.valid,
       "d0=" + fmt17(cert.d0) + " radius=" + fmt17(radius) +
           " degree<=" + std::to_string(cert.checked_degree));

  const auto mu = check_assumption2(*field);
  if (mu.ok())
    std::cout << "INFO assumption2 holds (mu0=" << fmt17(mu.value()) << ")\n";
  else
    std::cout << "INFO assumption2 refused: " << mu.refusal() << '\n';
  std::cout << "INFO drift nu0=" << fmt17(drift_bound(*field)) << '\n';

  const double samples[] = {t0, t0 + 0.5};
  const auto norms = verify_block_norm_lemma(*field, cert.d0, radius, k_max, l_max, samples);
  line("block-norms", norms.all_within,
       "worst ratio " + fmt17(norms.worst_ratio) + " at k=" + std::to_string(norms.worst_k) +
           " l=" + std::to_string(norms.worst_l));

  FiniteSection section(field, assemble_order);
  const double dev = assembly_deviation(section, t0);
  line("assembly", dev == 0.0, "max deviation " + fmt17(dev));

  if (!all_ok) throw PreconditionViolation("verification failed");
  return kExitOk;
}

// --------------------------------------------------------------- bench ----

int run_bench_figure(int figure, const std::string& out_dir, bool coarse, double mu) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  auto path = [&out_dir](const std::string& name) { return out_dir + "/" + name; };

  const int ic_count = coarse ? 25 : 100;
  const int n_count = coarse ? 25 : 100;
  const double h = 1e-3;

  if (figure == 1) {
    std::vector<int> n_axis;
    for (int i = 1; i <= n_count; ++i) n_axis.push_back(coarse ? 4 * i : i);
    const auto x0_axis = linspace(1.0 / ic_count, 1.0, ic_count);
    for (int sign : {+1, -1}) {
      const Benchmark b = benchmark_1d(sign);
      const auto grid = sweep_x0_N(b, x0_axis, n_axis, std::nullopt, h);
      const std::string stem = std::string("fig1_") + (sign > 0 ? "unstable" : "stable");
      emit_csv_file(grid, path(stem + ".csv"));
      emit_svg_heatmap_file(grid, path(stem + ".svg"));
      std::cout << "wrote " << path(stem + ".csv") << '\n';
    }
    return kExitOk;
  }

  if (figure == 2) {
    const Benchmark b = benchmark_1d(+1);
    std::vector<int> n_axis;
    for (int i = 1; i <= n_count; ++i) n_axis.push_back(coarse ? 4 * i : i);
    const auto x0_axis = linspace(1.0 / ic_count, 1.0, ic_count);
    const double tstars[] = {0.01, 0.1, 1.0};
    const double literature_theoretical[] = {0.3582, 0.2841, 0.0401};
    const double literature_empirical[] = {0.8423, 0.6722, 0.2348};

    std::ostringstream report;
    report << "# x0 thresholds for the unstable scalar benchmark (d0 = R = 1)\n";
    report << "# theoretical:    inversion of the tstar horizon at each T*\n";
    report << "# boundary(c):    largest x0 whose clipped-log error at N=" << n_axis.back()
           << " stays below c\n";
    report << "T*,theoretical,literature_theoretical,boundary(-12),boundary(-9),"
              "boundary(-6),boundary(-4),literature_empirical\n";
    char buf[256];
    for (std::size_t i = 0; i < 3; ++i) {
      const auto grid = sweep_x0_N(b, x0_axis, n_axis, tstars[i], h);
      std::ostringstream stem;
      stem << "fig2_tstar_" << tstars[i];
      emit_csv_file(grid, path(stem.str() + ".csv"));
      emit_svg_heatmap_file(grid, path(stem.str() + ".svg"));
      std::cout << "wrote " << path(stem.str() + ".csv") << '\n';
      const double theo = tstar_inverse_x0(1.0, 1.0, tstars[i]);
      std::snprintf(buf, sizeof buf, "%g,%.5f,%.4f,%.3f,%.3f,%.3f,%.3f,%.4f\n", tstars[i],
                    theo, literature_theoretical[i],
                    convergence_threshold(grid, n_axis.back(), -12.0),
                    convergence_threshold(grid, n_axis.back(), -9.0),
                    convergence_threshold(grid, n_axis.back(), -6.0),
                    convergence_threshold(grid, n_axis.back(), -4.0),
                    literature_empirical[i]);
      report << buf;
    }
    report << "# the theoretical inversion matches the literature value at T*=0.1;\n";
    report << "# the literature entries at T*=0.01 and 1.0 differ from the values\n";
    report << "# computed here (0.35850 and 0.02782).\n";
    report << "# the literature empirical boundaries track the clipped-log ~ -6\n";
    report << "# contour of the error landscape rather than a -12 or -15 cut.\n";
    atomic_write_text(path("fig2_thresholds.txt"), report.str());
    std::cout << "wrote " << path("fig2_thresholds.txt") << '\n';

    for (double x0 : {0.3, 0.5}) {
      const auto grid = sweep_time(b, x0, n_axis, 1.0, h, 10);
      std::ostringstream stem;
      stem << "fig2_x0_" << x0;
      emit_csv_file(grid, path(stem.str() + ".csv"));
      emit_svg_heatmap_file(grid, path(stem.str() + ".svg"));
      std::cout << "wrote " << path(stem.str() + ".csv") << '\n';
    }
    return kExitOk;
  }

  if (figure == 3) {
    const Benchmark b = benchmark_vdp(mu);
    const auto axis = linspace(-6.0, 6.0, ic_count);
    for (int order : {1, 10, 20}) {
      const auto grid = sweep_x0_v0(b, axis, axis, order, 0.1, h);
      const std::string stem = "fig3_n" + std::to_string(order);
      emit_csv_file(grid, path(stem + ".csv"));
      emit_svg_heatmap_file(grid, path(stem + ".svg"));
      std::cout << "wrote " << path(stem + ".csv") << '\n';
    }
    return kExitOk;
  }
  throw CLI::ValidationError("--figure", "must be 1, 2, or 3");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carleman linearization toolkit: finite sections, certified error "
               "bounds, integration, and benchmark sweeps"};
  app.require_subcommand(1);

  // lift
  SystemChoice lift_sys;
  int lift_order = 5;
  double lift_time = 0.0;
  std::string lift_out;
  auto* lift = app.add_subcommand("lift", "assemble the order-N section matrix");
  add_system_options(lift, lift_sys);
  lift->add_option("--order", lift_order, "truncation order N")->required();
  lift->add_option("--time", lift_time, "evaluation time for time-varying fields")
      ->capture_default_str();
  lift->add_option("--out", lift_out, "output CSV path (stdout when omitted)");

  // bounds
  SystemChoice bounds_sys;
  std::string bounds_x0, bounds_require;
  double bounds_radius = 1.0;
  int bounds_degree = 50;
  auto* bounds = app.add_subcommand("bounds", "report every applicable error bound");
  add_system_options(bounds, bounds_sys);
  bounds->add_option("--x0", bounds_x0, "initial state, comma-separated")->required();
  bounds->add_option("--radius", bounds_radius, "convergence radius R")->capture_default_str();
  bounds->add_option("--check-degree", bounds_degree,
                     "degree cutoff for series coefficient checks")
      ->capture_default_str();
  bounds->add_option("--require", bounds_require,
                     "exit 2 unless this bound applies (thm31|thm34|thm36|cor33)")
      ->check(CLI::IsMember({"thm31", "thm34", "thm36", "cor33"}));

  // simulate
  SystemChoice sim_sys;
  std::string sim_x0, sim_prefix;
  int sim_order = 10;
  double sim_tfinal = 1.0, sim_h = 1e-3;
  auto* sim = app.add_subcommand("simulate",
                                 "integrate the section and the nonlinear reference");
  add_system_options(sim, sim_sys);
  sim->add_option("--x0", sim_x0, "initial state, comma-separated")->required();
  sim->add_option("--order", sim_order, "truncation order N")->required();
  sim->add_option("--t-final", sim_tfinal, "integration horizon")->required();
  sim->add_option("--step", sim_h, "integrator step size")->capture_default_str();
  sim->add_option("--out-prefix", sim_prefix,
                  "output prefix; writes <prefix>_lifted.csv, _reference.csv, _error.csv")
      ->required();

  // sweep
  SystemChoice sweep_sys;
  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "error landscape over a grid of initials");
  add_system_options(sweep, sweep_sys, /*bench_only=*/true);
  sweep->add_option("--x0-min", sweep_opt.x0_min)->capture_default_str();
  sweep->add_option("--x0-max", sweep_opt.x0_max)->capture_default_str();
  sweep->add_option("--x0-count", sweep_opt.x0_count)->capture_default_str();
  sweep->add_option("--v0-min", sweep_opt.v0_min)->capture_default_str();
  sweep->add_option("--v0-max", sweep_opt.v0_max)->capture_default_str();
  sweep->add_option("--v0-count", sweep_opt.v0_count)->capture_default_str();
  sweep->add_option("--n-min", sweep_opt.n_min)->capture_default_str();
  sweep->add_option("--n-max", sweep_opt.n_max)->capture_default_str();
  sweep->add_option("--n-step", sweep_opt.n_step)->capture_default_str();
  sweep->add_option("--order", sweep_opt.order, "truncation order (2-d benchmarks)")
      ->capture_default_str();
  sweep->add_option("--t-star", sweep_opt.t_star,
                    "fixed horizon; 0 selects the benchmark's default rule")
      ->capture_default_str();
  sweep->add_option("--step", sweep_opt.h)->capture_default_str();
  sweep->add_option("--out-csv", sweep_opt.out_csv)->required();
  sweep->add_option("--out-svg", sweep_opt.out_svg);

  // verify
  SystemChoice verify_sys;
  double verify_radius = 1.0;
  int verify_kmax = 12, verify_lmax = 12, verify_degree = 50, verify_order = 8;
  auto* verify = app.add_subcommand("verify", "run assumption certificates and "
                                              "structural checks; nonzero exit on failure");
  add_system_options(verify, verify_sys);
  verify->add_option("--radius", verify_radius)->capture_default_str();
  verify->add_option("--kmax", verify_kmax)->capture_default_str();
  verify->add_option("--lmax", verify_lmax)->capture_default_str();
  verify->add_option("--check-degree", verify_degree)->capture_default_str();
  verify->add_option("--assemble-order", verify_order)->capture_default_str();

  // bench
  int bench_figure = 1;
  std::string bench_out;
  bool bench_coarse = false;
  double bench_mu = 0.5;
  auto* bench = app.add_subcommand("bench", "reproduce a benchmark figure's data");
  bench->add_option("--figure", bench_figure, "figure number: 1, 2, or 3")->required();
  bench->add_option("--out-dir", bench_out)->required();
  bench->add_flag("--coarse", bench_coarse, "25x25 grids instead of 100x100");
  bench->add_option("--mu", bench_mu, "Van der Pol nonlinearity parameter")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*lift) return run_lift(lift_sys, lift_order, lift_time, lift_out);
    if (*bounds)
      return run_bounds(bounds_sys, bounds_x0, bounds_radius, bounds_degree, bounds_require);
    if (*sim) return run_simulate(sim_sys, sim_x0, sim_order, sim_tfinal, sim_h, sim_prefix);
    if (*sweep) return run_sweep(sweep_sys, sweep_opt);
    if (*verify)
      return run_verify(verify_sys, verify_radius, verify_kmax, verify_lmax, verify_degree,
                        verify_order);
    if (*bench) return run_bench_figure(bench_figure, bench_out, bench_coarse, bench_mu);
  } catch (const PreconditionViolation& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}
