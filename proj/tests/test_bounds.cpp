#include <doctest.h>

#include <cmath>
#include <random>

#include "carleman/bounds.hpp"
#include "carleman/spec_parser.hpp"
#include "test_helpers.hpp"

using namespace carleman;

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

BoundInputs inputs(double d0, double radius, double x0_inf, double x0_two,
                   std::optional<double> mu0 = {}, double nu0 = 0.0) {
  BoundInputs in;
  in.d0 = d0;
  in.radius = radius;
  in.x0_inf = x0_inf;
  in.x0_two = x0_two;
  in.mu0 = mu0;
  in.nu0 = nu0;
  in.validate();
  return in;
}

}  // namespace

TEST_CASE("tstar") {
  const auto at_boundary = tstar(inputs(1.0, 1.0, 1.0 / kE, 1.0 / kE));
  REQUIRE(at_boundary.valid);
  CHECK(at_boundary.value == doctest::Approx(0.0).epsilon(1e-14));

  const auto t = tstar(inputs(1.0, 1.0, 0.1, 0.1));
  REQUIRE(t.valid);
  CHECK(t.value == doctest::Approx(0.504491419124165).epsilon(1e-12));

  CHECK(!tstar(inputs(1.0, 1.0, 0.0, 0.0)).valid);
  const auto too_big = tstar(inputs(1.0, 1.0, 0.5, 0.5));
  REQUIRE(!too_big.valid);
  CHECK(too_big.violation.find("eq. 3.1") != std::string::npos);
}

TEST_CASE("tstar inversion") {
  const double x01 = tstar_inverse_x0(1.0, 1.0, 0.1);
  CHECK(x01 == doctest::Approx(0.284165725452995).epsilon(1e-12));
  // round-trip through the horizon
  const auto t = tstar(inputs(1.0, 1.0, x01, x01));
  REQUIRE(t.valid);
  CHECK(t.value == doctest::Approx(0.1).epsilon(1e-12));

  CHECK(tstar_inverse_x0(1.0, 1.0, 0.01) == doctest::Approx(0.358502456405162).epsilon(1e-12));
  CHECK(tstar_inverse_x0(1.0, 1.0, 1.0) == doctest::Approx(0.0278206505954865).epsilon(1e-12));
}

TEST_CASE("m0") {
  const auto boundary = m0(inputs(1.0, 1.0, 1.0 / kE, 1.0 / kE));
  REQUIRE(boundary.valid);
  CHECK(boundary.value == doctest::Approx(1.0 / kE).epsilon(1e-14));

  const auto m = m0(inputs(1.0, 1.0, 0.1, 0.1));
  REQUIRE(m.valid);
  CHECK(m.value == doctest::Approx(0.222130236299452).epsilon(1e-12));

  // M0 < R/e for any admissible x0
  std::uniform_real_distribution<double> u(0.001, 0.999);
  auto& gen = testhelpers::rng();
  for (int i = 0; i < 200; ++i) {
    const double radius = 0.5 + 2.0 * u(gen);
    const double x0 = u(gen) * radius / kE;
    const auto v = m0(inputs(1.0, radius, x0, x0));
    REQUIRE(v.valid);
    CHECK(v.value < radius / kE);
  }
}

TEST_CASE("thm31 envelope: boundary identity and contraction") {
  const auto in = inputs(1.0, 1.0, 0.2, 0.2);
  const double T = tstar(in).value;
  const double M = m0(in).value;
  const double prefactor = in.radius * M / (std::sqrt(2.0 * M_PI) * (in.radius - M));
  for (int N : {1, 2, 5, 17, 60, 200}) {
    const auto env = thm31_envelope(in, N, T);
    REQUIRE(env.valid);
    // at t = t0 + T* the exponential factors cancel by construction
    CHECK(env.value ==
          doctest::Approx(prefactor * std::pow(N, -1.5)).epsilon(1e-12));
  }
  for (double t : {0.0, 0.3 * T, 0.9 * T}) {
    for (int N = 1; N < 200; ++N) {
      const double a = thm31_envelope(in, N, t).value;
      const double b = thm31_envelope(in, N + 1, t).value;
      CHECK(b < a);
    }
  }
  CHECK(!thm31_envelope(in, 3, T * 1.01).valid);
  CHECK(!thm31_envelope(in, 3, -0.1).valid);
  CHECK(thm31_envelope(in, 10, 0.1).value < thm31_envelope(in, 5, 0.1).value);
}

TEST_CASE("cor32 envelope") {
  const auto in = inputs(1.0, 1.0, 0.1, 0.1);
  const auto r = cor32_envelope(in, 0.2, 1e18, 3, 0.0);
  CHECK(r.horizon == doctest::Approx(0.609437912434100).epsilon(1e-12));
  REQUIRE(r.bound.valid);
  // at t = t0 the base of the N-th power is Me/R < 1
  const double base = 0.2 * kE;
  const double prefactor = 0.2 / (std::sqrt(2.0 * M_PI) * 0.8);
  CHECK(r.bound.value ==
        doctest::Approx(prefactor * std::pow(3.0, -1.5) * std::pow(base, 3)).epsilon(1e-12));

  const auto capped = cor32_envelope(in, 0.2, 0.25, 1, 0.2);
  CHECK(capped.horizon == doctest::Approx(0.25));

  const auto bad = cor32_envelope(in, 0.5, 1.0, 1, 0.0);
  CHECK(!bad.bound.valid);
  CHECK(bad.bound.violation.find("cor. 3.2") != std::string::npos);
}

TEST_CASE("cor33 horizon") {
  const auto cubic = parse_field("dimension = 1\nterm = [3] [-1]\n").field;
  Eigen::VectorXd one(1);
  one << 1.0;
  const auto r = cor33_horizon(cubic, one);
  REQUIRE(r.ok());
  CHECK(r.value().closed_form);
  CHECK(r.value().horizon == doctest::Approx(0.00964126985255248).epsilon(1e-12));
  CHECK(r.value().maximizing_radius == doctest::Approx(std::pow(kE, 1.5)).epsilon(1e-12));

  // halving x0 quadruples the horizon (degree 3 scales as x0^{-2})
  Eigen::VectorXd half(1);
  half << 0.5;
  const auto r_half = cor33_horizon(cubic, half);
  REQUIRE(r_half.ok());
  CHECK(r_half.value().horizon == doctest::Approx(4.0 * r.value().horizon).epsilon(1e-12));

  // numeric maximization agrees with the closed form in its regime
  const auto numeric = cor33_horizon_numeric(cubic, one);
  REQUIRE(numeric.ok());
  CHECK(!numeric.value().closed_form);
  CHECK(numeric.value().horizon ==
        doctest::Approx(r.value().horizon).epsilon(1e-8));
  CHECK(numeric.value().maximizing_radius ==
        doctest::Approx(r.value().maximizing_radius).epsilon(1e-6));

  // below the pivot the numeric route is selected automatically
  const auto mixed = parse_field("dimension = 1\nterm = [1] [1]\nterm = [3] [-1]\n").field;
  Eigen::VectorXd small(1);
  small << 0.2;
  const auto r_mixed = cor33_horizon(mixed, small);
  REQUIRE(r_mixed.ok());
  CHECK(!r_mixed.value().closed_form);
  // the reported maximizer beats its neighborhood
  const auto a = ak_sums(mixed);
  auto objective = [&](double R) {
    double d0 = 0.0, rk = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      rk *= R;
      d0 = std::max(d0, rk * a[i]);
    }
    return (kE - 1.0) * R / ((2.0 * kE - 1.0) * d0) * std::log(R / (kE * 0.2));
  };
  const double best = r_mixed.value().horizon;
  CHECK(best == doctest::Approx(objective(r_mixed.value().maximizing_radius)).epsilon(1e-12));
  for (double f : {0.9, 0.99, 1.01, 1.1})
    CHECK(objective(f * r_mixed.value().maximizing_radius) <= best * (1.0 + 1e-9));

  const auto linear = parse_field("dimension = 1\nterm = [1] [-1]\n").field;
  CHECK(!cor33_horizon(linear, one).ok());
  CHECK(!cor33_horizon(cubic, Eigen::VectorXd::Zero(1)).ok());
}

TEST_CASE("thm34 envelope") {
  const auto in = inputs(1.0, 1.0, 0.4, 0.4, 1.0);
  const auto v = thm34_envelope(in, 5);
  REQUIRE(v.valid);
  CHECK(v.value == doctest::Approx(0.131072).epsilon(1e-14));

  // base is 2||x0||_2 for d0 = R = mu0 = 1
  const auto v1 = thm34_envelope(in, 1);
  CHECK(v1.value == doctest::Approx(0.4 * 0.8).epsilon(1e-14));

  const auto at_threshold = thm34_envelope(inputs(1.0, 1.0, 0.5, 0.5, 1.0), 5);
  REQUIRE(!at_threshold.valid);
  CHECK(at_threshold.violation.find("eq. 3.5") != std::string::npos);
  CHECK(at_threshold.violation.find("0.5") != std::string::npos);

  CHECK(!thm34_envelope(inputs(1.0, 1.0, 0.4, 0.4), 5).valid);  // no mu0
}

TEST_CASE("thm36 parameters") {
  const auto zero_drift = thm36_params(inputs(1.0, 1.0, 0.1, 0.1, 1.0, 0.0));
  REQUIRE(zero_drift.ok());
  CHECK(zero_drift.value().eps0 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(zero_drift.value().eps1 == 0.0);

  const auto p = thm36_params(inputs(1.0, 1.0, 0.1, 0.1, 1.0, 0.1));
  REQUIRE(p.ok());
  CHECK(p.value().eta0 == doctest::Approx(0.1));
  CHECK(p.value().eta1 == doctest::Approx(1.0));
  CHECK(p.value().eps0 == doctest::Approx(0.435078105935821).epsilon(1e-12));
  CHECK(p.value().eps1 == doctest::Approx(0.114921894064179).epsilon(1e-12));

  const auto refused = thm36_params(inputs(1.0, 1.0, 0.1, 0.1, 1.0, 0.2));
  REQUIRE(!refused.ok());
  CHECK(refused.refusal().find("eq. 3.16") != std::string::npos);

  // eps0, eps1 solve (1+eta1) s^2 - (eta0+eta1) s + eta0 = 0; eps1 < eps0 <= eta1/(1+eta1)
  auto& gen = testhelpers::rng();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double d0 = 0.5 + 2.0 * u(gen);
    const double radius = 0.5 + 1.5 * u(gen);
    const double mu0 = (0.1 + 0.9 * u(gen)) * d0 / radius;  // keeps eta1 <= 1
    const double eta1 = radius * mu0 / d0;
    const double gate = 2.0 + eta1 - 2.0 * std::sqrt(1.0 + eta1);
    const double nu0 = u(gen) * gate * d0;
    const auto params = thm36_params(inputs(d0, radius, 0.01, 0.01, mu0, nu0));
    REQUIRE(params.ok());
    const auto& q = params.value();
    for (double s : {q.eps0, q.eps1}) {
      const double residual = (1.0 + q.eta1) * s * s - (q.eta0 + q.eta1) * s + q.eta0;
      CHECK(std::abs(residual) <= 1e-12);
    }
    CHECK(q.eps1 < q.eps0);
    CHECK(q.eps0 <= q.eta1 / (1.0 + q.eta1) + 1e-12);
  }
}

TEST_CASE("thm36 envelope") {
  const auto in = inputs(1.0, 1.0, 0.2, 0.2, 1.0, 0.1);
  const auto p = thm36_params(in);
  REQUIRE(p.ok());
  const auto v = thm36_envelope(in, p.value(), 3);
  REQUIRE(v.valid);
  CHECK(v.value == doctest::Approx(0.0149622572596393).epsilon(1e-10));

  // base of the N-th power < 1 whenever eq. 3.17 admits the initial state
  CHECK(std::max(in.x0_two, in.radius * p.value().eps1) / (in.radius * p.value().eps0) < 1.0);

  const auto too_far = inputs(1.0, 1.0, 0.44, 0.44, 1.0, 0.1);
  const auto bad = thm36_envelope(too_far, p.value(), 3);
  REQUIRE(!bad.valid);
  CHECK(bad.violation.find("eq. 3.17") != std::string::npos);
}

TEST_CASE("thm36 reduces to thm34 at zero drift") {
  auto& gen = testhelpers::rng();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double d0 = 0.5 + 2.5 * u(gen);
    const double radius = 0.5 + 1.5 * u(gen);
    const double mu0 = (0.1 + 0.9 * u(gen)) * d0 / radius;
    const double threshold = radius * radius * mu0 / (d0 + radius * mu0);
    const double x0 = (0.05 + 0.9 * u(gen)) * threshold;
    const auto in = inputs(d0, radius, x0, x0, mu0, 0.0);
    const auto p = thm36_params(in);
    REQUIRE(p.ok());
    for (int N : {1, 3, 9}) {
      const auto a = thm36_envelope(in, p.value(), N);
      const auto b = thm34_envelope(in, N);
      REQUIRE(a.valid);
      REQUIRE(b.valid);
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("decay envelope") {
  const auto in = inputs(1.0, 1.0, 0.4, 0.4, 1.0);
  const auto v = decay_envelope(in, 3.0);
  REQUIRE(v.valid);
  CHECK(v.value == doctest::Approx(0.147151776468577).epsilon(1e-12));
  CHECK(decay_envelope(in, 0.0).value == doctest::Approx(0.4));

  // the rate is positive exactly below the eq. 3.5 threshold
  for (double x0 : {0.1, 0.3, 0.45}) {
    const auto val = decay_envelope(inputs(1.0, 1.0, x0, x0, 1.0), 5.0);
    REQUIRE(val.valid);
    CHECK(val.value < x0);
  }
  CHECK(!decay_envelope(inputs(1.0, 1.0, 0.55, 0.55, 1.0), 5.0).valid);
}

TEST_CASE("state bound") {
  const auto in0 = inputs(1.0, 1.0, 0.2, 0.2, 1.0, 0.0);
  const auto p0 = thm36_params(in0);
  CHECK(state_bound(in0, p0.value()).value == doctest::Approx(0.2));

  const auto in1 = inputs(1.0, 1.0, 0.05, 0.05, 1.0, 0.1);
  const auto p1 = thm36_params(in1);
  CHECK(state_bound(in1, p1.value()).value ==
        doctest::Approx(0.114921894064179).epsilon(1e-12));
}

TEST_CASE("bound inputs validation") {
  CHECK_THROWS_AS(inputs(0.0, 1.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(inputs(1.0, -1.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(inputs(1.0, 1.0, 0.2, 0.1), std::invalid_argument);  // inf > two
  CHECK_THROWS_AS(inputs(1.0, 1.0, 0.1, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("bound report on a truncated stable scalar system") {
  const auto parsed = parse_field(
      "dimension = 1\nterm = [1] [-1]\nterm = [3] [1]\nterm = [5] [-1]\n"
      "term = [7] [1]\nterm = [9] [-1]\n");
  Eigen::VectorXd x0(1);
  x0 << 0.4;
  const auto report = make_bound_report(parsed.field, x0, 1.0);
  const std::string text = report.to_text();
  CHECK(text.find("thm34.base=0.8\n") != std::string::npos);
  CHECK(text.find("thm34.valid=true\n") != std::string::npos);
  CHECK(text.find("assumption2.mu0=1\n") != std::string::npos);
  CHECK(text.find("inputs.d0=1\n") != std::string::npos);
  CHECK(text.find("thm31.valid=false\n") != std::string::npos);  // 0.4 > 1/e
}
