#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "uv/monitors.hpp"
#include "uv/uv_solver.hpp"
#include "support.hpp"

using namespace kgeft;
using test::max_abs_diff;

namespace {

// Constant fields obey the ODE U'' = -U - UV, V'' = -M^2 V - U^2/2 (original form).
std::array<double, 4> ode_reference(std::array<double, 4> y, double M, double T) {
  auto rhs = [M](const std::array<double, 4>& s) {
    return std::array<double, 4>{s[1], -s[0] - s[0] * s[2], s[3], -M * M * s[2] - 0.5 * s[0] * s[0]};
  };
  const int steps = 200000;
  const double h = T / steps;
  for (int i = 0; i < steps; ++i) {
    auto k1 = rhs(y);
    std::array<double, 4> t;
    for (int j = 0; j < 4; ++j) t[j] = y[j] + 0.5 * h * k1[j];
    auto k2 = rhs(t);
    for (int j = 0; j < 4; ++j) t[j] = y[j] + 0.5 * h * k2[j];
    auto k3 = rhs(t);
    for (int j = 0; j < 4; ++j) t[j] = y[j] + h * k3[j];
    auto k4 = rhs(t);
    for (int j = 0; j < 4; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return y;
}

Field constant(const GridSpec& g, double v) {
  return Field::sample(g, [v](std::span<const double>) { return Complex(v); });
}

}  // namespace

TEST_CASE("constant fields follow the nonlinear ode in every formulation") {
  const GridSpec g{1, 16, 10.0};
  const double M = 3.0, T = 2.0;
  const std::array<double, 4> y0{0.4, 0.1, 0.05, -0.2};
  const auto ref = ode_reference(y0, M, T);
  const UVState orig{constant(g, y0[0]), constant(g, y0[1]), constant(g, y0[2]), constant(g, y0[3]), M, 0.0,
                     Formulation::original};
  for (Formulation f : {Formulation::original, Formulation::v_modified, Formulation::rescaled}) {
    // the printed v-modified equations drop the +U^2 heavy term the shift produces
    UVSolver solver(change_variables(orig, f), Nonlinearity{1.0, true, true});
    const int steps = 400;
    for (int i = 0; i < steps; ++i) solver.step(T / steps);
    const UVState back = change_variables(solver.state(), Formulation::original);
    CAPTURE(to_string(f));
    CHECK(back.U[0].real() == doctest::Approx(ref[0]).epsilon(1e-8));
    CHECK(back.Ut[0].real() == doctest::Approx(ref[1]).epsilon(1e-8));
    CHECK(back.V[0].real() == doctest::Approx(ref[2]).epsilon(1e-7));
    CHECK(back.Vt[0].real() == doctest::Approx(ref[3]).epsilon(1e-7));
  }
}

TEST_CASE("change of variables round trips") {
  std::mt19937_64 rng(6);
  const GridSpec g{1, 64, 30.0};
  const UVState s{test::random_smooth_field(g, rng), test::random_smooth_field(g, rng),
                  test::random_smooth_field(g, rng), test::random_smooth_field(g, rng), 7.0, 0.0,
                  Formulation::original};
  for (Formulation f : {Formulation::v_modified, Formulation::rescaled}) {
    const UVState back = change_variables(change_variables(s, f), Formulation::original);
    CHECK(max_abs_diff(back.U, s.U) < 1e-14);
    CHECK(max_abs_diff(back.V, s.V) < 1e-14);
    CHECK(max_abs_diff(back.Vt, s.Vt) < 1e-14);
  }
  // rescaled U is the original U over M
  const UVState r = change_variables(s, Formulation::rescaled);
  CHECK(max_abs_diff(Complex(7.0) * r.U, s.U) < 1e-14);
}

TEST_CASE("free evolution of a heavy mode") {
  const GridSpec g{1, 64, 20.0};
  const double M = 10.0, k = 2 * std::numbers::pi * 4 / g.length, w = std::sqrt(k * k + M * M);
  const Field c = Field::sample(g, [&](std::span<const double> x) { return Complex(std::cos(k * x[0])); });
  UVState s = UVState::zero(g, M);
  s.V = c;
  UVSolver solver(s, Nonlinearity{0.0});
  const double dt = 0.01;
  for (int i = 0; i < 300; ++i) solver.step(dt);
  CHECK(max_abs_diff(solver.state().V, std::cos(w * 3.0) * c) < 1e-12);
  CHECK(solver.time() == doctest::Approx(3.0));
}

TEST_CASE("integrator is fourth order") {
  std::mt19937_64 rng(12);
  const GridSpec g{1, 64, 40.0};
  UVState s = UVState::zero(g, 2.0);
  s.U = Complex(0.5) * test::random_smooth_field(g, rng, 3.0);
  s.V = Complex(0.2) * test::random_smooth_field(g, rng, 3.0);
  auto run = [&](double dt) {
    UVSolver solver(s);
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 0; i < n; ++i) solver.step(dt);
    return solver.state();
  };
  const UVState a = run(0.2), b = run(0.1), c = run(0.05);
  const double ratio = norm(a.U - b.U, NormSpec::hs(0)) / norm(b.U - c.U, NormSpec::hs(0));
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("default time step") {
  const GridSpec g{1, 300, 300.0};
  const double kmax = 2 * std::numbers::pi / 300.0 * 100;
  CHECK(max_stable_dt(g, 4.0) == doctest::Approx(0.5 / std::sqrt(kmax * kmax + 16)));
  CHECK(default_dt(g, 4.0) == doctest::Approx(std::min(0.5 / std::sqrt(kmax * kmax + 16), 0.1)));
}

TEST_CASE("causality budget") {
  const GridSpec g{1, 512, 100.0};
  CHECK_NOTHROW(check_causality(g, 10.0, 40.0));
  try {
    check_causality(g, 10.0, 41.0);
    FAIL("expected CausalityBudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CausalityBudgetExceeded);
  }
}

TEST_CASE("gaussian desk data and its normalization") {
  const GridSpec g{1, 512, 400.0};
  const UVState s = gaussian_state(g, 16.0, 3.0, 0.25);
  CHECK(s.U[g.n / 2].real() == doctest::Approx(0.25));
  CHECK(test::max_abs(s.V) == 0.0);
  const UVState n = normalize_light_data(s, 8, 5, 1.0, 0.5);
  const DataNormReport r = data_norms(n, 8, 5, 1.0);
  CHECK(r.weighted_total == doctest::Approx(0.5 / 16.0).epsilon(1e-10));
  CHECK(r.pass);
  const DataNormReport big = data_norms(gaussian_state(g, 16.0, 3.0, 10.0), 8, 5, 1.0);
  CHECK_FALSE(big.pass);
}

TEST_CASE("x norm is linear in small data and scales like the data") {
  const GridSpec g{1, 256, 200.0};
  const UVState s = gaussian_state(g, 8.0, 3.0, 1e-4);
  MonitorSpec spec;
  const XNormSample a = measure_xnorm(s, spec);
  UVState s2 = s;
  s2.U = Complex(2.0) * s.U;
  const XNormSample b = measure_xnorm(s2, spec);
  CHECK(b.X_total == doctest::Approx(2 * a.X_total).epsilon(1e-12));
  CHECK(a.X_total > 0);
}

TEST_CASE("evolve samples the trace and profiles") {
  const GridSpec g{1, 256, 200.0};
  EvolveOptions o;
  o.T = 4.0;
  o.sample_every = 1.0;
  o.profile_times = {2.0, 4.0};
  const EvolveResult r = evolve(gaussian_state(g, 8.0, 3.0, 0.01), o);
  CHECK(r.trace.samples.size() == 5);
  CHECK(r.profiles.size() == 2);
  CHECK(r.final.t == doctest::Approx(4.0));
  CHECK(r.trace.bound == doctest::Approx(10.0 / 8.0));
  o.T = 90.0;
  CHECK_THROWS_AS(evolve(gaussian_state(g, 8.0, 3.0, 0.01), o), Error);
}
