#include <doctest.h>

#include <cmath>
#include <random>

#include "common/error.hpp"
#include "eft/eft_data.hpp"
#include "eft/hierarchy.hpp"
#include "eft/jets.hpp"
#include "uv/monitors.hpp"
#include "support.hpp"

using namespace kgeft;
using test::max_abs;
using test::max_abs_diff;

namespace {

Field constant(const GridSpec& g, double v) {
  return Field::sample(g, [v](std::span<const double>) { return Complex(v); });
}

Field bump(const GridSpec& g, double a, double sigma) {
  return Field::sample(g, [&](std::span<const double> x) {
    double r2 = 0;
    for (double xi : x) r2 += xi * xi;
    return Complex(a * std::exp(-r2 / (2 * sigma * sigma)));
  });
}

}  // namespace

TEST_CASE("jet closure of constant fields matches hand derivatives") {
  // rescaled eom at constant fields: U'' = -U - (UV - U^3/2), V'' = -M^2 V - (U^2 V - U^4/2 - U'^2)
  const GridSpec g{1, 8, 4.0};
  const double M = 3.0, u = 0.3, ut = -0.2, v = 0.1, vt = 0.05;
  auto [U, V] = eom_jet_closure(JetField({constant(g, u), constant(g, ut)}),
                                JetField({constant(g, v), constant(g, vt)}), M, 4);
  const double utt = -u - (u * v - 0.5 * u * u * u);
  const double vtt = -M * M * v - (u * u * v - 0.5 * std::pow(u, 4) - ut * ut);
  const double uttt = -ut - (ut * v + u * vt - 1.5 * u * u * ut);
  const double vttt = -M * M * vt - (2 * u * ut * v + u * u * vt - 2 * u * u * u * ut - 2 * ut * utt);
  REQUIRE(U.order() == 4);
  CHECK(U[2][0].real() == doctest::Approx(utt).epsilon(1e-13));
  CHECK(V[2][0].real() == doctest::Approx(vtt).epsilon(1e-13));
  CHECK(U[3][0].real() == doctest::Approx(uttt).epsilon(1e-13));
  CHECK(V[3][0].real() == doctest::Approx(vttt).epsilon(1e-13));
  // U'''' by differentiating U''' once more
  const double vtt_ = vtt;
  const double utttt = -utt - (utt * v + 2 * ut * vt + u * vtt_ - 3 * u * ut * ut - 1.5 * u * u * utt);
  CHECK(U[4][0].real() == doctest::Approx(utttt).epsilon(1e-12));
}

TEST_CASE("jet closure taylor polynomial tracks the integrator") {
  std::mt19937_64 rng(21);
  const GridSpec g{1, 128, 40.0};
  UVState s = UVState::zero(g, 4.0);
  s.U = Complex(0.3) * test::random_smooth_field(g, rng, 3.0);
  s.V = Complex(0.1) * test::random_smooth_field(g, rng, 3.0);
  // nonzero velocities: with Ut = Vt = 0 the solution is even in t and the t^5 term drops out
  s.Ut = Complex(0.2) * test::random_smooth_field(g, rng, 3.0);
  s.Vt = Complex(0.1) * test::random_smooth_field(g, rng, 3.0);
  auto [U, V] = eom_jet_closure(JetField({s.U, s.Ut}), JetField({s.V, s.Vt}), s.M, 4);
  auto err = [&](double t) {
    UVSolver solver(s);
    for (int i = 0; i < 20; ++i) solver.step(t / 20);
    Field taylor = U[0];
    double c = 1.0;
    for (int k = 1; k <= 4; ++k) {
      c *= t / k;
      taylor = taylor + Complex(c) * U[k];
    }
    return max_abs_diff(dealias(solver.state().U), dealias(taylor));
  };
  const double e1 = err(0.02), e2 = err(0.01);
  CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.25));
}

TEST_CASE("eft functionals of constant fields") {
  const GridSpec g{1, 8, 4.0};
  const double u = 0.4, ut = 0.3;
  // F_1 = dU.dU - U^4/2 = -Ut^2 - U^4/2 for constant data
  const JetField U({constant(g, u), constant(g, ut), constant(g, -u), constant(g, -ut)});
  const JetField F = eft_functional(1, U);
  CHECK(F[0][0].real() == doctest::Approx(-ut * ut - 0.5 * std::pow(u, 4)).epsilon(1e-13));
  CHECK_THROWS_AS(eft_functional(2, U), Error);
}

TEST_CASE("hierarchy forcings") {
  const GridSpec g{1, 8, 4.0};
  const JetField w({constant(g, 0.5), constant(g, 0.2), constant(g, -0.5), constant(g, -0.2), constant(g, 0.5)});
  CHECK(hierarchy_forcing(2, w)[0][0].real() == doctest::Approx(-0.0625).epsilon(1e-13));
  CHECK(max_abs(hierarchy_forcing(3, w)[0]) == 0.0);
  // g_4 = -w dw.dw = -w(-wt^2) for constant data
  CHECK(hierarchy_forcing(4, w)[0][0].real() == doctest::Approx(0.5 * 0.04).epsilon(1e-13));
  CHECK(hierarchy_forcing_loss(2) == 0);
  CHECK(hierarchy_forcing_loss(4) == 1);
  CHECK(hierarchy_forcing_loss(6) == 3);
}

TEST_CASE("order zero data has no heavy field") {
  const GridSpec g{1, 128, 60.0};
  const EFTDataBundle b = make_eft_data(bump(g, 0.01, 2.0), Field::zeros(g), {.order = 0, .M = 16.0, .enforce_budget = false});
  CHECK(max_abs(b.V0) == 0.0);
  CHECK(max_abs(b.V1) == 0.0);
}

TEST_CASE("order one data is the leading ground state") {
  // V0 = -(|grad U|^2 - U^4/2)/M^2 + O(M^-4) for U1 = 0
  const GridSpec g{1, 256, 60.0};
  const double M = 32.0;
  const Field U0 = bump(g, 0.5, 2.0);
  EFTConfig cfg;
  cfg.order = 1;
  cfg.M = M;
  cfg.enforce_budget = false;
  const EFTDataBundle b = make_eft_data(U0, Field::zeros(g), cfg);
  const Field dU = partial(U0, 0);
  const Field lead = Field::sample(g, [&](std::span<const double>) { return Complex{}; });
  CVec ref(g.n);
  const Field dUp = dU.to(Space::physical), Up = U0.to(Space::physical);
  for (int i = 0; i < g.n; ++i)
    ref[i] = -(std::norm(dUp[i]) - 0.5 * std::pow(std::abs(Up[i]), 4)) / (M * M);
  const Field expected(g, Space::physical, ref);
  CHECK(max_abs_diff(b.V0, expected) <= 2e-3 * max_abs(expected));
  CHECK(max_abs(b.V1) <= 1e-2 * max_abs(expected));
  // V^1 of the data nearly vanishes
  CHECK(max_abs(vm_transform(b.state(M), 1)) <= 1e-2 * max_abs(b.V0));
  CHECK(max_abs_diff(vm_transform(b.state(M), 0), b.V0) == 0.0);
}

TEST_CASE("eft data budget") {
  const GridSpec g{1, 128, 60.0};
  EFTConfig cfg;
  cfg.order = 1;
  cfg.M = 16.0;
  try {
    (void)make_eft_data(bump(g, 1.0, 2.0), Field::zeros(g), cfg);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
}

TEST_CASE("free hierarchy keeps every level on the free flow") {
  const GridSpec g{1, 128, 100.0};
  const Field U0 = bump(g, 0.05, 2.0);
  const HierarchyResult r = solve_eft_hierarchy(U0, Field::zeros(g), {4, 8.0, 0.0}, 10.0, 0.05, {.sample_every = 5.0});
  REQUIRE(r.samples.size() == 3);
  const std::size_t last = r.samples.size() - 1;
  for (int level = 0; level <= 4; ++level)
    CHECK(max_abs_diff(r.profile(level, last), r.profile(level, 0)) < 1e-12);
  // profile at t = 0 is w_+ = i<D>(M U0)
  const Field expected = to_halfwaves(Complex(8.0) * U0, Field::zeros(g), 1.0).plus;
  CHECK(max_abs_diff(r.profile(0, 0), expected) < 1e-12);
}

TEST_CASE("hierarchy levels separate like M^-2") {
  const GridSpec g{1, 128, 100.0};
  const Field U0 = bump(g, 1.0, 2.0);
  auto gap = [&](double M) {
    const HierarchyResult r =
        solve_eft_hierarchy(Complex(1.0 / M) * U0, Field::zeros(g), {2, M, 1.0}, 10.0, 0.02, {.sample_every = 10.0});
    return norm(r.profile(2, 1) - r.profile(0, 1), NormSpec::hs(1));
  };
  const double a = gap(8.0), b = gap(16.0);
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("residual of a hierarchy level against its own equation") {
  const GridSpec g{1, 128, 100.0};
  const Field U0 = bump(g, 1.0 / 8.0, 2.0);
  const HierarchyResult r = solve_eft_hierarchy(U0, Field::zeros(g), {2, 8.0, 1.0}, 10.0, 0.02, {.sample_every = 1.0});
  ResidualConfig rc;
  rc.M = 8.0;
  rc.N = 4;
  rc.n = 0;
  const ResidualReport own = certify_residual(hierarchy_trajectory(r, 0, 3), rc);
  for (const auto& s : own.samples) CHECK(s.R < 1e-9);
  // free level 0 tested against level 2: R = M^3 M^-2 |w^3/2|
  rc.n = 2;
  const auto traj = hierarchy_trajectory(r, 0, 3);
  const ResidualReport other = certify_residual(traj, rc);
  const Field w3 = dealiased_product(dealiased_product(traj[0].second[0], traj[0].second[0]), traj[0].second[0]);
  CHECK(other.samples[0].R == doctest::Approx(8.0 * 0.5 * norm(w3, NormSpec::hs(2))).epsilon(1e-9));
}

TEST_CASE("tail integral of a power law") {
  std::vector<double> t, y;
  for (double s = 1.0; s <= 100.0 + 1e-9; s += 0.01) {
    t.push_back(s);
    y.push_back(1.0 / (s * s));
  }
  const TailFit f = tail_integral(t, y);
  CHECK(f.q == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.integral == doctest::Approx(0.99).epsilon(1e-4));
  CHECK(f.tail == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(f.converged);
  std::vector<double> slow;
  for (double s : t) slow.push_back(1.0 / std::sqrt(s));
  const TailFit s = tail_integral(t, slow);
  CHECK_FALSE(s.converged);
  CHECK(s.note.find("TailFitInconclusive") == 0);
}

TEST_CASE("probe forcing profile") {
  ProbeForcing p;
  p.amplitude = 2.0;
  p.decay = 2.0;
  p.t_on = 1.0;
  CHECK(p.value_scale(0.5) == 0.0);
  CHECK(p.value_scale(3.0) == doctest::Approx(0.2));
}
