#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "common/fit.hpp"
#include "scattering/scattering.hpp"
#include "support.hpp"

using namespace kgeft;
using test::max_abs_diff;

namespace {

// l(t) = l_inf + t^{-2} g, sampled at the given times.
std::vector<ProfileSet> synthetic(const Field& linf, const Field& g, const std::vector<double>& times, double M) {
  std::vector<ProfileSet> out;
  for (double t : times) {
    ProfileSet p;
    p.l_plus = linf + Complex(1.0 / (t * t)) * g;
    p.l_minus = conj(p.l_plus);
    p.h_plus = Field::zeros(linf.grid());
    p.h_minus = p.h_plus;
    p.time = t;
    p.M = M;
    out.push_back(p);
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

SweepConfig small_sweep() {
  SweepConfig c;
  c.grid = {1, 128, 120.0};
  c.T = 10.0;
  c.sample_every = 2.5;
  c.hierarchy_dt = 0.05;
  c.workers = 2;
  return c;
}

}  // namespace

TEST_CASE("scattered state of a synthetic profile trajectory") {
  std::mt19937_64 rng(41);
  const GridSpec grid{1, 64, 30.0};
  const Field linf = test::random_smooth_field(grid, rng), g = test::random_smooth_field(grid, rng);
  std::vector<double> times;
  for (double t = 10.0; t <= 160.0 + 1e-9; t += 2.5) times.push_back(t);
  const ScatteredState s = extract_scattered_state(synthetic(linf, g, times, 8.0), 2, 160.0);
  const double gk = norm(g, NormSpec::hs(2));
  CHECK(s.cauchy_gap == doctest::Approx(3.0 * gk / (160.0 * 160.0)).epsilon(1e-10));
  CHECK(s.tail_exponent == doctest::Approx(3.0).epsilon(0.02));
  CHECK(s.tail == doctest::Approx(gk / (160.0 * 160.0)).epsilon(0.05));
  CHECK(s.converged);
  CHECK(max_abs_diff(s.f.l_plus, linf + Complex(1.0 / (160.0 * 160.0)) * g) == 0.0);
  // a trajectory that does not settle
  std::vector<ProfileSet> drift = synthetic(linf, g, times, 8.0);
  for (auto& p : drift) p.l_plus = linf + Complex(std::sqrt(p.time)) * g;
  CHECK_FALSE(extract_scattered_state(drift, 2, 160.0).converged);
  CHECK_THROWS_AS(extract_scattered_state(drift, 2, 170.0), Error);
}

TEST_CASE("uv profiles are mapped to the w scale") {
  std::mt19937_64 rng(42);
  const GridSpec grid{1, 64, 30.0};
  const Field l = test::random_smooth_field(grid, rng);
  const auto traj = synthetic(l, Field::zeros(grid), {5.0, 10.0}, 16.0);
  const ScatteredState s = scattered_state_from_uv(traj, 1, 10.0);
  CHECK(max_abs_diff(s.f.l_plus, Complex(16.0) * l) < 1e-13);
  CHECK(s.source == "uv");
}

TEST_CASE("comparison of scattered states") {
  std::mt19937_64 rng(43);
  const GridSpec grid{1, 64, 30.0};
  const Field a = test::random_smooth_field(grid, rng), b = test::random_smooth_field(grid, rng);
  const ScatteredState sa = extract_scattered_state(synthetic(a, Field::zeros(grid), {5.0, 10.0}, 8.0), 1, 10.0);
  const ScatteredState sb = extract_scattered_state(synthetic(b, Field::zeros(grid), {5.0, 10.0}, 8.0), 1, 10.0);
  CHECK(compare_scattered_states(sa, sb, 1) == doctest::Approx(norm(a - b, NormSpec::hs(1))));
  CHECK(compare_scattered_states(sa, sb, 1) == compare_scattered_states(sb, sa, 1));
  CHECK(compare_scattered_states(sa, sa, 1) == 0.0);
  const ScatteredState sc = extract_scattered_state(synthetic(b, Field::zeros(grid), {5.0, 10.0}, 16.0), 1, 10.0);
  try {
    (void)compare_scattered_states(sa, sc, 1);
    FAIL("expected ConventionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConventionMismatch);
  }
  const ScatteredState sd = extract_scattered_state(synthetic(b, Field::zeros(grid), {6.0, 12.0}, 8.0), 1, 12.0);
  CHECK_THROWS_AS(compare_scattered_states(sa, sd, 1), Error);
}

TEST_CASE("power law fits") {
  const std::vector<double> M{8, 16, 32, 64};
  std::vector<double> y, y7;
  for (double m : M) {
    y.push_back(3.0 * std::pow(m, -2.5));
    y7.push_back(7.0 * y.back());
  }
  const ExponentFit f = fit_power_law(M, y);
  CHECK(f.slope == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(fit_power_law(M, y7).slope == doctest::Approx(f.slope).epsilon(1e-12));
  const ExponentFit w = fit_power_law(M, y, {10.0, 100.0});
  CHECK(w.samples.size() == 3);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("experiment names round trip") {
  for (Experiment e : {Experiment::decay, Experiment::vm_suppression, Experiment::scattering_gap,
                       Experiment::xnorm_bound, Experiment::hierarchy_gap})
    CHECK(experiment_from_string(to_string(e)) == e);
  CHECK_THROWS_AS(experiment_from_string("nope"), Error);
}

TEST_CASE("sweeps are deterministic and persist their outputs") {
  const auto root = test::scratch_dir("sweep");
  const std::vector<double> M{8, 16, 32, 64};
  const SweepResult a = run_sweep(Experiment::hierarchy_gap, M, small_sweep(), root / "a");
  SweepConfig one = small_sweep();
  one.workers = 1;
  const SweepResult b = run_sweep(Experiment::hierarchy_gap, M, one, root / "b");
  CHECK(a.succeeded == 4);
  CHECK(slurp(root / "a" / "sweep.csv") == slurp(root / "b" / "sweep.csv"));
  CHECK(slurp(root / "a" / "sweep.csv").rfind("series,M,value,slope,slope_stderr,residual\n", 0) == 0);
  CHECK(std::filesystem::exists(root / "a" / "sweep.json"));
  CHECK(std::filesystem::exists(root / "a" / "M16_n0" / "config.json"));
  CHECK(std::filesystem::exists(root / "a" / "M16_n0" / "trace.csv"));
  const SweepSeries& d = a.series_named("d_0_2");
  REQUIRE(d.fit);
  CHECK(d.fit->slope < -1.5);
  CHECK_THROWS_AS(a.series_named("missing"), Error);
}

TEST_CASE("sweeps need four masses") {
  try {
    (void)run_sweep(Experiment::decay, {8, 16, 32}, small_sweep());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  // every run fails the causality budget
  SweepConfig c = small_sweep();
  c.T = 100.0;
  try {
    (void)run_sweep(Experiment::decay, {8, 16, 32, 64}, c);
    FAIL("expected SweepFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SweepFailed);
  }
}

TEST_CASE("uniqueness probe refuses uncertified one dimensional runs") {
  const GridSpec grid{1, 128, 100.0};
  const Field U0 = Field::sample(grid, [](std::span<const double> x) { return Complex(0.1 * std::exp(-x[0] * x[0] / 8)); });
  const Field profile = Field::sample(grid, [](std::span<const double> x) { return Complex(std::exp(-x[0] * x[0] / 2)); });
  UniquenessConfig cfg;
  cfg.M_list = {8, 16};
  cfg.T = 20.0;
  cfg.dt = 0.05;
  try {
    (void)uniqueness_probe(U0, Field::zeros(grid), profile, cfg);
    FAIL("expected CertificationMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CertificationMissing);
  }
  cfg.require_certificate = false;
  const UniquenessResult r = uniqueness_probe(U0, Field::zeros(grid), profile, cfg);
  REQUIRE(r.runs.size() == 2);
  // the probe enters linearly at this size: the gap scales like M^-(n+1)
  CHECK(r.gap.values[0] / r.gap.values[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(r.runs[0].gap <= r.runs[0].perturbation_integral * (1 + 1e-9) * 2);
}
