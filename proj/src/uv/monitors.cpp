#include "uv/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "common/error.hpp"

namespace kgeft {

double XNormTrace::max_total() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.X_total);
  return m;
}

namespace {

double jp(double x) { return std::sqrt(1.0 + x * x); }

// |x e^{-i<D>_m t} w|_{H^s}, or NaN when the profile is not confined to the half box.
double weighted_profile(const GridContext& ctx, const CVec& what, double m, double t, double s) {
  CVec w(what.size());
  const auto sym = ctx.bessel_symbol(1.0, m);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = what[i] * std::polar(1.0, -sym[i] * t);
  ctx.inverse(w, w);
  if (!supported_in_half_box(ctx, w)) return std::numeric_limits<double>::quiet_NaN();
  return weighted_hs_norm_physical(ctx, w, s, 1.0);
}

}  // namespace

XNormSample measure_xnorm(const GridContext& ctx, const CVec& up, const CVec& vp, double M, double t,
                          const MonitorSpec& spec) {
  const double p = spec.lebesgue_exponent();
  const int d = ctx.grid().dim;
  const double e = d * (0.5 - 1.0 / p);
  const double sM = std::sqrt(M);
  XNormSample x;
  x.t = t;
  x.Z_light = std::pow(jp(t), e) * wkp_norm_spectrum(ctx, up, spec.k, p, 1.0);
  x.Z_heavy = sM * std::pow(jp(t / M), e) * wkp_norm_spectrum(ctx, vp, spec.k, p, 1.0);
  x.S_light = weighted_profile(ctx, up, 1.0, t, spec.k + 1.5);
  x.S_heavy = sM * weighted_profile(ctx, vp, M, t, spec.k + 1.5);
  x.N_light = hs_norm_spectrum(ctx, up, spec.N, 1.0);
  x.N_heavy = sM * hs_norm_spectrum(ctx, vp, spec.N, 1.0);
  x.X_total = 0.0;
  for (double v : {x.Z_light, x.Z_heavy, x.S_light, x.S_heavy, x.N_light, x.N_heavy})
    if (std::isfinite(v)) x.X_total += v;
  return x;
}

XNormSample measure_xnorm(const UVState& s, const MonitorSpec& spec) {
  const UVState r = change_variables(s, Formulation::rescaled);
  const auto& ctx = r.U.context();
  auto spec_of = [](const Field& f) { return transform(f, Space::fourier).values(); };
  const CVec up = halfwave_from_fields(ctx, spec_of(r.U), spec_of(r.Ut), 1.0);
  const CVec vp = halfwave_from_fields(ctx, spec_of(r.V), spec_of(r.Vt), r.M);
  return measure_xnorm(ctx, up, vp, r.M, r.t, spec);
}

double DataNormReport::term(const std::string& name) const {
  for (const auto& [k, v] : terms)
    if (k == name) return v;
  fail(ErrorCode::InvalidArgument, "no data-norm term '" + name + "'");
}

DataNormReport data_norms(const UVState& s, int N, int k, double E, bool weighted) {
  require(N >= 1 && k >= 0, ErrorCode::InvalidArgument, "data norms need N >= 1, k >= 0");
  const UVState r = change_variables(s, Formulation::rescaled);
  const double M = r.M;
  DataNormReport rep;
  rep.E = E;
  rep.M = M;
  rep.weighted = weighted;
  auto hs = [](const Field& f, double sreg) { return norm(f, NormSpec::hs(sreg)); };
  rep.terms = {{"M|U0|_H^N", M * hs(r.U, N)},
               {"M|U1|_H^{N-1}", M * hs(r.Ut, N - 1)},
               {"M^3|V0|_H^{N-1}", M * M * M * hs(r.V, N - 1)},
               {"M^2|V0|_H^N", M * M * hs(r.V, N)},
               {"M^2|V1|_H^{N-1}", M * M * hs(r.Vt, N - 1)}};
  for (const auto& [name, v] : rep.terms) rep.total += v;
  rep.pass = rep.total < E || (E > 0 && rep.total == 0.0);
  if (weighted) {
    const auto& ctx = r.U.context();
    auto sp = [](const Field& f) { return transform(f, Space::fourier).values(); };
    const CVec up = halfwave_from_fields(ctx, sp(r.U), sp(r.Ut), 1.0);
    const CVec vp = halfwave_from_fields(ctx, sp(r.V), sp(r.Vt), M);
    CVec upx = up, vpx = vp;
    ctx.inverse(upx, upx);
    ctx.inverse(vpx, vpx);
    const std::vector<std::pair<std::string, double>> w = {
        {"|u0|_H^N", hs_norm_spectrum(ctx, up, N, 1.0)},
        {"M|v0|_H^N", M * hs_norm_spectrum(ctx, vp, N, 1.0)},
        {"|x u0|_H^{k+3/2}", weighted_hs_norm_physical(ctx, upx, k + 1.5, 1.0)},
        {"M|x v0|_H^{k+3/2}", M * weighted_hs_norm_physical(ctx, vpx, k + 1.5, 1.0)}};
    for (const auto& t : w) {
      rep.terms.push_back(t);
      rep.weighted_total += t.second;
    }
    rep.pass = rep.pass && (rep.weighted_total < E / M || rep.weighted_total == 0.0);
  }
  return rep;
}

UVState gaussian_state(const GridSpec& grid, double M, double sigma, double amplitude) {
  require(sigma > 0, ErrorCode::InvalidArgument, "gaussian width must be positive");
  Field U = Field::sample(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return Complex(amplitude * std::exp(-r2 / (2.0 * sigma * sigma)), 0.0);
  });
  Field z = Field::zeros(grid);
  return {U, z, z, z, M, 0.0, Formulation::rescaled};
}

UVState normalize_light_data(const UVState& s, int N, int k, double E, double fraction) {
  UVState r = change_variables(s, Formulation::rescaled);
  UVState light = r;
  light.V = Field::zeros(r.grid());
  light.Vt = light.V;
  const double w = data_norms(light, N, k, E, true).weighted_total;
  require(w > 0, ErrorCode::InvalidArgument, "cannot normalize zero light data");
  const double f = fraction * E / r.M / w;
  r.U = f * r.U;
  r.Ut = f * r.Ut;
  return r;
}

void check_causality(const GridSpec& grid, double R, double T) {
  const double need = 2.0 * (R + T);
  require(grid.length >= need, ErrorCode::CausalityBudgetExceeded,
          "causality budget: box length " + std::to_string(grid.length) + " < 2(R+T) = " +
              std::to_string(need));
}

ProfileSet profiles_of(const UVState& s) {
  const UVState r = change_variables(s, Formulation::rescaled);
  return make_profiles(r.U, r.Ut, r.V, r.Vt, r.M, r.t);
}

EvolveResult evolve(const UVState& s, const EvolveOptions& opts, const Nonlinearity& nl) {
  require(opts.T >= 0 && std::isfinite(opts.T), ErrorCode::InvalidArgument, "T must be >= 0");
  EvolveResult res;
  res.support_radius = support_radius({&s.U, &s.Ut, &s.V, &s.Vt});
  if (opts.check_causality) check_causality(s.grid(), res.support_radius, opts.T);
  double dt = opts.dt > 0 ? opts.dt : default_dt(s.grid(), s.M);
  if (opts.enforce_dt)
    require(dt <= max_stable_dt(s.grid(), s.M) * (1.0 + 1e-12), ErrorCode::InvalidArgument,
            "dt exceeds 0.5/<rho_max>_M = " + std::to_string(max_stable_dt(s.grid(), s.M)));
  const std::size_t nsteps = opts.T > 0 ? static_cast<std::size_t>(std::ceil(opts.T / dt - 1e-9)) : 0;
  if (nsteps > 0) dt = opts.T / static_cast<double>(nsteps);
  res.dt = dt;
  res.steps = nsteps;
  res.trace.bound = opts.monitor.bootstrap_constant * opts.monitor.E / s.M;
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.sample_every / dt)));

  std::vector<std::size_t> profile_steps;
  for (double tp : opts.profile_times) {
    require(tp >= 0 && tp <= opts.T + 1e-12, ErrorCode::InvalidArgument, "profile time outside [0, T]");
    profile_steps.push_back(static_cast<std::size_t>(std::llround(tp / std::max(dt, 1e-300))));
  }

  UVSolver solver(s, nl);
  const bool rescaled = s.formulation == Formulation::rescaled;
  auto sample = [&](std::size_t step_index) {
    const bool is_sample = step_index % stride == 0 || step_index == nsteps;
    const bool is_profile =
        std::find(profile_steps.begin(), profile_steps.end(), step_index) != profile_steps.end();
    if (!is_sample && !is_profile) return;
    if (is_sample && opts.monitors) {
      if (rescaled) {
        const auto& hw = solver.halfwaves();
        res.trace.samples.push_back(
            measure_xnorm(*GridContext::get(s.grid()), hw[0], hw[1], s.M, solver.time(), opts.monitor));
      } else {
        res.trace.samples.push_back(measure_xnorm(solver.state(), opts.monitor));
      }
    }
    if (is_sample && opts.on_sample) opts.on_sample(solver);
    if (is_profile) res.profiles.push_back(profiles_of(solver.state()));
  };
  sample(0);
  for (std::size_t i = 1; i <= nsteps; ++i) {
    solver.step(dt);
    sample(i);
  }
  res.final = solver.state();
  return res;
}

void write_trace_csv(const std::filesystem::path& path, const XNormTrace& trace) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path.string());
  out << "t,Z_light,Z_heavy,S_light,S_heavy,N_light,N_heavy,X_total\n";
  out << std::setprecision(17);
  auto cell = [&](double v) {
    if (std::isfinite(v))
      out << v;
    else
      out << "untracked";
  };
  for (const auto& s : trace.samples) {
    out << s.t;
    for (double v : {s.Z_light, s.Z_heavy, s.S_light, s.S_heavy, s.N_light, s.N_heavy, s.X_total}) {
      out << ',';
      cell(v);
    }
    out << '\n';
  }
}

}  // namespace kgeft
