#include "eft/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/fit.hpp"
#include "uv/monitors.hpp"

namespace kgeft {

double ProbeForcing::value_scale(double t) const {
  if (t < t_on) return 0.0;
  return amplitude * std::pow(1.0 + t * t, -0.5 * decay);
}

namespace {

// d/dt of amplitude <t>^{-a}.
double probe_rate(const ProbeForcing& p, double t) {
  if (t < p.t_on) return 0.0;
  return -p.amplitude * p.decay * t * std::pow(1.0 + t * t, -0.5 * p.decay - 1.0);
}

// Jets of every level at one instant, extended on demand through each level's equation.
class StageJets {
 public:
  StageJets(const HierarchyConfig& cfg, const ProbeForcing* probe, double t, std::vector<JetField> base)
      : cfg_(cfg), probe_(probe), t_(t), jets_(std::move(base)) {}

  JetField get(int m, int depth) {
    while (jets_[m].order() < depth) {
      const int k = jets_[m].order() - 1;
      Field F = forcing(m, k);
      const Field& wk = jets_[m][k];
      jets_[m] = jets_[m].with(laplacian(wk) - wk - F);
    }
    return jets_[m].truncated(depth);
  }

  // k-th time derivative of the level-m forcing sum_i g_i[w_{m-i}]/M^i (+ probe on top).
  Field forcing(int m, int k) {
    const GridSpec& g = jets_[0].grid();
    Field F = Field::zeros(g);
    for (int i = 2; i <= m; i += 2) {
      const JetField gi = hierarchy_forcing(i, get(m - i, k + hierarchy_forcing_loss(i)));
      F = F + Complex(cfg_.coefficient * std::pow(cfg_.M, -i)) * gi[k];
    }
    if (probe_ && m == cfg_.top && probe_->amplitude != 0.0) {
      require(k <= 1, ErrorCode::InsufficientJetDepth, "probe forcing jets limited to order 1");
      const double s = k == 0 ? probe_->value_scale(t_) : probe_rate(*probe_, t_);
      F = F + Complex(s) * probe_->profile;
    }
    return F;
  }

 private:
  const HierarchyConfig& cfg_;
  const ProbeForcing* probe_;
  double t_;
  std::vector<JetField> jets_;
};

std::vector<JetField> base_jets(const GridContext& ctx, const std::vector<CVec>& halfwaves) {
  std::vector<JetField> out;
  CVec a, b, pa, pb;
  const GridSpec& g = ctx.grid();
  for (const auto& hw : halfwaves) {
    fields_from_halfwave(ctx, hw, 1.0, a, b);
    to_physical_real(ctx, a, pa, false);
    to_physical_real(ctx, b, pb, false);
    out.emplace_back(std::vector<Field>{Field(g, Space::physical, pa), Field(g, Space::physical, pb)});
  }
  return out;
}

}  // namespace

std::pair<Field, Field> HierarchyResult::fields(int level, std::size_t sample) const {
  require(level >= 0 && level <= cfg.top, ErrorCode::InvalidArgument, "level out of range");
  require(sample < samples.size(), ErrorCode::InvalidArgument, "sample out of range");
  const auto& ctx = *GridContext::get(grid);
  CVec a, b, pa, pb;
  fields_from_halfwave(ctx, samples[sample].halfwaves[level], 1.0, a, b);
  to_physical_real(ctx, a, pa, false);
  to_physical_real(ctx, b, pb, false);
  return {Field(grid, Space::physical, pa), Field(grid, Space::physical, pb)};
}

Field HierarchyResult::profile(int level, std::size_t sample) const {
  require(level >= 0 && level <= cfg.top, ErrorCode::InvalidArgument, "level out of range");
  require(sample < samples.size(), ErrorCode::InvalidArgument, "sample out of range");
  Field w(grid, Space::fourier, samples[sample].halfwaves[level]);
  return transform(linear_flow(w, 1.0, -1, samples[sample].t), Space::physical);
}

JetField HierarchyResult::jets(int level, std::size_t sample, int depth) const {
  require(sample < samples.size(), ErrorCode::InvalidArgument, "sample out of range");
  const auto& ctx = *GridContext::get(grid);
  StageJets sj(cfg, probe ? &*probe : nullptr, samples[sample].t, base_jets(ctx, samples[sample].halfwaves));
  return sj.get(level, depth);
}

HierarchyResult solve_eft_hierarchy(const Field& U0, const Field& U1, const HierarchyConfig& cfg, double T,
                                    double dt, const HierarchyOptions& opts) {
  require_same_grid(U0, U1);
  require(cfg.top >= 0, ErrorCode::InvalidArgument, "hierarchy top level must be >= 0");
  require(cfg.M >= 1.0, ErrorCode::InvalidArgument, "M must be >= 1");
  require(T >= 0, ErrorCode::InvalidArgument, "T must be >= 0");
  const GridSpec grid = U0.grid();
  if (opts.check_causality) check_causality(grid, support_radius({&U0, &U1}), T);
  if (opts.probe) require_same_grid(U0, opts.probe->profile);
  if (dt <= 0) dt = default_dt(grid, 1.0);
  // Land samples exactly on multiples of sample_every when those tile [0, T].
  const double per = T / opts.sample_every;
  if (T > 0 && opts.sample_every > 0 && std::abs(per - std::round(per)) < 1e-9 * std::max(1.0, per))
    dt = opts.sample_every / std::ceil(opts.sample_every / dt - 1e-9);
  const std::size_t nsteps = T > 0 ? static_cast<std::size_t>(std::ceil(T / dt - 1e-9)) : 0;
  if (nsteps > 0) dt = T / static_cast<double>(nsteps);

  HierarchyResult res;
  res.grid = grid;
  res.cfg = cfg;
  res.dt = dt;
  res.steps = nsteps;
  res.probe = opts.probe;
  if (res.probe) res.probe->profile = transform(res.probe->profile, Space::physical);
  const ProbeForcing* probe = res.probe ? &*res.probe : nullptr;

  auto ctxp = GridContext::get(grid);
  const auto& ctx = *ctxp;
  const int levels = cfg.top + 1;
  auto forcing = [&](double t, const std::vector<CVec>& u, std::vector<CVec>& f) {
    StageJets sj(cfg, probe, t, base_jets(ctx, u));
    for (int l = 0; l < levels; ++l) {
      if (l < 2 && !(probe && l == cfg.top)) {
        std::fill(f[l].begin(), f[l].end(), Complex{});
        continue;
      }
      Field F = sj.forcing(l, 0);
      f[l] = F.values();
      to_spectrum_dealiased(ctx, f[l]);
    }
  };
  HalfWaveIntegrator integ(ctxp, std::vector<double>(levels, 1.0), forcing);
  auto spec = [](const Field& f) { return transform(f, Space::fourier).values(); };
  const CVec w0 = halfwave_from_fields(ctx, spec(Complex(cfg.M) * U0), spec(Complex(cfg.M) * U1), 1.0);
  integ.reset(std::vector<CVec>(levels, w0), 0.0);

  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.sample_every / dt)));
  res.samples.push_back({0.0, integ.state()});
  for (std::size_t i = 1; i <= nsteps; ++i) {
    integ.step(dt);
    if (i % stride == 0 || i == nsteps) res.samples.push_back({integ.time(), integ.state()});
  }
  return res;
}

TailFit tail_integral(const std::vector<double>& t, const std::vector<double>& y) {
  require(t.size() == y.size() && !t.empty(), ErrorCode::InvalidArgument, "tail_integral size mismatch");
  TailFit f;
  for (std::size_t i = 1; i < t.size(); ++i) f.integral += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  const double T = t.back();
  const double ymax = *std::max_element(y.begin(), y.end());
  if (ymax == 0.0) {
    f.q = INFINITY;
    f.converged = true;
    return f;
  }
  std::vector<double> tt, yy;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= std::max(T / 10.0, 1e-12) && y[i] > 0) {
      tt.push_back(t[i]);
      yy.push_back(y[i]);
    }
  if (tt.size() < 3) {
    f.note = "TailFitInconclusive: fewer than three positive samples in the last decade";
    return f;
  }
  const ExponentFit fit = fit_power_law(tt, yy);
  f.q = -fit.slope;
  if (f.q > 1.0) {
    const double yT = std::exp(fit.intercept) * std::pow(T, fit.slope);
    f.tail = yT * T / (f.q - 1.0);
    f.converged = std::isfinite(f.tail);
  } else {
    f.tail = INFINITY;
    f.note = "TailFitInconclusive: tail exponent q = " + std::to_string(f.q) + " <= 1";
  }
  return f;
}

ResidualReport certify_residual(const std::vector<std::pair<double, JetField>>& trajectory,
                                const ResidualConfig& cfg) {
  require(!trajectory.empty(), ErrorCode::InvalidArgument, "empty trajectory");
  require(cfg.n >= 0, ErrorCode::InvalidArgument, "residual level must be >= 0");
  ResidualReport rep;
  const double s = std::max(0, cfg.N - cfg.n);
  const double w = std::pow(cfg.M, cfg.n + 1);
  for (const auto& [t, u] : trajectory) {
    int need = 3;
    for (int i = 2; i <= cfg.n; i += 2) need = std::max(need, hierarchy_forcing_loss(i) + 1);
    require(u.order() >= need, ErrorCode::InsufficientJetDepth,
            "certify_residual needs jets to order " + std::to_string(need));
    Field R0 = laplacian(u[0]) - u[0] - u[2];
    Field R1 = laplacian(u[1]) - u[1] - u[3];
    for (int i = 2; i <= cfg.n; i += 2) {
      const JetField g = hierarchy_forcing(i, u.truncated(hierarchy_forcing_loss(i) + 1));
      const Complex c(cfg.coefficient * std::pow(cfg.M, -i));
      R0 = R0 - c * g[0];
      R1 = R1 - c * g[1];
    }
    ResidualSample rs;
    rs.t = t;
    rs.R = w * norm(R0, NormSpec::hs(s));
    rs.Rt = w * norm(R1, NormSpec::hs(s));
    rs.u_inf = norm(u[0], NormSpec::wkp(0, INFINITY));
    rs.ut_inf = norm(u[1], NormSpec::wkp(0, INFINITY));
    for (int a = 0; a < u.grid().dim; ++a)
      rs.grad_inf = std::max(rs.grad_inf, norm(partial(u[0], a), NormSpec::wkp(0, INFINITY)));
    rep.samples.push_back(rs);
  }
  auto column = [&](auto member) {
    std::vector<double> v;
    for (const auto& r : rep.samples) v.push_back(r.*member);
    return v;
  };
  const auto ts = column(&ResidualSample::t);
  rep.residual = tail_integral(ts, column(&ResidualSample::R));
  rep.residual_t = tail_integral(ts, column(&ResidualSample::Rt));
  rep.u_decay = tail_integral(ts, column(&ResidualSample::u_inf));
  rep.ut_decay = tail_integral(ts, column(&ResidualSample::ut_inf));
  rep.grad_decay = tail_integral(ts, column(&ResidualSample::grad_inf));
  rep.scattering = true;
  for (const TailFit* f : {&rep.residual, &rep.residual_t, &rep.u_decay, &rep.ut_decay, &rep.grad_decay}) {
    rep.scattering = rep.scattering && f->converged;
    if (!f->note.empty()) rep.notes.push_back(f->note);
  }
  return rep;
}

std::vector<std::pair<double, JetField>> hierarchy_trajectory(const HierarchyResult& r, int level, int depth) {
  std::vector<std::pair<double, JetField>> out;
  for (std::size_t i = 0; i < r.samples.size(); ++i) out.emplace_back(r.samples[i].t, r.jets(level, i, depth));
  return out;
}

JetField uv_light_jets(const UVState& s, int depth, const Nonlinearity& nl) {
  const UVState r = change_variables(s, Formulation::rescaled);
  auto [U, V] = eom_jet_closure(JetField({r.U, r.Ut}), JetField({r.V, r.Vt}), r.M, std::max(depth, 2), nl);
  return jet_scale(r.M, U.truncated(depth));
}

}  // namespace kgeft
