#include "uv/uv_solver.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace kgeft {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::original: return "original";
    case Formulation::v_modified: return "v_modified";
    case Formulation::rescaled: return "rescaled";
  }
  return "?";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "original") return Formulation::original;
  if (s == "v_modified") return Formulation::v_modified;
  if (s == "rescaled") return Formulation::rescaled;
  fail(ErrorCode::InvalidArgument, "unknown formulation '" + s + "'");
}

UVState UVState::zero(const GridSpec& grid, double M, Formulation f) {
  Field z = Field::zeros(grid);
  return {z, z, z, z, M, 0.0, f};
}

namespace {

Field pointwise(const Field& a, const std::function<Complex(std::size_t)>& fn) {
  CVec v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(i);
  return Field(a.grid(), Space::physical, std::move(v));
}

// original <-> v_modified: V = Vbar + Ubar^2/(2M^2), Vt = Vbar_t + Ubar Ubar_t / M^2.
UVState shift_v(const UVState& s, double sign, Formulation target) {
  const Field U = transform(s.U, Space::physical), Ut = transform(s.Ut, Space::physical);
  const Field V = transform(s.V, Space::physical), Vt = transform(s.Vt, Space::physical);
  const double m2 = s.M * s.M;
  Field nV = pointwise(U, [&](std::size_t i) { return V[i] + sign * U[i] * U[i] / (2.0 * m2); });
  Field nVt = pointwise(U, [&](std::size_t i) { return Vt[i] + sign * U[i] * Ut[i] / m2; });
  return {U, Ut, nV, nVt, s.M, s.t, target};
}

UVState scale_u(const UVState& s, double factor, Formulation target) {
  return {factor * transform(s.U, Space::physical), factor * transform(s.Ut, Space::physical),
          transform(s.V, Space::physical), transform(s.Vt, Space::physical), s.M, s.t, target};
}

}  // namespace

UVState change_variables(const UVState& s, Formulation target) {
  if (s.formulation == target) return s;
  const double M = s.M;
  switch (s.formulation) {
    case Formulation::original:
      if (target == Formulation::v_modified) return shift_v(s, +1.0, target);
      return scale_u(shift_v(s, +1.0, Formulation::v_modified), 1.0 / M, target);
    case Formulation::v_modified:
      if (target == Formulation::original) return shift_v(s, -1.0, target);
      return scale_u(s, 1.0 / M, target);
    case Formulation::rescaled: {
      UVState vm = scale_u(s, M, Formulation::v_modified);
      if (target == Formulation::v_modified) return vm;
      return shift_v(vm, -1.0, target);
    }
  }
  fail(ErrorCode::Internal, "unreachable formulation");
}

CVec halfwave_from_fields(const GridContext& ctx, std::span<const Complex> U_hat,
                          std::span<const Complex> Ut_hat, double mass) {
  const auto& k2 = ctx.k2();
  const double m2 = mass * mass;
  CVec out(U_hat.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = Ut_hat[i] + Complex(0.0, std::sqrt(k2[i] + m2)) * U_hat[i];
  return out;
}

void fields_from_halfwave(const GridContext& ctx, std::span<const Complex> up, double mass, CVec& U_hat,
                          CVec& Ut_hat) {
  const auto& k2 = ctx.k2();
  const auto& mirror = ctx.mirror();
  const double m2 = mass * mass;
  U_hat.resize(up.size());
  Ut_hat.resize(up.size());
  for (std::size_t i = 0; i < up.size(); ++i) {
    // Real fields: u_-(rho) = conj(u_+(-rho)).
    const Complex um = std::conj(up[mirror[i]]);
    const double w = std::sqrt(k2[i] + m2);
    U_hat[i] = (up[i] - um) / Complex(0.0, 2.0 * w);
    Ut_hat[i] = 0.5 * (up[i] + um);
  }
}

void to_physical_real(const GridContext& ctx, std::span<const Complex> spec, CVec& out, bool dealias) {
  if (spec.data() != out.data()) out.assign(spec.begin(), spec.end());
  if (dealias) {
    const auto& mask = ctx.dealias_mask();
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!mask[i]) out[i] = 0.0;
  }
  ctx.inverse(out, out);
  for (auto& z : out) z = z.real();
}

void to_spectrum_dealiased(const GridContext& ctx, CVec& data) {
  ctx.forward(data, data);
  const auto& mask = ctx.dealias_mask();
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!mask[i]) data[i] = 0.0;
}

HalfWaveIntegrator::HalfWaveIntegrator(std::shared_ptr<const GridContext> ctx, std::vector<double> masses,
                                       Forcing forcing)
    : ctx_(std::move(ctx)), masses_(std::move(masses)), forcing_(std::move(forcing)) {
  const std::size_t n = ctx_->size();
  u_.assign(masses_.size(), CVec(n));
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(masses_.size(), CVec(n));
}

void HalfWaveIntegrator::reset(std::vector<CVec> uplus_hat, double t) {
  require(uplus_hat.size() == masses_.size(), ErrorCode::InvalidArgument,
          "half-wave state has the wrong number of components");
  for (const auto& c : uplus_hat)
    require(c.size() == ctx_->size(), ErrorCode::GridMismatch, "half-wave state size mismatch");
  u_ = std::move(uplus_hat);
  t_ = t;
}

void HalfWaveIntegrator::prepare(double dt) {
  if (dt == prepared_dt_ && !half_.empty()) return;
  half_.clear();
  for (double m : masses_) {
    const auto sym = ctx_->bessel_symbol(1.0, m);
    CVec e(sym.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, 0.5 * dt * sym[i]);
    half_.push_back(std::move(e));
  }
  prepared_dt_ = dt;
}

void HalfWaveIntegrator::eval(double t, const std::vector<CVec>& u, std::vector<CVec>& k) {
  forcing_(t, u, k);
  for (auto& c : k)
    for (auto& z : c) z = -z;
}

void HalfWaveIntegrator::step(double dt) {
  require(dt > 0 && std::isfinite(dt), ErrorCode::InvalidArgument, "dt must be positive");
  prepare(dt);
  const std::size_t nc = u_.size(), n = ctx_->size();
  const double h = 0.5 * dt;
  eval(t_, u_, k1_);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) tmp_[c][i] = half_[c][i] * (u_[c][i] + h * k1_[c][i]);
  eval(t_ + h, tmp_, k2_);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) tmp_[c][i] = half_[c][i] * u_[c][i] + h * k2_[c][i];
  eval(t_ + h, tmp_, k3_);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex e = half_[c][i];
      tmp_[c][i] = e * e * u_[c][i] + dt * e * k3_[c][i];
    }
  eval(t_ + dt, tmp_, k4_);
  bool finite = true;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      const Complex e = half_[c][i];
      const Complex next =
          e * e * u_[c][i] + dt / 6.0 * (e * e * k1_[c][i] + 2.0 * e * (k2_[c][i] + k3_[c][i]) + k4_[c][i]);
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) finite = false;
      u_[c][i] = next;
    }
  require(finite, ErrorCode::StepRejected,
          "non-finite half-wave after step at t = " + std::to_string(t_));
  t_ += dt;
}

UVSolver::UVSolver(const UVState& s, const Nonlinearity& nl)
    : grid_(s.grid()),
      M_(s.M),
      form_(s.formulation),
      nl_(nl),
      integ_(GridContext::get(s.grid()), {1.0, s.M},
             [this](double t, const std::vector<CVec>& u, std::vector<CVec>& f) { forcing(t, u, f); }) {
  require(s.M >= 1.0, ErrorCode::InvalidArgument, "M must be >= 1");
  const auto& ctx = integ_.context();
  auto spec = [&](const Field& f) { return transform(f, Space::fourier).values(); };
  std::vector<CVec> init;
  init.push_back(halfwave_from_fields(ctx, spec(s.U), spec(s.Ut), 1.0));
  init.push_back(halfwave_from_fields(ctx, spec(s.V), spec(s.Vt), s.M));
  integ_.reset(std::move(init), s.t);
}

void UVSolver::forcing(double, const std::vector<CVec>& u, std::vector<CVec>& f) {
  const auto& ctx = integ_.context();
  const std::size_t n = ctx.size();
  const double c = nl_.coefficient;
  if (c == 0.0) {
    for (auto& comp : f) std::fill(comp.begin(), comp.end(), Complex{});
    return;
  }
  fields_from_halfwave(ctx, u[0], 1.0, Uh_, Uth_);
  fields_from_halfwave(ctx, u[1], M_, Vh_, Vth_);
  to_physical_real(ctx, Uh_, U_, true);
  to_physical_real(ctx, Uth_, Ut_, true);
  to_physical_real(ctx, Vh_, V_, true);
  to_physical_real(ctx, Vth_, Vt_, true);
  fu_.assign(n, 0.0);
  fv_.assign(n, 0.0);
  const double m2 = M_ * M_;
  const double u2v = nl_.include_u2v ? 1.0 : 0.0;
  const double shift = nl_.exact_v_shift ? 1.0 : 0.0;
  switch (form_) {
    case Formulation::original:
      for (std::size_t i = 0; i < n; ++i) {
        const double U = U_[i].real(), V = V_[i].real();
        fu_[i] = U * V;
        fv_[i] = 0.5 * U * U;
      }
      break;
    case Formulation::rescaled:
    case Formulation::v_modified: {
      // Lorentzian square -Ut^2 + |grad U|^2.
      CVec dd(n);
      for (std::size_t i = 0; i < n; ++i) dd[i] = -Ut_[i].real() * Ut_[i].real();
      for (int a = 0; a < grid_.dim; ++a) {
        const auto& k = ctx.k_axis(a);
        g_.resize(n);
        for (std::size_t i = 0; i < n; ++i) g_[i] = Complex(0.0, k[i]) * Uh_[i];
        to_physical_real(ctx, g_, g_, true);
        for (std::size_t i = 0; i < n; ++i) dd[i] += g_[i].real() * g_[i].real();
      }
      // v_modified carries Ubar = M U, which rescales each term.
      const bool vm = form_ == Formulation::v_modified;
      const double iu2 = vm ? 1.0 / m2 : 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double U = U_[i].real(), V = V_[i].real();
        const double U2 = U * U;
        fu_[i] = U * V - 0.5 * U2 * U * iu2;
        fv_[i] = iu2 * (u2v * U2 * V - 0.5 * U2 * U2 * iu2 + dd[i].real() + shift * U2);
      }
      break;
    }
  }
  for (auto& z : fu_) z *= c;
  for (auto& z : fv_) z *= c;
  to_spectrum_dealiased(ctx, fu_);
  to_spectrum_dealiased(ctx, fv_);
  f[0] = fu_;
  f[1] = fv_;
}

void UVSolver::step(double dt) { integ_.step(dt); }

UVState UVSolver::state() const {
  const auto& ctx = integ_.context();
  CVec a, b, pa, pb;
  auto fields = [&](const CVec& up, double m) {
    fields_from_halfwave(ctx, up, m, a, b);
    to_physical_real(ctx, a, pa, false);
    to_physical_real(ctx, b, pb, false);
    return std::make_pair(Field(grid_, Space::physical, pa), Field(grid_, Space::physical, pb));
  };
  auto [U, Ut] = fields(integ_.state()[0], 1.0);
  auto [V, Vt] = fields(integ_.state()[1], M_);
  return {U, Ut, V, Vt, M_, integ_.time(), form_};
}

UVState step(const UVState& s, double dt, const Nonlinearity& nl) {
  UVSolver solver(s, nl);
  solver.step(dt);
  return solver.state();
}

double max_stable_dt(const GridSpec& grid, double M) {
  const double kmax = grid.dk() * (grid.n / 3) * std::sqrt(static_cast<double>(grid.dim));
  return 0.5 / std::sqrt(kmax * kmax + M * M);
}

double default_dt(const GridSpec& grid, double M) {
  return std::min(max_stable_dt(grid, M), 0.1 * grid.dx());
}

}  // namespace kgeft
