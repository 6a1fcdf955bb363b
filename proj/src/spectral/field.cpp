#include "spectral/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "common/error.hpp"

namespace kgeft {

Field::Field(const GridSpec& grid, Space space, CVec values)
    : grid_(grid), space_(space), values_(std::move(values)), ctx_(GridContext::get(grid)) {
  require(values_.size() == grid_.size(), ErrorCode::GridMismatch,
          "field sample count does not match grid");
}

Field Field::zeros(const GridSpec& grid, Space space) {
  grid.validate();
  return Field(grid, space, CVec(grid.size(), Complex{}));
}

Field Field::sample(const GridSpec& grid,
                    const std::function<Complex(std::span<const double>)>& fn) {
  auto ctx = GridContext::get(grid);
  CVec v(grid.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int a = 0; a < grid.dim; ++a) x[a] = ctx->x_axis(a)[i];
    v[i] = fn(std::span<const double>(x.data(), grid.dim));
  }
  return Field(grid, Space::physical, std::move(v));
}

Field Field::to(Space target) const { return transform(*this, target); }

Field transform(const Field& f, Space target) {
  if (f.space() == target) return f;
  CVec out(f.size());
  if (target == Space::fourier) {
    f.context().forward(f.values(), out);
  } else {
    f.context().inverse(f.values(), out);
  }
  return Field(f.grid(), target, std::move(out));
}

namespace {
Field apply_symbol(const Field& f, const std::vector<double>& symbol) {
  Field fh = transform(f, Space::fourier);
  CVec v = fh.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= symbol[i];
  return transform(Field(f.grid(), Space::fourier, std::move(v)), f.space());
}
}  // namespace

Field bessel_potential(const Field& f, double s, double mass) {
  return apply_symbol(f, f.context().bessel_symbol(s, mass));
}

bool same_grid(const Field& a, const Field& b) { return a.grid() == b.grid(); }

void require_same_grid(const Field& a, const Field& b) {
  require(same_grid(a, b), ErrorCode::GridMismatch, "fields live on different grids");
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field bb = transform(b, a.space());
  CVec v = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += bb[i];
  return Field(a.grid(), a.space(), std::move(v));
}

Field operator-(const Field& a, const Field& b) { return a + Complex(-1.0) * b; }

Field operator*(Complex c, const Field& a) {
  CVec v = a.values();
  for (auto& z : v) z *= c;
  return Field(a.grid(), a.space(), std::move(v));
}

Field conj(const Field& a) {
  Field p = transform(a, Space::physical);
  CVec v = p.values();
  for (auto& z : v) z = std::conj(z);
  return transform(Field(a.grid(), Space::physical, std::move(v)), a.space());
}

Field real_part(const Field& a) {
  Field p = transform(a, Space::physical);
  CVec v = p.values();
  for (auto& z : v) z = z.real();
  return transform(Field(a.grid(), Space::physical, std::move(v)), a.space());
}

Field dealias(const Field& a) {
  Field fh = transform(a, Space::fourier);
  CVec v = fh.values();
  const auto& mask = a.context().dealias_mask();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!mask[i]) v[i] = 0.0;
  return transform(Field(a.grid(), Space::fourier, std::move(v)), a.space());
}

Field dealiased_product(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field ap = transform(dealias(a), Space::physical);
  Field bp = transform(dealias(b), Space::physical);
  CVec v(ap.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ap[i] * bp[i];
  return transform(dealias(Field(a.grid(), Space::physical, std::move(v))), Space::physical);
}

Field laplacian(const Field& a) {
  std::vector<double> sym = a.context().k2();
  for (auto& s : sym) s = -s;
  return apply_symbol(a, sym);
}

Field partial(const Field& a, int axis) {
  require(axis >= 0 && axis < a.grid().dim, ErrorCode::InvalidArgument, "axis out of range");
  Field fh = transform(a, Space::fourier);
  CVec v = fh.values();
  const auto& k = a.context().k_axis(axis);
  const int n = a.grid().n;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // The Nyquist mode has no real derivative; drop it.
    const double kk = std::abs(k[i] * a.grid().length / (2.0 * std::numbers::pi) + n / 2.0) < 0.5 ? 0.0 : k[i];
    v[i] *= Complex(0.0, kk);
  }
  return transform(Field(a.grid(), Space::fourier, std::move(v)), a.space());
}

double hermitian_defect(const Field& f) {
  Field fh = transform(f, Space::fourier);
  const auto& mirror = f.context().mirror();
  double scale = 0.0, defect = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    scale = std::max(scale, std::abs(fh[i]));
    defect = std::max(defect, std::abs(fh[i] - std::conj(fh[mirror[i]])));
  }
  return scale > 0 ? defect / scale : 0.0;
}

void NormSpec::validate() const {
  require(std::isfinite(regularity) && regularity >= 0.0, ErrorCode::InvalidArgument,
          "norm regularity must be finite and >= 0");
  require(p >= 1.0 && !std::isnan(p), ErrorCode::InvalidArgument,
          "lebesgue exponent must lie in [1, inf]");
  require(mass > 0 && std::isfinite(mass), ErrorCode::InvalidArgument, "norm mass must be positive");
}

double hs_norm_spectrum(const GridContext& ctx, std::span<const Complex> fhat, double s,
                        double mass) {
  const auto& k2 = ctx.k2();
  const double m2 = mass * mass;
  double acc = 0.0;
  if (s == 0.0) {
    for (std::size_t i = 0; i < fhat.size(); ++i) acc += std::norm(fhat[i]);
  } else {
    for (std::size_t i = 0; i < fhat.size(); ++i) acc += std::pow(k2[i] + m2, s) * std::norm(fhat[i]);
  }
  return std::sqrt(acc / std::pow(ctx.grid().length, ctx.grid().dim));
}

double lp_norm_physical(const GridContext& ctx, std::span<const Complex> f, double p) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& z : f) mx = std::max(mx, std::abs(z));
    return mx;
  }
  const double w = std::pow(ctx.grid().dx(), ctx.grid().dim);
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& z : f) acc += std::norm(z);
    return std::sqrt(w * acc);
  }
  // Scale by the max to keep pow() in range for large p.
  double mx = 0.0;
  for (const auto& z : f) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return 0.0;
  for (const auto& z : f) acc += std::pow(std::abs(z) / mx, p);
  return mx * std::pow(w * acc, 1.0 / p);
}

double wkp_norm_spectrum(const GridContext& ctx, std::span<const Complex> fhat, double k, double p,
                         double mass) {
  CVec g(fhat.begin(), fhat.end());
  if (k != 0.0) {
    const auto sym = ctx.bessel_symbol(k, mass);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= sym[i];
  }
  ctx.inverse(g, g);
  return lp_norm_physical(ctx, g, p);
}

bool supported_in_half_box(const GridContext& ctx, std::span<const Complex> f) {
  const double quarter = 0.25 * ctx.grid().length;
  double mx = 0.0;
  for (const auto& z : f) mx = std::max(mx, std::abs(z));
  if (mx == 0.0) return true;
  const double thresh = 1e-10 * mx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool outside = false;
    for (int a = 0; a < ctx.grid().dim; ++a)
      if (std::abs(ctx.x_axis(a)[i]) > quarter) outside = true;
    if (outside && std::abs(f[i]) > thresh) return false;
  }
  return true;
}

double weighted_hs_norm_physical(const GridContext& ctx, std::span<const Complex> f, double s,
                                 double mass) {
  require(supported_in_half_box(ctx, f), ErrorCode::UnsupportedWeight,
          "weighted norm requested for a field reaching the outer half of the box");
  double acc = 0.0;
  CVec g(f.size());
  for (int a = 0; a < ctx.grid().dim; ++a) {
    const auto& x = ctx.x_axis(a);
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = x[i] * f[i];
    ctx.forward(g, g);
    const double h = hs_norm_spectrum(ctx, g, s, mass);
    acc += h * h;
  }
  return std::sqrt(acc);
}

double norm(const Field& f, const NormSpec& spec) {
  spec.validate();
  const auto& ctx = f.context();
  switch (spec.kind) {
    case NormSpec::Kind::Hs: {
      Field fh = transform(f, Space::fourier);
      return hs_norm_spectrum(ctx, fh.values(), spec.regularity, spec.mass);
    }
    case NormSpec::Kind::Wkp: {
      if (spec.regularity == 0.0) {
        Field fp = transform(f, Space::physical);
        return lp_norm_physical(ctx, fp.values(), spec.p);
      }
      Field fh = transform(f, Space::fourier);
      return wkp_norm_spectrum(ctx, fh.values(), spec.regularity, spec.p, spec.mass);
    }
    case NormSpec::Kind::weightedHs: {
      Field fp = transform(f, Space::physical);
      return weighted_hs_norm_physical(ctx, fp.values(), spec.regularity, spec.mass);
    }
  }
  fail(ErrorCode::Internal, "unknown norm kind");
}

}  // namespace kgeft
