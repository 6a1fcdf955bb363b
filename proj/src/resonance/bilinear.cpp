#include "resonance/bilinear.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace kgeft {

BilinearSymbol BilinearSymbol::one() {
  BilinearSymbol s;
  s.descriptor = Descriptor::one;
  s.evaluator = [](const Vec3&, const Vec3&) { return Complex(1.0, 0.0); };
  return s;
}

BilinearSymbol BilinearSymbol::chiS_over_phi(const CutoffPartition& p) {
  BilinearSymbol s;
  s.descriptor = Descriptor::chiS_over_phi;
  s.partition = p;
  s.evaluator = [p](const Vec3& nu1, const Vec3& nu2) {
    const Vec3 rho = nu1 + nu2;
    const double c = p.chi_S(rho, nu1);
    if (c == 0.0) return Complex(0.0, 0.0);
    return c / Complex(0.0, phase_eval(p.phase, rho, nu1));
  };
  return s;
}

BilinearSymbol BilinearSymbol::chiT_gradphi_over_gradphisq(const CutoffPartition& p, int component) {
  require(component >= 0 && component < 3, ErrorCode::InvalidArgument, "component must be 0, 1 or 2");
  BilinearSymbol s;
  s.descriptor = Descriptor::chiT_gradphi_over_gradphisq;
  s.partition = p;
  s.component = component;
  s.evaluator = [p, component](const Vec3& nu1, const Vec3& nu2) {
    const Vec3 rho = nu1 + nu2;
    const double c = p.chi_T(rho, nu1);
    if (c == 0.0) return Complex(0.0, 0.0);
    const Vec3 g = grad_phase_eval(p.phase, rho, nu1);
    return Complex(c * g[component] / dot(g, g), 0.0);
  };
  return s;
}

BilinearSymbol BilinearSymbol::custom(Evaluator fn, SingularSet singular) {
  require(static_cast<bool>(fn), ErrorCode::InvalidArgument, "custom symbol needs an evaluator");
  BilinearSymbol s;
  s.descriptor = Descriptor::custom;
  s.evaluator = std::move(fn);
  s.singular = std::move(singular);
  return s;
}

const char* to_string(BilinearSymbol::Descriptor d) {
  switch (d) {
    case BilinearSymbol::Descriptor::one: return "one";
    case BilinearSymbol::Descriptor::chiS_over_phi: return "chiS_over_phi";
    case BilinearSymbol::Descriptor::chiT_gradphi_over_gradphisq: return "chiT_gradphi_over_gradphisq";
    case BilinearSymbol::Descriptor::custom: return "custom";
  }
  return "?";
}

namespace {

constexpr std::size_t kTableLimit = std::size_t{1} << 22;

void check_size(const GridSpec& g) {
  const int limit = g.dim == 1 ? 512 : g.dim == 2 ? 64 : 16;
  if (g.n > limit)
    fail(ErrorCode::GridTooLarge, "bilinear operator limited to n <= " + std::to_string(limit) +
                                      " per axis in " + std::to_string(g.dim) + "D");
}

}  // namespace

BilinearOperator::BilinearOperator(BilinearSymbol symbol, const GridSpec& grid)
    : symbol_(std::move(symbol)), grid_(grid) {
  grid_.validate();
  check_size(grid_);
  require(static_cast<bool>(symbol_.evaluator), ErrorCode::InvalidArgument, "symbol has no evaluator");
  ctx_ = GridContext::get(grid_);
  const std::size_t n = ctx_->size();
  freq_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) freq_[i][a] = a < grid_.dim ? ctx_->k_axis(a)[i] : 0.0;

  const bool cache = n * n <= kTableLimit;
  if (cache) table_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (symbol_.singular && symbol_.singular(freq_[i], freq_[j]))
        fail(ErrorCode::InvalidArgument, "custom symbol is singular on the frequency lattice");
      if (cache) {
        const Complex v = symbol_.evaluator(freq_[i], freq_[j]);
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorCode::InvalidArgument,
                "symbol is not finite on the frequency lattice");
        table_[i * n + j] = v;
      }
    }
}

Complex BilinearOperator::symbol_at(std::size_t i, std::size_t j) const {
  if (!table_.empty()) return table_[i * ctx_->size() + j];
  return symbol_.evaluator(freq_[i], freq_[j]);
}

std::size_t BilinearOperator::wrapped_difference(std::size_t i_rho, std::size_t i_nu) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n);
  std::size_t out = 0;
  std::size_t a = i_rho, b = i_nu, stride = 1;
  for (int d = 0; d < grid_.dim; ++d) {
    const std::size_t ia = a % n, ib = b % n;
    out += ((ia + n - ib) % n) * stride;
    a /= n;
    b /= n;
    stride *= n;
  }
  return out;
}

Field BilinearOperator::apply(const Field& f, const Field& g) const {
  require(f.grid() == grid_ && g.grid() == grid_, ErrorCode::GridMismatch,
          "bilinear operator inputs must share the operator grid");
  const Field fs = f.to(Space::fourier), gs = g.to(Space::fourier);
  const CVec& fh = fs.values();
  const CVec& gh = gs.values();
  const std::size_t n = ctx_->size();
  const double norm = std::pow(grid_.length, -grid_.dim);
  CVec out(n);
  for (std::size_t r = 0; r < n; ++r) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fh[i] == 0.0) continue;
      const std::size_t j = wrapped_difference(r, i);
      if (gh[j] == 0.0) continue;
      acc += symbol_at(i, j) * fh[i] * gh[j];
    }
    out[r] = acc * norm;
  }
  return Field(grid_, Space::fourier, std::move(out)).to(Space::physical);
}

Field bilinear_apply(const BilinearSymbol& symbol, const Field& f, const Field& g) {
  check_size(f.grid());
  require_same_grid(f, g);
  return BilinearOperator(symbol, f.grid()).apply(f, g);
}

void MultiplierNorms::validate() const {
  auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
  for (double e : {r, p, q, pbar, qbar})
    require(e >= 1.0, ErrorCode::InvalidHolderTriple, "Lebesgue exponents must lie in [1, inf]");
  if (std::abs(inv(r) - inv(p) - inv(q)) > 1e-12 || std::abs(inv(r) - inv(pbar) - inv(qbar)) > 1e-12)
    fail(ErrorCode::InvalidHolderTriple, "Hoelder relation 1/r = 1/p + 1/q violated");
  require(k >= 0.0 && a >= 0.0 && mass >= 1.0, ErrorCode::InvalidArgument,
          "regularities must be non-negative and mass >= 1");
}

double multiplier_ratio(const BilinearOperator& op, const Field& f, const Field& g,
                        const MultiplierNorms& s) {
  const Field t = op.apply(f, g);
  const double lhs = norm(t, NormSpec::wkp(s.k, s.r, s.mass));
  const double rhs = norm(f, NormSpec::wkp(s.a, s.p, s.mass)) * norm(g, NormSpec::wkp(s.k, s.q, s.mass)) +
                     norm(f, NormSpec::wkp(s.k, s.pbar, s.mass)) * norm(g, NormSpec::wkp(s.a, s.qbar, s.mass));
  require(rhs > 0.0, ErrorCode::InvalidArgument, "multiplier ratio needs non-zero inputs");
  return lhs / rhs;
}

Field random_bandlimited_field(const GridSpec& grid, std::mt19937_64& rng) {
  auto ctx = GridContext::get(grid);
  const double kmax = grid.dk() * grid.n / 3.0;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double center = kmax * uni(rng);
  const double width = kmax * (0.02 + 0.5 * uni(rng));
  const std::size_t n = ctx->size();
  CVec c(n);
  const auto& mask = ctx->dealias_mask();
  for (std::size_t i = 0; i < n; ++i) {
    const double re = gauss(rng), im = gauss(rng);
    if (!mask[i]) continue;
    const double dk = (std::sqrt(ctx->k2()[i]) - center) / width;
    c[i] = Complex(re, im) * std::exp(-0.5 * dk * dk);
  }
  const auto& mir = ctx->mirror();
  CVec h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = 0.5 * (c[i] + std::conj(c[mir[i]]));
  return Field(grid, Space::fourier, std::move(h)).to(Space::physical);
}

Field wave_packet(const GridSpec& grid, const Vec3& center, double width) {
  require(width > 0.0, ErrorCode::InvalidArgument, "wave packet width must be positive");
  auto ctx = GridContext::get(grid);
  const std::size_t n = ctx->size();
  CVec h(n);
  const auto& mask = ctx->dealias_mask();
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    double dp = 0.0, dm = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double k = ctx->k_axis(a)[i];
      dp += (k - center[a]) * (k - center[a]);
      dm += (k + center[a]) * (k + center[a]);
    }
    h[i] = std::exp(-0.5 * dp / (width * width)) + std::exp(-0.5 * dm / (width * width));
  }
  return Field(grid, Space::fourier, std::move(h)).to(Space::physical);
}

OperatorNormEstimate estimate_operator_norm(const BilinearSymbol& symbol, const GridSpec& grid,
                                            const MultiplierNorms& norms, int trials,
                                            std::uint64_t seed) {
  norms.validate();
  require(trials > 0, ErrorCode::InvalidArgument, "trials must be positive");
  BilinearOperator op(symbol, grid);
  SeedStream seeds(seed);
  OperatorNormEstimate out;
  for (int t = 0; t < trials; ++t) {
    auto rng = seeds.stream(static_cast<std::uint64_t>(t));
    Field f, g;
    if (t % 2 == 1 && symbol.partition) {
      // Packets sitting on nu = nu*(rho), where chi_S / phi peaks.
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double M = symbol.M();
      const double kmax = grid.dk() * grid.n / 3.0;
      const double rho = (0.05 + 0.45 * u01(rng)) * kmax * (M - 1.0) / M;
      const double width = grid.dk() * (1.0 + 8.0 * u01(rng));
      Vec3 r{rho, 0.0, 0.0};
      const Vec3 nus = space_resonance_point(symbol.partition->phase, r);
      f = wave_packet(grid, nus, width);
      g = wave_packet(grid, r - nus, width);
    } else {
      f = random_bandlimited_field(grid, rng);
      g = random_bandlimited_field(grid, rng);
    }
    const double r = multiplier_ratio(op, f, g, norms);
    out.ratios.push_back(r);
    out.sup_ratio = std::max(out.sup_ratio, r);
  }
  return out;
}

}  // namespace kgeft
