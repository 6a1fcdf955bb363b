#include "resonance/checks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace kgeft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Frame {
  Vec3 par, perp;
};

Frame frame_of(const Vec3& rho) {
  const double r = length(rho);
  const Vec3 e = r > 0.0 ? (1.0 / r) * rho : Vec3{1.0, 0.0, 0.0};
  const Vec3 a = std::abs(e[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const Vec3 p = a - dot(a, e) * e;
  return {e, (1.0 / length(p)) * p};
}

// First zero of phi along nu* + s dir, s > 0.
double ray_root(const PhaseSpec& spec, const Vec3& rho, const Vec3& origin, const Vec3& dir, double smax) {
  const double f0 = phase_eval(spec, rho, origin);
  if (f0 == 0.0) return 0.0;
  double lo = 0.0, flo = f0;
  for (double s = 1e-4; s < smax; s *= 1.02) {
    const double f = phase_eval(spec, rho, origin + s * dir);
    if ((f > 0.0) != (flo > 0.0) || f == 0.0) {
      double hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phase_eval(spec, rho, origin + mid * dir);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    lo = s;
    flo = f;
  }
  return kInf;
}

double log_uniform(std::mt19937_64& rng, double a, double b) {
  std::uniform_real_distribution<double> u(std::log(a), std::log(b));
  return std::exp(u(rng));
}

}  // namespace

double resonance_distance(const PhaseSpec& spec, const Vec3& rho, Vec3* nearest) {
  spec.validate();
  const Frame fr = frame_of(rho);
  const Vec3 origin = space_resonance_point(spec, rho);
  const double smax = 10.0 * (spec.M * spec.M + length(rho) * spec.M + 10.0);
  auto dir = [&](double th) { return std::cos(th) * fr.par + std::sin(th) * fr.perp; };
  auto dist = [&](double th) { return ray_root(spec, rho, origin, dir(th), smax); };

  constexpr int coarse = 361;
  const double step = std::numbers::pi / (coarse - 1);
  std::vector<std::pair<double, double>> d(coarse);
  for (int i = 0; i < coarse; ++i) d[i] = {dist(i * step), i * step};
  std::vector<std::pair<double, double>> seeds = d;
  std::sort(seeds.begin(), seeds.end());
  seeds.resize(9);

  double best = kInf, best_th = 0.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (const auto& [d0, th0] : seeds) {
    if (!std::isfinite(d0)) continue;
    double a = std::max(0.0, th0 - step), b = std::min(std::numbers::pi, th0 + step);
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = dist(c), fe = dist(e);
    for (int it = 0; it < 60; ++it) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - g * (b - a);
        fc = dist(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + g * (b - a);
        fe = dist(e);
      }
    }
    for (auto [v, th] : {std::pair{d0, th0}, std::pair{fc, c}, std::pair{fe, e}})
      if (v < best) {
        best = v;
        best_th = th;
      }
  }
  if (!std::isfinite(best))
    fail(ErrorCode::MinimizationFailed, "no ray from the space-resonant point meets {phi = 0}");
  if (nearest) *nearest = origin + best * dir(best_th);
  return best;
}

SeparationReport verify_separation(const std::vector<double>& M_list, const std::vector<Vec3>& rho_samples,
                                   std::array<int, 3> signs) {
  require(!rho_samples.empty(), ErrorCode::InvalidArgument, "need at least one rho sample");
  require(M_list.size() >= 2, ErrorCode::InvalidArgument, "need at least two M values");
  SeparationReport out;
  for (double M : M_list) {
    require(M >= 4.0, ErrorCode::InvalidArgument, "separation check needs M >= 4");
    const PhaseSpec spec = PhaseSpec::u(M, signs);
    double mn = kInf;
    for (const Vec3& rho : rho_samples) {
      SeparationSample s{M, rho, 0.0, {}};
      s.distance = resonance_distance(spec, rho, &s.nearest);
      mn = std::min(mn, s.distance);
      out.samples.push_back(s);
    }
    out.M.push_back(M);
    out.min_distance.push_back(mn);
  }
  out.fit = fit_power_law(out.M, out.min_distance);
  return out;
}

LowerBoundReport verify_lower_bounds(const std::vector<double>& M_list, std::size_t samples_per_M,
                                     std::uint64_t seed) {
  require(!M_list.empty() && samples_per_M > 0, ErrorCode::InvalidArgument, "empty lower-bound sweep");
  LowerBoundReport rep;
  SeedStream seeds(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t mi = 0; mi < M_list.size(); ++mi) {
    const double M = M_list[mi];
    require(M > 1.0, ErrorCode::InvalidArgument, "lower bounds need M > 1");
    const CutoffPartition part{PhaseSpec::u(M)};
    auto rng = seeds.stream(mi);
    LowerBoundRow row;
    row.M = M;
    row.inf_S = row.inf_T = kInf;
    for (std::size_t s = 0; s < samples_per_M; ++s) {
      // Reduced coordinates: rho on axis 0, nu in the (0, 1) plane.
      double r, par, perp;
      const double pick = u01(rng);
      if (pick < 0.2) {  // low-frequency box
        r = 2.0 * u01(rng);
        par = -4.0 + 8.0 * u01(rng);
        perp = 4.0 * u01(rng);
      } else if (pick < 0.6) {  // parallel box around nu*
        r = log_uniform(rng, 0.5, 1e4 * M);
        const double w = 0.5 * japanese(r / M);
        par = r * M / (M - 1.0) + w * (2.0 * u01(rng) - 1.0);
        perp = 2.0 * u01(rng);
      } else {  // everywhere else
        r = log_uniform(rng, 1e-3, 1e3 * M);
        const double ext = r + 4.0 * M;
        par = ext * (2.0 * u01(rng) - 1.0);
        perp = ext * u01(rng);
      }
      const Vec3 rho{r, 0.0, 0.0}, nu{par, perp, 0.0};
      const double cs = part.chi_S(rho, nu), ct = part.chi_T(rho, nu);
      row.partition_defect = std::max(row.partition_defect, std::abs(cs + ct - 1.0));
      row.range_min = std::min({row.range_min, cs, ct});
      row.range_max = std::max({row.range_max, cs, ct});
      const double jd = japanese(rho - nu);
      if (cs > 0.01) {
        ++row.count_S;
        const double v = std::abs(phase_eval(part.phase, rho, nu)) * jd / M;
        if (v < row.inf_S) {
          row.inf_S = v;
          row.argmin_rho_S = rho;
          row.argmin_nu_S = nu;
        }
      }
      if (ct > 0.01) {
        ++row.count_T;
        const double jn = japanese(length(nu) / M);
        const double v = length(grad_phase_eval(part.phase, rho, nu)) * std::min(jd * jd, jn * jn);
        row.inf_T = std::min(row.inf_T, v);
      }
    }
    if (row.count_S == 0 || row.count_T == 0)
      fail(ErrorCode::SupportSamplingEmpty, "no samples landed in the support of chi_S or chi_T");
    rep.rows.push_back(row);
  }
  double minS = kInf, maxS = 0.0, minT = kInf, maxT = 0.0;
  for (const auto& r : rep.rows) {
    minS = std::min(minS, r.inf_S);
    maxS = std::max(maxS, r.inf_S);
    minT = std::min(minT, r.inf_T);
    maxT = std::max(maxT, r.inf_T);
  }
  rep.c_S = minS;
  rep.c_T = minT;
  rep.stability_S = minS > 0.0 ? maxS / minS : kInf;
  rep.stability_T = minT > 0.0 ? maxT / minT : kInf;
  rep.pass_S = minS > 0.0 && rep.stability_S <= 3.0;
  rep.pass_T = minT > 0.0 && rep.stability_T <= 3.0;
  return rep;
}

double symbol_derivative(const BilinearSymbol& m, const Vec3& nu1, const Vec3& nu2, int variable, int order) {
  require(variable == 1 || variable == 2, ErrorCode::InvalidArgument, "variable must be 1 or 2");
  require(order >= 0 && order <= 3, ErrorCode::InvalidArgument, "derivative order must be 0..3");
  const Vec3& base = variable == 1 ? nu1 : nu2;
  const double h = 1e-3 * (1.0 + length(base));
  auto f = [&](int j) {
    Vec3 a = nu1, b = nu2;
    (variable == 1 ? a : b)[0] += j * h;
    const Complex v = m(a, b);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorCode::StencilOutOfRange, "symbol is not finite on the difference stencil");
    return v;
  };
  Complex d;
  switch (order) {
    case 0: d = f(0); break;
    case 1: d = (f(1) - f(-1)) / (2.0 * h); break;
    case 2: d = (f(1) - 2.0 * f(0) + f(-1)) / (h * h); break;
    default: d = (f(2) - 2.0 * f(1) + 2.0 * f(-1) - f(-2)) / (2.0 * h * h * h); break;
  }
  return std::abs(d);
}

double symbolic_envelope(const BilinearSymbol& m, const Vec3& nu1, const Vec3& nu2, int variable, int order) {
  using D = BilinearSymbol::Descriptor;
  const double M = m.M();
  const double j1 = japanese(nu1), j2 = japanese(nu2);
  const double jk = variable == 1 ? j1 : j2;
  double env = 0.0;
  // Derivatives falling on the cutoff are O(1), so the estimate for the
  // product is the sum of the lower-order estimates for the singular factor.
  for (int b = 0; b <= order; ++b) {
    switch (m.descriptor) {
      case D::chiS_over_phi:
        env += variable == 1 ? std::pow(j2, 2 * b + 1) / (M * std::pow(j1, b))
                             : std::pow(j2 / M, b + 1);
        break;
      case D::chiT_gradphi_over_gradphisq: {
        const double mn = std::min(j2, japanese(length(nu1) / M));
        env += std::pow(mn, 2 * b + 2) / std::pow(jk, b);
        break;
      }
      default: env = 1.0; break;
    }
  }
  return env;
}

SymbolicBoundReport verify_symbolic_bounds(const SymbolFamily& family, int max_order,
                                           const std::vector<double>& M_list, std::size_t samples_per_M,
                                           std::uint64_t seed) {
  using D = BilinearSymbol::Descriptor;
  require(max_order >= 0 && max_order <= 3, ErrorCode::InvalidArgument, "orders up to 3");
  require(!M_list.empty() && samples_per_M > 0, ErrorCode::InvalidArgument, "empty symbol sweep");
  SymbolicBoundReport rep;
  SeedStream seeds(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t mi = 0; mi < M_list.size(); ++mi) {
    const double M = M_list[mi];
    const BilinearSymbol m = family(M);
    auto rng = seeds.stream(mi);
    std::vector<SymbolicBoundRow> rows;
    for (int v = 1; v <= 2; ++v)
      for (int o = 0; o <= max_order; ++o) rows.push_back({M, v, o, 0.0, 0});
    std::size_t got = 0;
    for (std::size_t attempt = 0; got < samples_per_M; ++attempt) {
      if (attempt > 200 * samples_per_M)
        fail(ErrorCode::SupportSamplingEmpty, "could not place samples in the symbol support");
      double rho = 0.0, nu = 0.0;
      const double sgn = u01(rng) < 0.5 ? -1.0 : 1.0;
      if (m.descriptor == D::chiS_over_phi) {
        if (u01(rng) < 0.3) {
          rho = -2.0 + 4.0 * u01(rng);
          nu = -4.0 + 8.0 * u01(rng);
        } else {
          rho = sgn * log_uniform(rng, 1.0, M);
          nu = rho * M / (M - 1.0) + 0.5 * japanese(rho / M) * (2.0 * u01(rng) - 1.0);
        }
      } else if (m.descriptor == D::chiT_gradphi_over_gradphisq) {
        rho = sgn * log_uniform(rng, 1e-2, M);
        nu = 3.0 * M * (2.0 * u01(rng) - 1.0);
      } else {
        rho = -10.0 + 20.0 * u01(rng);
        nu = -10.0 + 20.0 * u01(rng);
      }
      const Vec3 n1{nu, 0.0, 0.0}, n2{rho - nu, 0.0, 0.0}, r{rho, 0.0, 0.0};
      if (m.partition) {
        const double c = m.descriptor == D::chiS_over_phi ? m.partition->chi_S(r, n1) : m.partition->chi_T(r, n1);
        if (c <= 0.01) continue;
      }
      ++got;
      for (auto& row : rows) {
        const double ratio = symbol_derivative(m, n1, n2, row.variable, row.order) /
                             symbolic_envelope(m, n1, n2, row.variable, row.order);
        row.sup_ratio = std::max(row.sup_ratio, ratio);
        ++row.samples;
      }
    }
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  rep.stability = 1.0;
  for (int v = 1; v <= 2; ++v)
    for (int o = 0; o <= max_order; ++o) {
      double lo = kInf, hi = 0.0;
      for (const auto& r : rep.rows)
        if (r.variable == v && r.order == o) {
          lo = std::min(lo, r.sup_ratio);
          hi = std::max(hi, r.sup_ratio);
        }
      if (hi > 0.0) rep.stability = std::max(rep.stability, lo > 0.0 ? hi / lo : kInf);
    }
  rep.stable = rep.stability <= 5.0;
  return rep;
}

std::vector<SheetRow> resonance_sheet(const PhaseSpec& spec, double rho_mag, int resolution) {
  require(resolution >= 2, ErrorCode::InvalidArgument, "sheet resolution must be >= 2");
  const CutoffPartition part{spec};
  const Vec3 rho{rho_mag, 0.0, 0.0};
  const double W = std::max(8.0, 2.0 * std::abs(rho_mag) * spec.M / (spec.M - 1.0) + 4.0);
  std::vector<SheetRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const double par = -W + 2.0 * W * i / (resolution - 1);
      const double perp = W * j / (resolution - 1);
      const Vec3 nu{par, perp, 0.0};
      rows.push_back({par, perp, phase_eval(spec, rho, nu), length(grad_phase_eval(spec, rho, nu)),
                      part.chi_S(rho, nu)});
    }
  return rows;
}

void write_sheet_csv(const std::string& path, const std::vector<SheetRow>& rows) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write " + path);
  os.precision(17);
  os << "nu_par,nu_perp,phi,grad_phi_norm,chi_S\n";
  for (const auto& r : rows)
    os << r.nu_par << ',' << r.nu_perp << ',' << r.phi << ',' << r.grad_norm << ',' << r.chi_S << '\n';
  if (!os) fail(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace kgeft
