#include "propagators/propagators.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "common/error.hpp"

namespace kgeft {

HalfWavePair to_halfwaves(const Field& U, const Field& Ut, double m, double t) {
  require_same_grid(U, Ut);
  const auto& ctx = U.context();
  Field Uh = transform(U, Space::fourier);
  Field Vh = transform(Ut, Space::fourier);
  const auto sym = ctx.bessel_symbol(1.0, m);
  CVec p(U.size()), q(U.size());
  const Complex I(0.0, 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = Vh[i] + I * sym[i] * Uh[i];
    q[i] = Vh[i] - I * sym[i] * Uh[i];
  }
  return {transform(Field(U.grid(), Space::fourier, std::move(p)), Space::physical),
          transform(Field(U.grid(), Space::fourier, std::move(q)), Space::physical), m, t};
}

std::pair<Field, Field> from_halfwaves(const HalfWavePair& w) {
  require_same_grid(w.plus, w.minus);
  const auto& ctx = w.plus.context();
  Field ph = transform(w.plus, Space::fourier);
  Field mh = transform(w.minus, Space::fourier);
  const auto sym = ctx.bessel_symbol(1.0, w.mass);
  CVec u(ph.size()), ut(ph.size());
  const Complex I(0.0, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = (ph[i] - mh[i]) / (2.0 * I * sym[i]);
    ut[i] = 0.5 * (ph[i] + mh[i]);
  }
  return {transform(Field(w.plus.grid(), Space::fourier, std::move(u)), Space::physical),
          transform(Field(w.plus.grid(), Space::fourier, std::move(ut)), Space::physical)};
}

Field linear_flow(const Field& w, double m, int sign, double t) {
  require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "flow sign must be +1 or -1");
  if (t == 0.0) return w;
  Field wh = transform(w, Space::fourier);
  const auto sym = w.context().bessel_symbol(1.0, m);
  CVec v = wh.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, sign * sym[i] * t);
  return transform(Field(w.grid(), Space::fourier, std::move(v)), w.space());
}

ProfileSet make_profiles(const Field& U, const Field& Ut, const Field& V, const Field& Vt, double M,
                         double t) {
  auto u = to_halfwaves(U, Ut, 1.0, t);
  auto v = to_halfwaves(V, Vt, M, t);
  return {linear_flow(u.plus, 1.0, -1, t), linear_flow(u.minus, 1.0, +1, t),
          linear_flow(v.plus, M, -1, t), linear_flow(v.minus, M, +1, t), t, M};
}

double support_radius(std::initializer_list<const Field*> fields) {
  double peak = 0.0;
  std::vector<Field> phys;
  for (const Field* f : fields) {
    phys.push_back(transform(*f, Space::physical));
    for (const auto& z : phys.back().values()) peak = std::max(peak, std::abs(z));
  }
  if (peak == 0.0) return 0.0;
  double r = 0.0;
  for (const auto& f : phys) {
    const auto& ctx = f.context();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (std::abs(f[i]) <= 1e-10 * peak) continue;
      double rr = 0.0;
      for (int a = 0; a < f.grid().dim; ++a) rr += ctx.x_axis(a)[i] * ctx.x_axis(a)[i];
      r = std::max(r, std::sqrt(rr));
    }
  }
  return r;
}

ExponentFit measure_decay(const Field& U0, const Field& U1, double m, const std::vector<double>& times,
                          double p, const DecayOptions& opts) {
  require_same_grid(U0, U1);
  require(!times.empty(), ErrorCode::InvalidArgument, "measure_decay needs sample times");
  const double tmax = *std::max_element(times.begin(), times.end());
  const double R = support_radius({&U0, &U1});
  const double L = U0.grid().length;
  require(L >= 2.0 * (R + tmax), ErrorCode::CausalityBudgetExceeded,
          "box length " + std::to_string(L) + " below causality budget 2(R+T) = " +
              std::to_string(2.0 * (R + tmax)));
  const auto& ctx = U0.context();
  Field up = transform(to_halfwaves(U0, U1, m).plus, Space::fourier);
  const auto sym = ctx.bessel_symbol(1.0, m);
  std::vector<double> ts, ys;
  CVec w(up.size());
  for (double t : times) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = up[i] * std::polar(1.0, sym[i] * t);
    ts.push_back(t);
    ys.push_back(wkp_norm_spectrum(ctx, w, opts.k, p, m));
  }
  const auto window = opts.window.value_or(std::make_pair(2.0 * m, INFINITY));
  ExponentFit fit = fit_power_law(ts, ys, window);
  // Keep the whole curve for plotting; the fit itself only used the window.
  fit.samples.clear();
  for (std::size_t i = 0; i < ts.size(); ++i) fit.samples.emplace_back(ts[i], ys[i]);
  return fit;
}

std::vector<std::pair<double, double>> local_decay_slopes(const ExponentFit& fit) {
  std::vector<std::pair<double, double>> out;
  const auto& s = fit.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double dl = std::log(s[i + 1].first) - std::log(s[i - 1].first);
    const double dy = std::log(s[i + 1].second) - std::log(s[i - 1].second);
    out.emplace_back(s[i].first, dy / dl);
  }
  return out;
}

namespace {

template <class F>
double adaptive(F f, double a, double b) {
  if (b <= a) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-12,
                                                                                 &err, &l1);
  require(std::isfinite(v) && err <= 1e-7 * std::max(l1, 1e-300), ErrorCode::QuadratureFailure,
          "adaptive quadrature did not reach tolerance on [" + std::to_string(a) + ", " +
              std::to_string(b) + "]");
  return v;
}

double jp(double x) { return std::sqrt(1.0 + x * x); }

// Sum of adaptive pieces over sorted breakpoints inside [a, b].
template <class F>
double piecewise(F f, double a, double b, std::vector<double> cuts) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::clamp(cuts[i], a, b), hi = std::clamp(cuts[i + 1], a, b);
    acc += adaptive(f, lo, hi);
  }
  return acc;
}

}  // namespace

double integral_independent(double alpha, double beta, double t) {
  auto f = [=](double s) { return std::pow(s, -alpha) * std::pow(jp(t - s), -beta); };
  return piecewise(f, 1.0, t, {t - 1.0, 0.5 * (1.0 + t)});
}

double integral_dependent(double alpha, double beta, double M, double t) {
  auto f = [=](double s) { return std::pow(s, -alpha) * std::pow(jp((t - s) / M), -beta); };
  return piecewise(f, 1.0, t, {t - M, t - 1.0, 0.5 * (1.0 + t)});
}

IntegralReport verify_integral_estimates(double alpha, double beta, double M,
                                         const std::vector<double>& t_grid) {
  require(alpha > 0 && beta > 0, ErrorCode::InvalidArgument, "alpha and beta must be positive");
  require(M >= 1.0, ErrorCode::InvalidArgument, "M must be >= 1");
  IntegralReport r;
  r.alpha = alpha;
  r.beta = beta;
  r.M = M;
  if (alpha < 1 && beta < 1) {
    r.independent_case = "t^(1-a-b)";
    r.dependent_case = "t^(1-a)<t/M>^(-b)";
  } else if (beta >= alpha && beta > 1) {
    r.independent_case = "t^(-a)";
    r.dependent_case = "max(<t/M>^(-b), <t/M>^(-1) t^(1-a))";
  } else if (alpha >= beta && alpha > 1) {
    r.independent_case = "t^(-b)";
    r.dependent_case = "<t/M>^(-b)";
  } else {
    r.independent_case = "uncovered";
    r.dependent_case = "uncovered";
  }
  const double mpref = std::pow(M, std::min(1.0 - alpha, 0.0));
  for (double t : t_grid) {
    require(t >= 1.0, ErrorCode::InvalidArgument, "t grid must start at 1");
    IntegralSample a{t, integral_independent(alpha, beta, t), 0.0, 0.0};
    IntegralSample b{t, integral_dependent(alpha, beta, M, t), 0.0, 0.0};
    const double tm = jp(t / M);
    if (r.independent_case == "t^(1-a-b)") {
      a.envelope = std::pow(t, 1.0 - alpha - beta);
      b.envelope = mpref * std::pow(t, 1.0 - alpha) * std::pow(tm, -beta);
    } else if (r.independent_case == "t^(-a)") {
      a.envelope = std::pow(t, -alpha);
      b.envelope = mpref * std::max(std::pow(tm, -beta), std::pow(tm, -1.0) * std::pow(t, 1.0 - alpha));
    } else if (r.independent_case == "t^(-b)") {
      a.envelope = std::pow(t, -beta);
      b.envelope = mpref * std::pow(tm, -beta);
    }
    if (a.envelope > 0) a.ratio = a.integral / a.envelope;
    if (b.envelope > 0) b.ratio = b.integral / b.envelope;
    r.sup_ratio_independent = std::max(r.sup_ratio_independent, a.ratio);
    r.sup_ratio_dependent = std::max(r.sup_ratio_dependent, b.ratio);
    r.independent.push_back(a);
    r.dependent.push_back(b);
  }
  return r;
}

}  // namespace kgeft
