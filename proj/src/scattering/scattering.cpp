#include "scattering/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "common/error.hpp"
#include "eft/eft_data.hpp"
#include "spectral/fld_io.hpp"

namespace kgeft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProfileSet scaled(const ProfileSet& p, double c) {
  ProfileSet out = p;
  out.l_plus = Complex(c) * p.l_plus;
  out.l_minus = Complex(c) * p.l_minus;
  out.h_plus = Complex(c) * p.h_plus;
  out.h_minus = Complex(c) * p.h_minus;
  return out;
}

double hk(const Field& f, int k) { return norm(f, NormSpec::hs(k)); }

}  // namespace

ScatteredState extract_scattered_state(const std::vector<ProfileSet>& traj, int k, double T) {
  require(!traj.empty(), ErrorCode::InvalidArgument, "empty profile trajectory");
  const double tol = 1e-6 * std::max(1.0, T);
  auto find = [&](double t) -> const ProfileSet& {
    for (const auto& p : traj)
      if (std::abs(p.time - t) <= tol) return p;
    fail(ErrorCode::InvalidArgument, "profile trajectory has no snapshot at t = " + std::to_string(t));
  };
  const ProfileSet& end = find(T);
  const ProfileSet& half = find(0.5 * T);

  ScatteredState s;
  s.f = end;
  s.T = T;
  s.k = k;
  s.cauchy_gap = hk(end.l_plus - half.l_plus, k);

  // Increment rates between consecutive snapshots after T/8, fitted to t^{-q}.
  std::vector<double> tm, rate;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double t0 = traj[i - 1].time, t1 = traj[i].time;
    if (t0 < T / 8.0 - tol || t1 <= t0) continue;
    const double d = hk(traj[i].l_plus - traj[i - 1].l_plus, k) / (t1 - t0);
    if (d > 0.0) {
      tm.push_back(0.5 * (t0 + t1));
      rate.push_back(d);
    }
  }
  if (s.cauchy_gap == 0.0) {
    s.converged = true;
    s.tail_exponent = kInf;
    return s;
  }
  if (tm.size() >= 2) {
    const ExponentFit fit = fit_power_law(tm, rate);
    s.tail_exponent = -fit.slope;
    if (s.tail_exponent > 1.0)
      s.tail = std::exp(fit.intercept) * std::pow(T, 1.0 - s.tail_exponent) / (s.tail_exponent - 1.0);
    else
      s.tail = kInf;
  } else {
    s.tail = kInf;
  }
  s.converged = std::isfinite(s.tail) && s.cauchy_gap <= 10.0 * s.tail;
  return s;
}

ScatteredState scattered_state_from_uv(const std::vector<ProfileSet>& profiles, int k, double T) {
  std::vector<ProfileSet> w;
  for (const auto& p : profiles) w.push_back(scaled(p, p.M));
  ScatteredState s = extract_scattered_state(w, k, T);
  s.source = "uv";
  s.has_heavy = true;
  return s;
}

ScatteredState scattered_state_from_hierarchy(const HierarchyResult& r, int level, int k) {
  require(level >= 0 && level <= r.cfg.top, ErrorCode::InvalidArgument, "hierarchy level out of range");
  std::vector<ProfileSet> traj;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    ProfileSet p;
    p.l_plus = r.profile(level, i);
    p.l_minus = conj(p.l_plus);
    p.h_plus = Field::zeros(r.grid);
    p.h_minus = p.h_plus;
    p.time = r.samples[i].t;
    p.M = r.cfg.M;
    traj.push_back(std::move(p));
  }
  ScatteredState s = extract_scattered_state(traj, k, r.samples.back().t);
  s.source = "eft";
  s.has_heavy = false;
  return s;
}

double compare_scattered_states(const ScatteredState& a, const ScatteredState& b, int k) {
  if (!(a.f.l_plus.grid() == b.f.l_plus.grid()))
    fail(ErrorCode::ConventionMismatch, "scattered states live on different grids");
  if (std::abs(a.T - b.T) > 1e-9 * std::max(1.0, a.T))
    fail(ErrorCode::ConventionMismatch, "scattered states are taken at different final times");
  if (std::abs(a.f.M - b.f.M) > 1e-12 * std::max(1.0, a.f.M))
    fail(ErrorCode::ConventionMismatch, "scattered states belong to different M");
  return hk(a.f.l_plus - b.f.l_plus, k);
}

// ---- sweeps ----

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::decay: return "decay";
    case Experiment::vm_suppression: return "vm_suppression";
    case Experiment::scattering_gap: return "scattering_gap";
    case Experiment::xnorm_bound: return "xnorm_bound";
    case Experiment::hierarchy_gap: return "hierarchy_gap";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (Experiment e : {Experiment::decay, Experiment::vm_suppression, Experiment::scattering_gap,
                       Experiment::xnorm_bound, Experiment::hierarchy_gap})
    if (to_string(e) == s) return e;
  fail(ErrorCode::InvalidArgument, "unknown experiment '" + s + "'");
}

nlohmann::json SweepConfig::to_json() const {
  return {{"grid", {{"dim", grid.dim}, {"n_per_axis", grid.n}, {"box_length", grid.length}}},
          {"sigma", sigma},
          {"amplitude", amplitude},
          {"data_fraction", data_fraction},
          {"T", T},
          {"dt", dt},
          {"hierarchy_dt", hierarchy_dt},
          {"sample_every", sample_every},
          {"orders", orders},
          {"hierarchy_top", hierarchy_top},
          {"N", N},
          {"k", k},
          {"E", E},
          {"metric_regularity", metric_regularity},
          {"enforce_budget", enforce_budget},
          {"delta", monitor.delta},
          {"nonlinearity",
           {{"coefficient", nonlinearity.coefficient},
            {"include_u2v", nonlinearity.include_u2v},
            {"exact_v_shift", nonlinearity.exact_v_shift}}},
          {"seed", seed}};
}

const SweepSeries& SweepResult::series_named(const std::string& name) const {
  for (const auto& s : series)
    if (s.name == name) return s;
  fail(ErrorCode::InvalidArgument, "sweep has no series '" + name + "'");
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  j["succeeded"] = succeeded;
  j["series"] = nlohmann::json::array();
  for (const auto& s : series) {
    nlohmann::json e{{"name", s.name}, {"M", s.M}, {"values", s.values}, {"note", s.note}};
    e["fit"] = s.fit ? kgeft::to_json(*s.fit) : nlohmann::json();
    j["series"].push_back(e);
  }
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    nlohmann::json e{{"M", r.M}, {"order", r.order}, {"dir", r.dir}, {"ok", r.ok}, {"error", r.error}};
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [k, v] : r.metrics) m[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
    e["metrics"] = m;
    j["runs"].push_back(e);
  }
  return j;
}

int sweep_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KGEFT_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string run_name(double M, int order) {
  std::ostringstream os;
  os << "M" << std::setprecision(12) << M << "_n" << order;
  return os.str();
}

Field light_data(const SweepConfig& cfg, double M) {
  return gaussian_state(cfg.grid, M, cfg.sigma, cfg.amplitude / M).U;
}

double uv_dt(const SweepConfig& cfg, double M) {
  return cfg.dt > 0 ? cfg.dt : std::min(default_dt(cfg.grid, M), 0.25 / M);
}

std::vector<double> profile_times(double T) { return {T / 8.0, T / 4.0, 3.0 * T / 8.0, T / 2.0, 3.0 * T / 4.0, T}; }

// Everything a run produces; written by the worker into its own directory.
struct Job {
  double M;
  int order;
};

struct JobOutput {
  std::map<std::string, double> metrics;
};

class Runner {
 public:
  Runner(Experiment e, const SweepConfig& cfg, std::filesystem::path dir)
      : e_(e), cfg_(cfg), dir_(std::move(dir)) {}

  JobOutput run(const Job& job) {
    if (!dir_.empty()) {
      std::filesystem::create_directories(dir_);
      auto c = cfg_.to_json();
      c["M"] = job.M;
      c["order"] = job.order;
      c["experiment"] = to_string(e_);
      std::ofstream(dir_ / "config.json") << c.dump(2) << '\n';
    }
    switch (e_) {
      case Experiment::decay: return decay(job);
      case Experiment::vm_suppression: return vm(job);
      case Experiment::scattering_gap: return gap(job);
      case Experiment::xnorm_bound: return xnorm(job);
      case Experiment::hierarchy_gap: return hierarchy(job);
    }
    fail(ErrorCode::Internal, "unhandled experiment");
  }

 private:
  void snapshot(const Field& f, const std::string& name, double t) {
    if (!dir_.empty() && cfg_.snapshots) write_fld(dir_ / (name + ".fld"), f, name, t);
  }

  void trace(const std::string& header, const std::vector<std::vector<double>>& rows) {
    if (dir_.empty()) return;
    std::ofstream os(dir_ / "trace.csv");
    require(static_cast<bool>(os), ErrorCode::IoError, "cannot write trace.csv");
    os << header << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
  }

  JobOutput decay(const Job& job) {
    const Field U0 = light_data(cfg_, job.M);
    const Field U1 = Field::zeros(cfg_.grid);
    std::vector<double> times;
    for (double t = 1.0; t <= cfg_.T * (1 + 1e-12); t *= 1.1) times.push_back(t);
    DecayOptions o;
    o.window = std::make_pair(std::min(2.0 * job.M, cfg_.T / 2.0), cfg_.T);
    const ExponentFit fit = measure_decay(U0, U1, job.M, times, kInf, o);
    std::vector<std::vector<double>> rows;
    for (auto [t, y] : fit.samples) rows.push_back({t, y});
    trace("t,Linf", rows);
    snapshot(U0, "U0", 0.0);
    JobOutput out;
    out.metrics["linf_T"] = fit.samples.back().second;
    out.metrics["decay_slope"] = fit.slope;
    return out;
  }

  UVState eft_state(double M, int order) {
    const Field U0 = light_data(cfg_, M);
    EFTConfig ec;
    ec.order = order;
    ec.N = cfg_.N;
    ec.k = cfg_.k;
    ec.M = M;
    ec.E = cfg_.E;
    ec.enforce_budget = cfg_.enforce_budget;
    ec.nonlinearity = cfg_.nonlinearity;
    return make_eft_data(U0, Field::zeros(cfg_.grid), ec).state(M);
  }

  void write_xtrace(const XNormTrace& t) {
    if (!dir_.empty()) write_trace_csv(dir_ / "trace.csv", t);
  }

  JobOutput vm(const Job& job) {
    const int m = std::min(job.order, 1);
    const UVState s = eft_state(job.M, job.order);
    EvolveOptions o;
    o.T = cfg_.T;
    o.dt = uv_dt(cfg_, job.M);
    o.sample_every = cfg_.sample_every;
    o.monitors = false;
    std::vector<std::vector<double>> rows;
    double sup = 0.0;
    o.on_sample = [&](const UVSolver& sol) {
      const double v = norm(vm_transform(sol.state(), m, cfg_.nonlinearity), NormSpec::hs(cfg_.metric_regularity));
      rows.push_back({sol.time(), v});
      sup = std::max(sup, v);
    };
    const EvolveResult r = evolve(s, o, cfg_.nonlinearity);
    trace("t,Vm_norm", rows);
    snapshot(r.final.V, "V_final", r.final.t);
    snapshot(vm_transform(r.final, m, cfg_.nonlinearity), "Vm_final", r.final.t);
    JobOutput out;
    out.metrics["vm_sup"] = sup;
    out.metrics["m"] = m;
    return out;
  }

  JobOutput gap(const Job& job) {
    const double M = job.M;
    const UVState s = eft_state(M, job.order);
    EvolveOptions o;
    o.T = cfg_.T;
    o.dt = uv_dt(cfg_, M);
    o.sample_every = cfg_.sample_every;
    o.monitor = cfg_.monitor;
    o.monitor.N = cfg_.N;
    o.monitor.k = cfg_.k;
    o.monitor.E = cfg_.E;
    o.profile_times = profile_times(cfg_.T);
    const EvolveResult r = evolve(s, o, cfg_.nonlinearity);
    write_xtrace(r.trace);

    HierarchyOptions ho;
    ho.sample_every = cfg_.T / 8.0;
    const int level = 2 * job.order;
    const HierarchyResult h = solve_eft_hierarchy(s.U, s.Ut, HierarchyConfig{level, M, cfg_.nonlinearity.coefficient},
                                                  cfg_.T, cfg_.hierarchy_dt, ho);
    JobOutput out;
    for (int k : {cfg_.k, cfg_.k - 1}) {
      const ScatteredState uv = scattered_state_from_uv(r.profiles, k, cfg_.T);
      const ScatteredState eft = scattered_state_from_hierarchy(h, level, k);
      out.metrics["gap_k" + std::to_string(k)] = compare_scattered_states(uv, eft, k);
      if (k == cfg_.k) {
        out.metrics["heavy_k" + std::to_string(k)] = hk(uv.f.h_plus, k);
        out.metrics["cauchy_uv"] = uv.cauchy_gap;
        out.metrics["cauchy_eft"] = eft.cauchy_gap;
        out.metrics["converged_uv"] = uv.converged;
        snapshot(uv.f.l_plus, "l_plus_uv", cfg_.T);
        snapshot(uv.f.h_plus, "h_plus_uv", cfg_.T);
        snapshot(eft.f.l_plus, "l_plus_eft", cfg_.T);
      }
    }
    return out;
  }

  JobOutput xnorm(const Job& job) {
    const UVState g = gaussian_state(cfg_.grid, job.M, cfg_.sigma, 1.0);
    const UVState s = normalize_light_data(g, cfg_.N, cfg_.k, cfg_.E, cfg_.data_fraction);
    EvolveOptions o;
    o.T = cfg_.T;
    o.dt = uv_dt(cfg_, job.M);
    o.sample_every = cfg_.sample_every;
    o.monitor = cfg_.monitor;
    o.monitor.N = cfg_.N;
    o.monitor.k = cfg_.k;
    o.monitor.E = cfg_.E;
    const EvolveResult r = evolve(s, o, cfg_.nonlinearity);
    write_xtrace(r.trace);
    snapshot(s.U, "U0", 0.0);
    snapshot(r.final.U, "U_final", r.final.t);
    JobOutput out;
    out.metrics["max_X"] = r.trace.max_total();
    out.metrics["max_X_M_over_E"] = r.trace.max_total() * job.M / cfg_.E;
    out.metrics["within_bound"] = r.trace.within_bound();
    return out;
  }

  JobOutput hierarchy(const Job& job) {
    const Field U0 = light_data(cfg_, job.M);
    HierarchyOptions ho;
    ho.sample_every = cfg_.sample_every;
    const int top = cfg_.hierarchy_top;
    const HierarchyResult h = solve_eft_hierarchy(U0, Field::zeros(cfg_.grid),
                                                  HierarchyConfig{top, job.M, cfg_.nonlinearity.coefficient},
                                                  cfg_.T, cfg_.hierarchy_dt, ho);
    JobOutput out;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 2 <= top; i += 2) pairs.emplace_back(i, i + 2);
    std::vector<std::vector<double>> rows;
    for (std::size_t si = 0; si < h.samples.size(); ++si) {
      std::vector<double> row{h.samples[si].t};
      for (auto [i, j] : pairs) {
        const double d = norm(h.fields(j, si).first - h.fields(i, si).first, NormSpec::hs(cfg_.metric_regularity));
        row.push_back(d);
        auto& slot = out.metrics["d_" + std::to_string(i) + "_" + std::to_string(j)];
        slot = std::max(slot, d);
      }
      rows.push_back(row);
    }
    std::string header = "t";
    for (auto [i, j] : pairs) header += ",d_" + std::to_string(i) + "_" + std::to_string(j);
    trace(header, rows);
    snapshot(h.fields(top, h.samples.size() - 1).first, "w_top_final", cfg_.T);
    return out;
  }

  Experiment e_;
  const SweepConfig& cfg_;
  std::filesystem::path dir_;
};

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot write " + path.string());
  os << "series,M,value,slope,slope_stderr,residual\n";
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < s.M.size(); ++i) {
      os << s.name << ',' << fmt(s.M[i]) << ',' << fmt(s.values[i]) << ',';
      if (s.fit)
        os << fmt(s.fit->slope) << ',' << fmt(s.fit->slope_stderr) << ',' << fmt(s.fit->residual);
      else
        os << ",,";
      os << '\n';
    }
}

SweepResult run_sweep(Experiment experiment, const std::vector<double>& M_list, const SweepConfig& cfg,
                      const std::filesystem::path& out_dir) {
  require(M_list.size() >= 4, ErrorCode::InvalidArgument, "a sweep needs at least 4 M values");
  for (double M : M_list) require(M > 1.0, ErrorCode::InvalidArgument, "sweep M values must exceed 1");
  require(!cfg.orders.empty(), ErrorCode::InvalidArgument, "sweep needs at least one order");
  cfg.grid.validate();

  std::vector<Job> jobs;
  const bool per_order = experiment == Experiment::vm_suppression || experiment == Experiment::scattering_gap;
  for (int order : per_order ? cfg.orders : std::vector<int>{cfg.orders.front()})
    for (double M : M_list) jobs.push_back({M, order});

  SweepResult res;
  res.experiment = experiment;
  res.runs.resize(jobs.size());
  std::vector<JobOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      SweepRun& run = res.runs[i];
      run.M = jobs[i].M;
      run.order = jobs[i].order;
      run.dir = run_name(run.M, run.order);
      try {
        Runner runner(experiment, cfg, out_dir.empty() ? std::filesystem::path{} : out_dir / run.dir);
        outputs[i] = runner.run(jobs[i]);
        run.metrics = outputs[i].metrics;
        run.ok = true;
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const int nw = std::min<int>(sweep_workers(cfg.workers), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Single-threaded reduce, in job order.
  std::map<std::string, SweepSeries> series;
  std::vector<std::string> order;
  for (const auto& run : res.runs) {
    if (!run.ok) continue;
    ++res.succeeded;
    for (const auto& [k, v] : run.metrics) {
      const std::string name = per_order ? k + "_n" + std::to_string(run.order) : k;
      if (!series.count(name)) {
        order.push_back(name);
        series[name].name = name;
      }
      series[name].M.push_back(run.M);
      series[name].values.push_back(v);
    }
  }
  for (const auto& name : order) {
    SweepSeries s = series[name];
    std::size_t positive = 0;
    for (double v : s.values) positive += v > 0.0 && std::isfinite(v);
    if (positive >= 4)
      s.fit = fit_power_law(s.M, s.values);
    else
      s.note = "fewer than 4 positive values; no fit";
    res.series.push_back(std::move(s));
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "sweep.json") << res.to_json().dump(2) << '\n';
    write_sweep_csv(out_dir / "sweep.csv", res);
  }
  if (res.succeeded < 4) {
    std::string msg = "only " + std::to_string(res.succeeded) + " runs succeeded";
    for (const auto& r : res.runs)
      if (!r.ok) msg += "; " + r.dir + ": " + r.error;
    fail(ErrorCode::SweepFailed, msg);
  }
  return res;
}

UniquenessResult uniqueness_probe(const Field& U0, const Field& U1, const Field& profile,
                                  const UniquenessConfig& cfg) {
  require(cfg.n >= 0, ErrorCode::InvalidArgument, "probe level must be >= 0");
  require(cfg.M_list.size() >= 2, ErrorCode::InvalidArgument, "uniqueness probe needs an M sweep");
  UniquenessResult out;
  out.gap.name = "uniqueness_gap_n" + std::to_string(cfg.n);
  const int depth = std::max(3, cfg.n >= 2 ? hierarchy_forcing_loss(cfg.n) + 1 : 3);
  const double profile_norm = norm(profile, NormSpec::hs(cfg.k));
  for (double M : cfg.M_list) {
    UniquenessRun run;
    run.M = M;
    HierarchyConfig hc{cfg.n, M, cfg.coefficient};
    HierarchyOptions base;
    base.sample_every = cfg.sample_every;
    HierarchyOptions probed = base;
    probed.probe = ProbeForcing{profile, cfg.amplitude * std::pow(M, -(cfg.n + 1.0)), cfg.decay, cfg.t_on};

    const HierarchyResult a = solve_eft_hierarchy(U0, U1, hc, cfg.T, cfg.dt, base);
    const HierarchyResult b = solve_eft_hierarchy(U0, U1, hc, cfg.T, cfg.dt, probed);
    const ResidualConfig rc{cfg.n, cfg.N, M, cfg.coefficient};
    run.base = certify_residual(hierarchy_trajectory(a, cfg.n, depth), rc);
    run.probed = certify_residual(hierarchy_trajectory(b, cfg.n, depth), rc);
    if (cfg.require_certificate && !(run.base.scattering && run.probed.scattering)) {
      std::string msg = "run at M = " + fmt(M) + " is not a certified scattering EFT solution";
      for (const auto& n : run.base.notes) msg += "; base: " + n;
      for (const auto& n : run.probed.notes) msg += "; probed: " + n;
      fail(ErrorCode::CertificationMissing, msg);
    }
    const std::size_t last = a.samples.size() - 1;
    run.gap = norm(a.profile(cfg.n, last) - b.profile(cfg.n, last), NormSpec::hs(cfg.k));
    const ProbeForcing& p = *probed.probe;
    if (cfg.T > cfg.t_on) {
      const double lo = std::max(0.0, cfg.t_on);
      run.perturbation_integral =
          profile_norm * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                             [&](double t) { return std::abs(p.value_scale(t)); }, lo, cfg.T, 15, 1e-12);
    }
    out.gap.M.push_back(M);
    out.gap.values.push_back(run.gap);
    out.runs.push_back(std::move(run));
  }
  std::size_t positive = 0;
  for (double v : out.gap.values) positive += v > 0.0;
  if (positive >= 2)
    out.gap.fit = fit_power_law(out.gap.M, out.gap.values);
  else
    out.gap.note = "gap vanished; no fit";
  return out;
}

}  // namespace kgeft
