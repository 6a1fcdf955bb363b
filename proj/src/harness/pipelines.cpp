#include "harness/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "common/error.hpp"
#include "eft/eft_data.hpp"
#include "resonance/checks.hpp"
#include "spectral/fld_io.hpp"

namespace kgeft {

namespace fs = std::filesystem;
using nlohmann::json;

bool RunManifest::passed() const {
  for (const auto& [k, v] : monitors)
    if (!v) return false;
  return true;
}

json RunManifest::to_json() const {
  return {{"config_hash", config_hash}, {"code_version", code_version}, {"experiment", experiment},
          {"started", started},         {"finished", finished},         {"run_dir", run_dir.string()},
          {"artifacts", artifacts},     {"monitors", monitors},         {"audit", audit},
          {"summary", summary},         {"passed", passed()}};
}

RunManifest RunManifest::from_json(const json& j, const fs::path& run_dir) {
  RunManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.code_version = j.at("code_version").get<std::string>();
  m.experiment = j.at("experiment").get<std::string>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.at("finished").get<std::string>();
  m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  m.monitors = j.at("monitors").get<std::map<std::string, bool>>();
  m.audit = j.value("audit", std::vector<std::string>{});
  m.summary = j.value("summary", json::object());
  m.run_dir = run_dir;
  return m;
}

fs::path output_root(const fs::path& requested) {
  if (!requested.empty()) return requested;
  if (const char* env = std::getenv("KGEFT_OUTPUT_ROOT"); env && *env) return env;
  return "kgeft-runs";
}

fs::path run_directory(const RunConfig& cfg, const fs::path& root) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return output_root(root) / (cfg.experiment + "-" + config_hash(cfg).substr(0, 12));
}

void save_manifest(const RunManifest& m) {
  fs::create_directories(m.run_dir);
  std::ofstream os(m.run_dir / "manifest.json");
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot write manifest in " + m.run_dir.string());
  os << m.to_json().dump(2) << '\n';
}

RunManifest load_manifest(const fs::path& p) {
  const fs::path file = fs::is_directory(p) ? p / "manifest.json" : p;
  std::ifstream in(file);
  if (!in) fail(ErrorCode::MissingArtifact, "no manifest at " + file.string());
  json j;
  try {
    in >> j;
    return RunManifest::from_json(j, file.parent_path());
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, "malformed manifest " + file.string() + ": " + e.what());
  }
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      out.push_back(fs::relative(e.path(), dir).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot write " + p.string());
  os << s;
}

MonitorSpec monitor_spec(const RunConfig& c) {
  MonitorSpec m;
  m.N = c.N;
  m.k = c.k;
  m.delta = c.delta;
  m.E = c.E;
  m.bootstrap_constant = c.bootstrap_constant;
  return m;
}

Field recipe_light(const RunConfig& c) {
  if (c.data.generator == "zero") return Field::zeros(c.grid);
  if (c.data.generator == "fld") return read_fld(c.data.U0).field;
  return gaussian_state(c.grid, c.M, c.data.sigma, c.data.amplitude / c.M).U;
}

// ---- simulate ----

void simulate(const RunConfig& c, RunManifest& m) {
  UVState s = change_variables(initial_state(c), c.formulation);
  EvolveOptions o;
  o.T = c.T;
  o.dt = c.dt;
  o.sample_every = c.sample_every;
  o.monitor = monitor_spec(c);
  const double pz = o.monitor.lebesgue_exponent();
  std::ostringstream decay;
  decay << std::setprecision(17) << "t,Wkp_p2,Wkp_p" << pz << ",Wkp_pinf\n";
  bool finite = true;
  o.on_sample = [&](const UVSolver& sol) {
    const UVState r = change_variables(sol.state(), Formulation::rescaled);
    const HalfWavePair hw = to_halfwaves(r.U, r.Ut, 1.0);
    decay << sol.time();
    for (double p : {2.0, pz, double(INFINITY)}) {
      const double v = norm(hw.plus, NormSpec::wkp(c.k, p));
      finite = finite && std::isfinite(v);
      decay << ',' << v;
    }
    decay << '\n';
  };
  const EvolveResult r = evolve(s, o, c.nonlinearity);
  write_trace_csv(m.run_dir / "trace.csv", r.trace);
  write_text(m.run_dir / "decay.csv", decay.str());
  for (auto [name, f] : {std::pair{"U", &r.final.U}, {"Ut", &r.final.Ut}, {"V", &r.final.V}, {"Vt", &r.final.Vt}})
    write_fld(m.run_dir / (std::string(name) + "_final.fld"), *f, name, r.final.t);
  const ProfileSet p = profiles_of(r.final);
  write_fld(m.run_dir / "l_plus_final.fld", p.l_plus, "l_plus", p.time);
  write_fld(m.run_dir / "h_plus_final.fld", p.h_plus, "h_plus", p.time);
  for (const auto& smp : r.trace.samples) finite = finite && std::isfinite(smp.X_total);
  m.monitors["bootstrap"] = r.trace.within_bound();
  m.monitors["finite"] = finite;
  m.summary = {{"steps", r.steps}, {"dt", r.dt}, {"max_X", r.trace.max_total()}, {"bound", r.trace.bound},
               {"support_radius", r.support_radius}};
}

// ---- resonance ----

void resonance(const RunConfig& c, RunManifest& m) {
  json rep;
  rep["check"] = c.check;
  rep["phase"] = c.phase;
  rep["M_list"] = c.M_list;
  m.summary["M_list"] = c.M_list;
  m.summary["phase"] = c.phase;
  m.summary["signs"] = c.signs;
  const auto signs = PhaseSpec::parse_signs(c.signs);
  if (c.phase == "v") {
    rep["note"] = "the separation, partition and multiplier checks are defined for phi_u";
    write_text(m.run_dir / "report.json", rep.dump(2) + "\n");
    return;
  }
  if (c.check == "separation") {
    std::vector<Vec3> rhos;
    for (double r : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) rhos.push_back({r, 0.0, 0.0});
    const SeparationReport s = verify_separation(c.M_list, rhos, signs);
    rep["min_distance"] = s.min_distance;
    rep["fit"] = to_json(s.fit);
    json samples = json::array();
    for (const auto& x : s.samples) samples.push_back({{"M", x.M}, {"rho", x.rho}, {"distance", x.distance}});
    rep["samples"] = samples;
    m.monitors["separation_slope"] = s.fit.slope >= 0.45;
  } else if (c.check == "bounds") {
    const LowerBoundReport b = verify_lower_bounds(c.M_list, 1000000, c.seed);
    json rows = json::array();
    for (const auto& r : b.rows)
      rows.push_back({{"M", r.M}, {"inf_S", r.inf_S}, {"inf_T", r.inf_T}, {"count_S", r.count_S},
                      {"count_T", r.count_T}, {"partition_defect", r.partition_defect}});
    rep["rows"] = rows;
    rep["stability_S"] = b.stability_S;
    rep["stability_T"] = b.stability_T;
    double defect = 0.0;
    for (const auto& r : b.rows) defect = std::max(defect, r.partition_defect);
    m.monitors["partition_sum"] = defect <= 1e-12;
    m.monitors["chi_S_lower_bound"] = b.pass_S;
    m.monitors["chi_T_lower_bound"] = b.pass_T;
  } else if (c.check == "symbols") {
    const SymbolicBoundReport s = verify_symbolic_bounds(
        [](double M) { return BilinearSymbol::chiS_over_phi(CutoffPartition{PhaseSpec::u(M)}); }, 3, c.M_list,
        20000, c.seed);
    json rows = json::array();
    for (const auto& r : s.rows)
      rows.push_back({{"M", r.M}, {"variable", r.variable}, {"order", r.order}, {"sup_ratio", r.sup_ratio}});
    rep["rows"] = rows;
    rep["stability"] = s.stability;
    m.monitors["symbol_bounds_stable"] = s.stable;
  } else {
    const GridSpec g = c.grid.dim == 1 && c.grid.n <= 256 ? c.grid : GridSpec{1, 256, 64.0};
    MultiplierNorms nm;
    nm.a = c.frak_a;
    std::vector<double> sups;
    for (double M : c.M_list) {
      const auto sym = BilinearSymbol::chiS_over_phi(CutoffPartition{PhaseSpec::u(M, signs)});
      sups.push_back(estimate_operator_norm(sym, g, nm, c.trials, c.seed).sup_ratio);
    }
    rep["grid"] = {{"dim", g.dim}, {"n", g.n}, {"L", g.length}};
    rep["sup_ratio"] = sups;
    if (c.M_list.size() >= 2) {
      const ExponentFit f = fit_power_law(c.M_list, sups);
      rep["fit"] = to_json(f);
      m.monitors["opnorm_trend"] = f.slope <= 0.1;
    }
  }
  write_text(m.run_dir / "report.json", rep.dump(2) + "\n");
}

// ---- eft ----

EFTConfig eft_config(const RunConfig& c, int order) {
  EFTConfig e;
  e.order = order;
  e.N = c.N;
  e.k = c.k;
  e.M = c.M;
  e.E = c.E;
  e.enforce_budget = false;
  e.nonlinearity = c.nonlinearity;
  return e;
}

void eft_data(const RunConfig& c, RunManifest& m) {
  const Field U0 = recipe_light(c);
  const EFTDataBundle b = make_eft_data(U0, Field::zeros(c.grid), eft_config(c, c.order));
  for (auto [name, f] : {std::pair{"U0", &b.U0}, {"U1", &b.U1}, {"V0", &b.V0}, {"V1", &b.V1}})
    write_fld(m.run_dir / (std::string(name) + ".fld"), *f, name, 0.0);
  const double budget = c.M * norm(b.U0, NormSpec::hs(c.N + 2 * c.order + 1));
  json j{{"order", b.order}, {"M", c.M}, {"iterate_gaps", b.iterate_gaps}, {"budget", budget}, {"E", c.E}};
  json P = json::array(), Pt = json::array();
  for (const Field& f : b.P_terms) P.push_back(norm(f, NormSpec::hs(0)));
  for (const Field& f : b.P_tilde_terms) Pt.push_back(norm(f, NormSpec::hs(0)));
  j["P_norms"] = P;
  j["P_tilde_norms"] = Pt;
  write_text(m.run_dir / "eft_data.json", j.dump(2) + "\n");
  m.summary = j;
  m.monitors["data_budget"] = budget <= c.E;
}

int certify_depth(int level) { return std::max(3, level >= 2 ? hierarchy_forcing_loss(level) + 1 : 3); }

HierarchyResult eft_solve_run(const RunConfig& c, RunManifest& m) {
  const int level = 2 * c.order;
  const Field U0 = recipe_light(c);
  HierarchyOptions ho;
  ho.sample_every = c.sample_every;
  const HierarchyResult h =
      solve_eft_hierarchy(U0, Field::zeros(c.grid), HierarchyConfig{level, c.M, c.nonlinearity.coefficient}, c.T,
                          c.dt, ho);
  std::ostringstream csv;
  csv << std::setprecision(17) << "t";
  for (int j = 0; j <= level; ++j) csv << ",w" << j << "_L2";
  csv << '\n';
  const int depth = certify_depth(level);
  const fs::path tdir = m.run_dir / "trajectory";
  fs::create_directories(tdir);
  for (std::size_t i = 0; i < h.samples.size(); ++i) {
    csv << h.samples[i].t;
    for (int j = 0; j <= level; ++j) csv << ',' << norm(h.fields(j, i).first, NormSpec::hs(0));
    csv << '\n';
    const JetField jets = h.jets(level, i, depth);
    for (int q = 0; q <= depth; ++q) {
      std::ostringstream name;
      name << "jet" << q << "_" << std::setw(5) << std::setfill('0') << i << ".fld";
      write_fld(tdir / name.str(), jets[q], "jet" + std::to_string(q), h.samples[i].t);
    }
  }
  write_text(tdir / "meta.json", json{{"M", c.M},
                                      {"level", level},
                                      {"coefficient", c.nonlinearity.coefficient},
                                      {"depth", depth},
                                      {"samples", h.samples.size()}}
                                         .dump(2) +
                                     "\n");
  write_text(m.run_dir / "hierarchy.csv", csv.str());
  for (int j = 0; j <= level; ++j)
    write_fld(m.run_dir / ("w" + std::to_string(j) + "_final.fld"), h.fields(j, h.samples.size() - 1).first,
              "w" + std::to_string(j), c.T);
  m.summary = {{"level", level}, {"steps", h.steps}, {"dt", h.dt}, {"samples", h.samples.size()}};
  bool finite = true;
  for (int j = 0; j <= level; ++j) finite = finite && std::isfinite(norm(h.fields(j, h.samples.size() - 1).first, NormSpec::hs(0)));
  m.monitors["finite"] = finite;
  return h;
}

std::vector<std::pair<double, JetField>> read_trajectory(const fs::path& dir, json& meta) {
  std::ifstream in(dir / "meta.json");
  if (!in) fail(ErrorCode::MissingArtifact, "no meta.json in trajectory " + dir.string());
  in >> meta;
  const int depth = meta.at("depth").get<int>();
  const std::size_t n = meta.at("samples").get<std::size_t>();
  std::vector<std::pair<double, JetField>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Field> jets;
    double t = 0.0;
    for (int q = 0; q <= depth; ++q) {
      std::ostringstream name;
      name << "jet" << q << "_" << std::setw(5) << std::setfill('0') << i << ".fld";
      const fs::path p = dir / name.str();
      if (!fs::exists(p)) fail(ErrorCode::MissingArtifact, "missing trajectory file " + p.string());
      FldRecord r = read_fld(p);
      t = r.time;
      jets.push_back(std::move(r.field));
    }
    out.emplace_back(t, JetField(std::move(jets)));
  }
  return out;
}

void certify(const RunConfig& c, RunManifest& m) {
  json meta;
  std::vector<std::pair<double, JetField>> traj;
  if (!c.trajectory.empty()) {
    traj = read_trajectory(c.trajectory, meta);
  } else {
    eft_solve_run(c, m);
    traj = read_trajectory(m.run_dir / "trajectory", meta);
  }
  const ResidualConfig rc{meta.at("level").get<int>(), c.N, meta.at("M").get<double>(),
                          meta.at("coefficient").get<double>()};
  const ResidualReport rep = certify_residual(traj, rc);
  std::ostringstream csv;
  csv << std::setprecision(17) << "t,R,Rt,u_inf,ut_inf,grad_inf\n";
  for (const auto& s : rep.samples)
    csv << s.t << ',' << s.R << ',' << s.Rt << ',' << s.u_inf << ',' << s.ut_inf << ',' << s.grad_inf << '\n';
  write_text(m.run_dir / "residual.csv", csv.str());
  auto tf = [](const TailFit& f) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(); };
    return json{{"q", num(f.q)}, {"integral", f.integral}, {"tail", num(f.tail)}, {"converged", f.converged},
                {"note", f.note}};
  };
  json j{{"level", rc.n},
         {"M", rc.M},
         {"residual", tf(rep.residual)},
         {"residual_t", tf(rep.residual_t)},
         {"u_decay", tf(rep.u_decay)},
         {"ut_decay", tf(rep.ut_decay)},
         {"grad_decay", tf(rep.grad_decay)},
         {"scattering", rep.scattering},
         {"notes", rep.notes}};
  write_text(m.run_dir / "certificate.json", j.dump(2) + "\n");
  m.summary = j;
  m.monitors["scattering"] = rep.scattering;
}

// ---- sweep ----

void sweep(const RunConfig& c, RunManifest& m) {
  const Experiment e = experiment_from_string(c.sweep);
  const SweepResult r = run_sweep(e, c.M_list, sweep_config_from(c), m.run_dir);
  bool all_ok = true;
  for (const auto& run : r.runs) all_ok = all_ok && run.ok;
  m.monitors["runs_succeeded"] = all_ok;
  if (e == Experiment::xnorm_bound) {
    bool within = true;
    for (const auto& run : r.runs)
      if (run.ok) within = within && run.metrics.at("within_bound") != 0.0;
    m.monitors["bootstrap_bound"] = within;
  }
  json slopes = json::object();
  for (const auto& s : r.series)
    if (s.fit) slopes[s.name] = s.fit->slope;
  m.summary = {{"sweep", c.sweep}, {"succeeded", r.succeeded}, {"slopes", slopes}};
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorCode::MissingArtifact, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

UVState initial_state(const RunConfig& c) {
  if (c.data.generator == "zero") return UVState::zero(c.grid, c.M);
  if (c.data.generator == "gaussian") return gaussian_state(c.grid, c.M, c.data.sigma, c.data.amplitude / c.M);
  UVState s = UVState::zero(c.grid, c.M, c.formulation);
  auto load = [&](const std::string& path, Field& into) {
    if (path.empty()) return;
    FldRecord r = read_fld(path);
    if (!(r.field.grid() == c.grid)) fail(ErrorCode::GridMismatch, path + " does not match the configured grid");
    into = r.field.to(Space::physical);
  };
  load(c.data.U0, s.U);
  load(c.data.U1, s.Ut);
  load(c.data.V0, s.V);
  load(c.data.V1, s.Vt);
  return change_variables(s, Formulation::rescaled);
}

SweepConfig sweep_config_from(const RunConfig& c) {
  SweepConfig s;
  s.grid = c.grid;
  s.sigma = c.data.sigma;
  s.amplitude = c.data.amplitude;
  s.T = c.T;
  s.dt = c.dt;
  s.sample_every = c.sample_every;
  s.orders = c.orders;
  s.N = c.N;
  s.k = c.k;
  s.E = c.E;
  s.monitor = monitor_spec(c);
  s.nonlinearity = c.nonlinearity;
  s.seed = c.seed;
  return s;
}

RunManifest dispatch(const RunConfig& cfg, const fs::path& root) {
  RunManifest m;
  m.audit = validate(cfg);
  m.config_hash = config_hash(cfg);
  m.experiment = cfg.experiment;
  m.run_dir = run_directory(cfg, root);
  m.started = utc_now();
  try {
    fs::create_directories(m.run_dir);
    write_text(m.run_dir / "config.txt", serialize(cfg));
    if (cfg.experiment == "simulate") simulate(cfg, m);
    else if (cfg.experiment == "resonance") resonance(cfg, m);
    else if (cfg.experiment == "eft-data") eft_data(cfg, m);
    else if (cfg.experiment == "eft-solve") eft_solve_run(cfg, m);
    else if (cfg.experiment == "certify") certify(cfg, m);
    else sweep(cfg, m);
  } catch (const Error& e) {
    throw Error(e.code(), "run " + m.run_dir.string() + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    fail(ErrorCode::IoError, "run " + m.run_dir.string() + ": " + e.what());
  }
  m.finished = utc_now();
  m.artifacts = list_files(m.run_dir);
  save_manifest(m);
  return m;
}

PlotFigure plot_figure_from_string(const std::string& s) {
  if (s == "decay_curves") return PlotFigure::decay_curves;
  if (s == "resonance_sheets") return PlotFigure::resonance_sheets;
  if (s == "sweep_slopes") return PlotFigure::sweep_slopes;
  fail(ErrorCode::InvalidArgument, "unknown figure '" + s + "'");
}

std::vector<fs::path> emit_plot_data(RunManifest& m, PlotFigure figure) {
  auto need = [&](const std::string& rel) {
    if (std::find(m.artifacts.begin(), m.artifacts.end(), rel) == m.artifacts.end() || !fs::exists(m.run_dir / rel))
      fail(ErrorCode::MissingArtifact, "manifest in " + m.run_dir.string() + " has no " + rel);
    return m.run_dir / rel;
  };
  const fs::path pdir = m.run_dir / "plots";
  std::vector<fs::path> out;
  if (figure == PlotFigure::decay_curves) {
    const std::string text = read_all(need("decay.csv"));
    out.push_back(pdir / "decay_curves.csv");
    write_text(out.back(), text);
  } else if (figure == PlotFigure::resonance_sheets) {
    need("report.json");
    const auto Ms = m.summary.at("M_list").get<std::vector<double>>();
    const std::string phase = m.summary.value("phase", std::string("u"));
    const auto signs = PhaseSpec::parse_signs(m.summary.value("signs", std::string("+-+")));
    for (double M : Ms) {
      const PhaseSpec spec = phase == "v" ? PhaseSpec::v(M, signs) : PhaseSpec::u(M, signs);
      // |rho| < M/4 and |rho| > M, the two regimes of the resonance picture.
      for (auto [tag, rho] : {std::pair{"a", M / 8.0}, std::pair{"b", 2.0 * M}}) {
        std::ostringstream name;
        name << "resonance_sheet_M" << M << "_" << tag << ".csv";
        out.push_back(pdir / name.str());
        fs::create_directories(pdir);
        write_sheet_csv(out.back().string(), resonance_sheet(spec, rho, 121));
      }
    }
  } else {
    std::ifstream in(need("sweep.json"));
    json j;
    in >> j;
    std::ostringstream csv;
    csv << std::setprecision(17) << "series,M,metric,fit,residual\n";
    for (const auto& s : j.at("series")) {
      const auto Ms = s.at("M").get<std::vector<double>>();
      const auto vs = s.at("values").get<std::vector<double>>();
      const bool fitted = s.contains("fit") && !s.at("fit").is_null();
      for (std::size_t i = 0; i < Ms.size(); ++i) {
        csv << s.at("name").get<std::string>() << ',' << Ms[i] << ',' << vs[i] << ',';
        if (fitted && vs[i] > 0) {
          const double f = std::exp(s["fit"]["intercept"].get<double>()) * std::pow(Ms[i], s["fit"]["slope"].get<double>());
          csv << f << ',' << std::log(vs[i]) - std::log(f);
        } else {
          csv << ',';
        }
        csv << '\n';
      }
    }
    out.push_back(pdir / "sweep_slopes.csv");
    write_text(out.back(), csv.str());
  }
  for (const auto& p : out) {
    const std::string rel = fs::relative(p, m.run_dir).generic_string();
    if (std::find(m.artifacts.begin(), m.artifacts.end(), rel) == m.artifacts.end()) m.artifacts.push_back(rel);
  }
  std::sort(m.artifacts.begin(), m.artifacts.end());
  save_manifest(m);
  return out;
}

}  // namespace kgeft
