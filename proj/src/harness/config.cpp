#include "harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "common/error.hpp"
#include "spectral/fld_io.hpp"
#include "resonance/phase.hpp"
#include "uv/monitors.hpp"

namespace kgeft {

bool operator==(const Nonlinearity& a, const Nonlinearity& b) {
  return a.coefficient == b.coefficient && a.include_u2v == b.include_u2v && a.exact_v_shift == b.exact_v_shift;
}

bool RunConfig::operator==(const RunConfig& o) const { return serialize(*this) == serialize(o); }

namespace {

struct Located {
  std::string origin;
  int line;
  int column;
};

[[noreturn]] void parse_fail(const Located& at, const std::string& msg) {
  fail(ErrorCode::ParseError, at.origin + ":" + std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v) {
  if (v == "inf") return INFINITY;
  std::size_t used = 0;
  double out = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return out;
}

long long to_int(const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("not an integer");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean");
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<T>(conv(item)));
  }
  return out;
}

void assign(RunConfig& c, const std::string& sec, const std::string& key, const std::string& v) {
  auto unknown = [&] { throw std::out_of_range("unknown key '" + key + "' in [" + sec + "]"); };
  if (sec == "grid") {
    if (key == "dim") c.grid.dim = static_cast<int>(to_int(v));
    else if (key == "n" || key == "n_per_axis") c.grid.n = static_cast<int>(to_int(v));
    else if (key == "L" || key == "box_length") c.grid.length = to_double(v);
    else unknown();
  } else if (sec == "data") {
    if (key == "generator") c.data.generator = v;
    else if (key == "sigma") c.data.sigma = to_double(v);
    else if (key == "amplitude") c.data.amplitude = to_double(v);
    else if (key == "support_radius") c.data.support_radius = to_double(v);
    else if (key == "U0") c.data.U0 = v;
    else if (key == "U1") c.data.U1 = v;
    else if (key == "V0") c.data.V0 = v;
    else if (key == "V1") c.data.V1 = v;
    else unknown();
  } else if (sec == "physics") {
    if (key == "M") c.M = to_double(v);
    else if (key == "E") c.E = to_double(v);
    else if (key == "formulation") c.formulation = formulation_from_string(v);
    else if (key == "include_u2v") c.nonlinearity.include_u2v = to_bool(v);
    else if (key == "exact_v_shift") c.nonlinearity.exact_v_shift = to_bool(v);
    else if (key == "coefficient") c.nonlinearity.coefficient = to_double(v);
    else unknown();
  } else if (sec == "run") {
    if (key == "T") c.T = to_double(v);
    else if (key == "dt") c.dt = to_double(v);
    else if (key == "sample_every") c.sample_every = to_double(v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(v));
    else if (key == "out_dir") c.out_dir = v;
    else unknown();
  } else if (sec == "monitors") {
    if (key == "N") c.N = static_cast<int>(to_int(v));
    else if (key == "k") c.k = static_cast<int>(to_int(v));
    else if (key == "s") c.s = to_double(v);
    else if (key == "a") c.frak_a = to_double(v);
    else if (key == "delta") c.delta = to_double(v);
    else if (key == "bootstrap_constant") c.bootstrap_constant = to_double(v);
    else unknown();
  } else if (sec == "experiment") {
    if (key == "kind") c.experiment = v;
    else if (key == "sweep") c.sweep = v;
    else if (key == "M_list") c.M_list = to_list<double>(v, to_double);
    else if (key == "orders") c.orders = to_list<int>(v, to_int);
    else if (key == "order") c.order = static_cast<int>(to_int(v));
    else if (key == "phase") c.phase = v;
    else if (key == "signs") c.signs = v;
    else if (key == "check") c.check = v;
    else if (key == "trials") c.trials = static_cast<int>(to_int(v));
    else if (key == "trajectory") c.trajectory = v;
    else unknown();
  } else {
    throw std::out_of_range("unknown section [" + sec + "]");
  }
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
  try {
    assign(cfg, section, key, value);
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, "[" + section + "] " + key + ": " + e.what());
  } catch (const std::out_of_range& e) {
    fail(ErrorCode::ParseError, e.what());
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "[" + section + "] " + key + ": cannot parse value '" + value + "'");
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t"));
    const std::string t = trim(line);
    if (t.front() == '[') {
      if (t.back() != ']') parse_fail({origin, lineno, indent + static_cast<int>(t.size())}, "missing ']'");
      section = trim(t.substr(1, t.size() - 2));
      static const char* known[] = {"grid", "data", "physics", "run", "monitors", "experiment"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        parse_fail({origin, lineno, indent + 2}, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail({origin, lineno, indent + 1}, "expected key = value");
    if (section.empty()) parse_fail({origin, lineno, indent + 1}, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto vcol = static_cast<int>(line.find_first_not_of(" \t", eq + 1));
    try {
      assign(cfg, section, key, value);
    } catch (const std::out_of_range& e) {
      parse_fail({origin, lineno, indent + 1}, e.what());
    } catch (const std::exception&) {
      parse_fail({origin, lineno, (vcol < 0 ? static_cast<int>(line.size()) : vcol) + 1},
                 "cannot parse value '" + value + "' for " + key);
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, path + ":0:0: cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto list = [&](const auto& v) {
    std::ostringstream l;
    l << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) l << (i ? "," : "") << v[i];
    return l.str();
  };
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "[grid]\ndim = " << c.grid.dim << "\nn = " << c.grid.n << "\nL = " << c.grid.length << "\n\n";
  os << "[data]\ngenerator = " << c.data.generator << "\nsigma = " << c.data.sigma
     << "\namplitude = " << c.data.amplitude << "\nsupport_radius = " << c.data.support_radius << '\n';
  for (auto [k, v] : {std::pair{"U0", &c.data.U0}, {"U1", &c.data.U1}, {"V0", &c.data.V0}, {"V1", &c.data.V1}})
    if (!v->empty()) os << k << " = " << *v << '\n';
  os << "\n[physics]\nM = " << c.M << "\nE = " << c.E << "\nformulation = " << to_string(c.formulation)
     << "\ncoefficient = " << c.nonlinearity.coefficient << "\ninclude_u2v = " << b(c.nonlinearity.include_u2v)
     << "\nexact_v_shift = " << b(c.nonlinearity.exact_v_shift) << "\n\n";
  os << "[run]\nT = " << c.T << "\ndt = " << c.dt << "\nsample_every = " << c.sample_every << "\nseed = " << c.seed
     << '\n';
  if (!c.out_dir.empty()) os << "out_dir = " << c.out_dir << '\n';
  os << "\n[monitors]\nN = " << c.N << "\nk = " << c.k << "\ns = " << c.s << "\na = " << c.frak_a
     << "\ndelta = " << c.delta << "\nbootstrap_constant = " << c.bootstrap_constant << "\n\n";
  os << "[experiment]\nkind = " << c.experiment << "\nsweep = " << c.sweep << "\nM_list = " << list(c.M_list)
     << "\norders = " << list(c.orders) << "\norder = " << c.order << "\nphase = " << c.phase
     << "\nsigns = " << c.signs << "\ncheck = " << c.check << "\ntrials = " << c.trials << '\n';
  if (!c.trajectory.empty()) os << "trajectory = " << c.trajectory << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double declared_support_radius(const RunConfig& cfg) {
  if (cfg.data.support_radius >= 0) return cfg.data.support_radius;
  if (cfg.data.generator == "zero") return 0.0;
  if (cfg.data.generator == "gaussian") {
    // Where the profile drops below the 1e-10 support threshold.
    return cfg.data.sigma * std::sqrt(2.0 * std::log(1e10));
  }
  std::vector<Field> f;
  for (const std::string* p : {&cfg.data.U0, &cfg.data.U1, &cfg.data.V0, &cfg.data.V1})
    if (!p->empty()) f.push_back(read_fld(*p).field);
  double r = 0.0;
  for (const Field& x : f) r = std::max(r, support_radius({&x}));
  return r;
}

std::vector<std::string> validate(const RunConfig& c) {
  auto rule = [](bool ok, const std::string& name, const std::string& msg) {
    if (!ok) fail(ErrorCode::ValidationError, name + ": " + msg);
  };
  try {
    c.grid.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ValidationError, std::string("grid: ") + e.what());
  }
  static const char* kinds[] = {"simulate", "resonance", "eft-data", "eft-solve", "certify", "sweep"};
  rule(std::find(std::begin(kinds), std::end(kinds), c.experiment) != std::end(kinds), "experiment",
       "unknown kind '" + c.experiment + "'");
  rule(c.data.generator == "gaussian" || c.data.generator == "zero" || c.data.generator == "fld", "data",
       "unknown generator '" + c.data.generator + "'");
  rule(c.data.generator != "fld" || !c.data.U0.empty(), "data", "generator fld needs at least U0");
  rule(c.data.sigma > 0, "data", "sigma must be positive");
  rule(c.M > 1.0, "physics", "M must exceed 1");
  rule(c.E > 0.0, "physics", "E must be positive");
  rule(c.T >= 0.0 && std::isfinite(c.T), "run", "T must be finite and >= 0");
  rule(c.dt >= 0.0, "run", "dt must be >= 0 (0 selects the default)");
  rule(c.sample_every > 0.0, "run", "sample_every must be positive");
  rule(c.N >= 1 && c.k >= 0, "monitors", "N >= 1 and k >= 0 required");
  rule(c.N >= c.k + 3, "desk ordering", "N >= k+3 required (N = " + std::to_string(c.N) + ", k = " +
                                             std::to_string(c.k) + ")");
  rule(c.delta > 0.0 && c.delta < 1.0 / 6.0, "monitors", "delta must lie in (0, 1/6)");
  rule(c.order >= 0, "experiment", "order must be >= 0");
  for (int o : c.orders) rule(o >= 0, "experiment", "orders must be >= 0");
  for (double m : c.M_list) rule(m > 1.0, "experiment", "M_list entries must exceed 1");
  if (c.experiment == "sweep") {
    rule(c.M_list.size() >= 4, "sweep", "at least 4 M values");
    static const char* sweeps[] = {"decay", "vm_suppression", "scattering_gap", "xnorm_bound", "hierarchy_gap"};
    rule(std::find(std::begin(sweeps), std::end(sweeps), c.sweep) != std::end(sweeps), "sweep",
         "unknown sweep experiment '" + c.sweep + "'");
  }
  if (c.experiment == "resonance") {
    rule(c.phase == "u" || c.phase == "v", "resonance", "phase must be u or v");
    rule(c.check == "separation" || c.check == "bounds" || c.check == "symbols" || c.check == "opnorm",
         "resonance", "unknown check '" + c.check + "'");
    try {
      PhaseSpec::parse_signs(c.signs);
    } catch (const Error& e) {
      fail(ErrorCode::ValidationError, std::string("resonance: ") + e.what());
    }
  }
  rule(c.trials > 0, "experiment", "trials must be positive");

  const bool needs_box = c.experiment != "resonance" && c.trajectory.empty();
  if (needs_box) {
    const double R = declared_support_radius(c);
    const double need = 2.0 * (R + c.T);
    if (c.grid.length < need) {
      std::ostringstream os;
      os << "causality budget: box length " << c.grid.length << " < 2(R + T) = " << need << " (R = " << R
         << ", T = " << c.T << "); needs L >= " << need;
      fail(ErrorCode::ValidationError, os.str());
    }
  }

  std::vector<std::string> audit;
  auto flag = [&](bool holds, const std::string& rule_text) {
    audit.push_back(rule_text + (holds ? ": satisfied" : ": not satisfied (recorded deviation)"));
  };
  flag(c.N >= c.k + 3, "N >= k+3 (desk rule)");
  flag(c.N > c.k + 6, "N > k+6");
  flag(c.k > c.s + 2, "k > s+2");
  flag(c.s > c.frak_a, "s > a");
  return audit;
}

}  // namespace kgeft
