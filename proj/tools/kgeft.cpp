// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgeft/kgeft.h"

namespace {

enum Exit { kPass = 0, kMonitorFailure = 1, kConfigError = 2, kRuntimeError = 3 };

int exit_for(int status) {
  if (status == KGEFT_PARSE_ERROR || status == KGEFT_VALIDATION_ERROR || status == KGEFT_CAUSALITY_BUDGET_EXCEEDED)
    return kConfigError;
  return kRuntimeError;
}

int report(int status, const char* what) {
  std::fprintf(stderr, "kgeft %s: %s\n", what, kgeft_last_error());
  return exit_for(status);
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out_root;
  std::string out;
};

struct Override {
  std::string section, key, value;
};

std::string json_of(const kgeft_manifest* m) {
  size_t need = 0;
  kgeft_manifest_json(m, nullptr, 0, &need);
  std::string s(need, '\0');
  kgeft_manifest_json(m, s.data(), s.size(), &need);
  s.resize(need - 1);
  return s;
}

int run(const std::string& kind, const Common& c, const std::vector<Override>& extra) {
  kgeft_config* cfg = nullptr;
  int rc = c.config.empty() ? kgeft_config_new(&cfg) : kgeft_config_parse_file(c.config.c_str(), &cfg);
  if (rc != KGEFT_OK) return report(rc, "config");
  std::vector<Override> all{{"experiment", "kind", kind}};
  for (const auto& s : c.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
      std::fprintf(stderr, "kgeft: --set expects section.key=value, got '%s'\n", s.c_str());
      kgeft_config_free(cfg);
      return kConfigError;
    }
    all.push_back({s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1)});
  }
  all.insert(all.end(), extra.begin(), extra.end());
  if (!c.out.empty()) all.push_back({"run", "out_dir", c.out});
  for (const auto& o : all) {
    rc = kgeft_config_set(cfg, o.section.c_str(), o.key.c_str(), o.value.c_str());
    if (rc != KGEFT_OK) {
      kgeft_config_free(cfg);
      return report(rc, "config");
    }
  }
  kgeft_manifest* m = nullptr;
  rc = kgeft_dispatch(cfg, c.out_root.empty() ? nullptr : c.out_root.c_str(), &m);
  kgeft_config_free(cfg);
  if (rc != KGEFT_OK) return report(rc, kind.c_str());
  std::printf("%s\n", json_of(m).c_str());
  int passed = 0;
  kgeft_manifest_passed(m, &passed);
  kgeft_manifest_free(m);
  return passed ? kPass : kMonitorFailure;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "sectioned key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "override, e.g. --set physics.M=32 (repeatable)");
  sub->add_option("--out-root", c.out_root, "root for content-addressed run directories");
  sub->add_option("--out", c.out, "exact run directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light/heavy Klein-Gordon simulator and EFT verification laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kgeft_version());

  Common common;
  std::vector<Override> extra;
  auto opt = [&](CLI::App* sub, const std::string& flag, const std::string& section, const std::string& key,
                 const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&extra, section, key](const std::string& v) { extra.push_back({section, key, v}); }, help);
  };

  auto* simulate = app.add_subcommand("simulate", "integrate the UV system with monitors");
  add_common(simulate, common);
  opt(simulate, "--M", "physics", "M", "heavy mass");
  opt(simulate, "--T", "run", "T", "final time");

  auto* resonance = app.add_subcommand("resonance", "phase geometry, partition and multiplier checks");
  add_common(resonance, common);
  opt(resonance, "--phase", "experiment", "phase", "u or v");
  opt(resonance, "--signs", "experiment", "signs", "three of + / -, e.g. +-+");
  opt(resonance, "--M", "experiment", "M_list", "comma-separated M values");
  opt(resonance, "--check", "experiment", "check", "separation | bounds | symbols | opnorm");
  opt(resonance, "--trials", "experiment", "trials", "random pairs per M for opnorm");

  auto* eft_data = app.add_subcommand("eft-data", "EFT-compatible heavy initial data");
  add_common(eft_data, common);
  opt(eft_data, "--order", "experiment", "order", "EFT order n");
  opt(eft_data, "--M", "physics", "M", "heavy mass");

  auto* eft_solve = app.add_subcommand("eft-solve", "solve the EFT hierarchy up to level 2n");
  add_common(eft_solve, common);
  opt(eft_solve, "--order", "experiment", "order", "EFT order n");
  opt(eft_solve, "--M", "physics", "M", "heavy mass");
  opt(eft_solve, "--T", "run", "T", "final time");

  auto* certify = app.add_subcommand("certify", "residual certification of an EFT trajectory");
  add_common(certify, common);
  opt(certify, "--trajectory", "experiment", "trajectory", "trajectory directory written by eft-solve");
  opt(certify, "--order", "experiment", "order", "EFT order n (when solving first)");

  auto* sweep = app.add_subcommand("sweep", "M sweep with slope fits");
  add_common(sweep, common);
  opt(sweep, "--experiment", "experiment", "sweep",
      "decay | vm_suppression | scattering_gap | xnorm_bound | hierarchy_gap");
  opt(sweep, "--orders", "experiment", "orders", "comma-separated EFT orders");
  opt(sweep, "--M", "experiment", "M_list", "comma-separated M values");
  opt(sweep, "--T", "run", "T", "final time");

  auto* plot = app.add_subcommand("plot-data", "flat CSVs for external plotting");
  std::string manifest, figure;
  plot->add_option("--manifest", manifest, "run directory or manifest.json")->required();
  plot->add_option("--figure", figure, "decay_curves | resonance_sheets | sweep_slopes")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (plot->parsed()) {
    kgeft_manifest* m = nullptr;
    int rc = kgeft_manifest_load(manifest.c_str(), &m);
    if (rc != KGEFT_OK) return report(rc, "plot-data");
    rc = kgeft_emit_plot_data(m, figure.c_str());
    if (rc != KGEFT_OK) {
      kgeft_manifest_free(m);
      return report(rc, "plot-data");
    }
    std::printf("%s\n", json_of(m).c_str());
    kgeft_manifest_free(m);
    return kPass;
  }
  for (auto* sub : app.get_subcommands()) return run(sub->get_name(), common, extra);
  return kConfigError;
}
