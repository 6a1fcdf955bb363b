#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "harness/config.hpp"
#include "scattering/scattering.hpp"

namespace kgeft {

inline constexpr const char* kCodeVersion = "kgeft 1.0.0";

struct RunManifest {
  std::string config_hash;
  std::string code_version = kCodeVersion;
  std::string experiment;
  std::string started, finished;  // UTC, ISO 8601
  std::filesystem::path run_dir;
  std::vector<std::string> artifacts;  // relative to run_dir, sorted
  std::map<std::string, bool> monitors;
  std::vector<std::string> audit;
  nlohmann::json summary = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j, const std::filesystem::path& run_dir);
};

// KGEFT_OUTPUT_ROOT overrides the default root; an explicit non-empty request wins over both.
std::filesystem::path output_root(const std::filesystem::path& requested = {});

// Run directory: cfg.out_dir when set, otherwise <root>/<experiment>-<hash prefix>.
std::filesystem::path run_directory(const RunConfig& cfg, const std::filesystem::path& root);

// Validates, runs the pipeline, and writes config.txt + manifest.json into the run
// directory. Module errors are rethrown with the run directory prepended.
RunManifest dispatch(const RunConfig& cfg, const std::filesystem::path& root = {});

void save_manifest(const RunManifest& m);
RunManifest load_manifest(const std::filesystem::path& run_dir_or_file);

enum class PlotFigure { decay_curves, resonance_sheets, sweep_slopes };
PlotFigure plot_figure_from_string(const std::string& s);

// Flat CSVs under <run_dir>/plots; appended to the manifest. Throws MissingArtifact.
std::vector<std::filesystem::path> emit_plot_data(RunManifest& m, PlotFigure figure);

SweepConfig sweep_config_from(const RunConfig& cfg);
UVState initial_state(const RunConfig& cfg);  // rescaled light/heavy data from the recipe

}  // namespace kgeft
