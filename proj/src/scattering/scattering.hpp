#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/fit.hpp"
#include "eft/hierarchy.hpp"
#include "propagators/propagators.hpp"
#include "uv/monitors.hpp"

namespace kgeft {

// Profiles at the final time together with the Cauchy diagnostic
// |l(T) - l(T/2)|_{H^k}. Light profiles are in the w = M U scale.
struct ScatteredState {
  ProfileSet f;
  double T = 0.0;
  int k = 0;
  double cauchy_gap = 0.0;
  double tail = 0.0;        // extrapolated |l(inf) - l(T)| from the profile increments
  double tail_exponent = 0.0;
  bool converged = false;   // cauchy_gap == 0, or tail finite and cauchy_gap <= 10 tail
  bool has_heavy = true;    // false for EFT runs
  std::string source;       // "uv" or "eft"
};

// Trajectory: time-ordered profile snapshots containing T and T/2.
// NotConverged is soft: the state comes back with converged = false.
ScatteredState extract_scattered_state(const std::vector<ProfileSet>& trajectory, int k, double T);

// UV profile snapshots (rescaled variables) mapped to the w scale.
ScatteredState scattered_state_from_uv(const std::vector<ProfileSet>& rescaled_profiles, int k, double T);
ScatteredState scattered_state_from_hierarchy(const HierarchyResult& r, int level, int k);

// |l_uv - l_eft|_{H^k}. Throws ConventionMismatch unless grids, T and M agree.
double compare_scattered_states(const ScatteredState& a, const ScatteredState& b, int k);

// ---- sweeps ----

enum class Experiment { decay, vm_suppression, scattering_gap, xnorm_bound, hierarchy_gap };
std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct SweepConfig {
  GridSpec grid{1, 512, 400.0};
  // Light data: w = M U0 = amplitude exp(-|x|^2 / (2 sigma^2)), U1 = 0.
  double sigma = 3.0;
  double amplitude = 1.0;
  // xnorm_bound instead scales the data to data_fraction * E / M in the weighted data norm.
  double data_fraction = 0.5;
  double T = 50.0;
  double dt = 0.0;             // 0: min(default_dt, 0.25 / M)
  double hierarchy_dt = 0.02;
  double sample_every = 1.0;
  std::vector<int> orders{0};
  int hierarchy_top = 4;
  int N = 8;
  int k = 5;
  double E = 1.0;
  double metric_regularity = 0.0;  // H^s of the V^m and hierarchy metrics
  bool enforce_budget = false;
  bool snapshots = true;
  MonitorSpec monitor;
  Nonlinearity nonlinearity;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: KGEFT_WORKERS or hardware concurrency

  nlohmann::json to_json() const;
};

struct SweepSeries {
  std::string name;
  std::vector<double> M;
  std::vector<double> values;
  std::optional<ExponentFit> fit;  // set once >= 4 positive values exist
  std::string note;
};

struct SweepRun {
  double M = 0.0;
  int order = 0;
  std::string dir;
  bool ok = false;
  std::string error;
  std::map<std::string, double> metrics;
};

struct SweepResult {
  Experiment experiment = Experiment::decay;
  std::vector<SweepSeries> series;
  std::vector<SweepRun> runs;
  std::size_t succeeded = 0;

  const SweepSeries& series_named(const std::string& name) const;  // InvalidArgument if absent
  nlohmann::json to_json() const;
};

int sweep_workers(int requested);

// Runs one job per (M, order), in parallel, persisting per-run directories plus
// sweep.json / sweep.csv under out_dir when it is non-empty. Throws SweepFailed
// if fewer than 4 runs succeed.
SweepResult run_sweep(Experiment experiment, const std::vector<double>& M_list, const SweepConfig& cfg,
                      const std::filesystem::path& out_dir = {});

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r);

// ---- uniqueness of the scattered state ----

struct UniquenessConfig {
  int n = 0;  // hierarchy level of the two runs
  int k = 1;
  int N = 4;
  std::vector<double> M_list;
  double T = 20.0;
  double dt = 0.0;
  double sample_every = 1.0;
  double amplitude = 1.0;  // perturbation is amplitude M^{-(n+1)} <t>^{-decay} profile
  double decay = 2.0;
  double t_on = 0.0;
  double coefficient = 1.0;
  bool require_certificate = true;
};

struct UniquenessRun {
  double M = 0.0;
  double gap = 0.0;                     // |l - l_probe|_{H^k} at T
  double perturbation_integral = 0.0;   // int_{t_on}^T |probe(s)|_{H^k} ds
  ResidualReport base, probed;
};

struct UniquenessResult {
  std::vector<UniquenessRun> runs;
  SweepSeries gap;
};

// Throws CertificationMissing if either run of some M fails certification.
UniquenessResult uniqueness_probe(const Field& U0, const Field& U1, const Field& profile,
                                  const UniquenessConfig& cfg);

}  // namespace kgeft
