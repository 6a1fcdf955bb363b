#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "uv/uv_solver.hpp"

namespace kgeft {

struct MonitorSpec {
  int N = 8;
  int k = 5;
  double delta = 1.0 / 14.0;
  double E = 1.0;
  double bootstrap_constant = 10.0;

  double lebesgue_exponent() const { return 1.0 / (1.0 / 6.0 - delta); }
};

// S entries are NaN ("untracked") once the profile leaves the central half box.
struct XNormSample {
  double t = 0.0;
  double Z_light = 0.0, Z_heavy = 0.0;
  double S_light = 0.0, S_heavy = 0.0;
  double N_light = 0.0, N_heavy = 0.0;
  double X_total = 0.0;
};

struct XNormTrace {
  std::vector<XNormSample> samples;
  double bound = 0.0;  // bootstrap constant * E / M
  double max_total() const;
  bool within_bound() const { return max_total() <= bound; }
};

XNormSample measure_xnorm(const UVState& s, const MonitorSpec& spec);
// Same, straight from light/heavy half-wave spectra of the rescaled system.
XNormSample measure_xnorm(const GridContext& ctx, const CVec& uplus_hat, const CVec& vplus_hat, double M,
                          double t, const MonitorSpec& spec);

struct DataNormReport {
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;           // M|U0|_N + M|U1|_{N-1} + M^3|V0|_{N-1} + M^2|V0|_N + M^2|V1|_{N-1}
  double weighted_total = 0.0;  // |u0|_N + M|v0|_N + |x u0|_{k+3/2} + M|x v0|_{k+3/2}
  double E = 0.0;
  double M = 0.0;
  bool weighted = true;
  bool pass = false;  // total < E and, if weighted, weighted_total < E/M
  double term(const std::string& name) const;
};

// Evaluated on the rescaled system. Throws UnsupportedWeight for weighted terms of
// data reaching the outer half of the box.
DataNormReport data_norms(const UVState& s, int N, int k, double E, bool weighted = true);

// Rescaled state U0 = a exp(-|x-c|^2/(2 sigma^2)), everything else zero.
UVState gaussian_state(const GridSpec& grid, double M, double sigma, double amplitude = 1.0);
// Multiplies U, Ut by the factor that puts the weighted data norm at fraction * E/M.
UVState normalize_light_data(const UVState& s, int N, int k, double E, double fraction);

struct EvolveOptions {
  double T = 0.0;
  double dt = 0.0;  // 0 selects default_dt
  double sample_every = 1.0;
  bool monitors = true;
  MonitorSpec monitor;
  std::vector<double> profile_times;
  bool check_causality = true;
  bool enforce_dt = true;
  std::function<void(const UVSolver&)> on_sample;
};

struct EvolveResult {
  UVState final;
  XNormTrace trace;
  std::vector<ProfileSet> profiles;  // rescaled light/heavy profiles at profile_times
  std::size_t steps = 0;
  double dt = 0.0;
  double support_radius = 0.0;
};

// Throws CausalityBudgetExceeded when L < 2(R + T).
void check_causality(const GridSpec& grid, double R, double T);

EvolveResult evolve(const UVState& s, const EvolveOptions& opts, const Nonlinearity& nl = {});

ProfileSet profiles_of(const UVState& s);

void write_trace_csv(const std::filesystem::path& path, const XNormTrace& trace);

}  // namespace kgeft
