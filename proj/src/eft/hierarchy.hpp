#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eft/jets.hpp"
#include "propagators/propagators.hpp"

namespace kgeft {

// Levels 0..top of (box - 1) w_j = sum_{2 <= i <= j} g_i[w_{j-i}] / M^i, all with the same data.
// w is the O(1) light variable w = M U.
struct HierarchyConfig {
  int top = 0;
  double M = 16.0;
  double coefficient = 1.0;  // scales every g_i
};

// Extra forcing on the top level: amplitude * <t>^{-decay} * profile(x) for t >= t_on.
struct ProbeForcing {
  Field profile;
  double amplitude = 0.0;
  double decay = 2.0;
  double t_on = 0.0;
  double value_scale(double t) const;
};

struct HierarchyOptions {
  double sample_every = 1.0;
  bool check_causality = true;
  std::optional<ProbeForcing> probe;
};

struct HierarchySample {
  double t = 0.0;
  std::vector<CVec> halfwaves;  // w_+ spectra, one per level
};

struct HierarchyResult {
  GridSpec grid;
  HierarchyConfig cfg;
  double dt = 0.0;
  std::size_t steps = 0;
  std::optional<ProbeForcing> probe;
  std::vector<HierarchySample> samples;  // includes t = 0 and the final time

  // Physical (w, w_t) of a level at a stored sample.
  std::pair<Field, Field> fields(int level, std::size_t sample) const;
  // Light profile l_+ = e^{-i<D>t} w_+ at a stored sample (physical space).
  Field profile(int level, std::size_t sample) const;
  // Jets of a level to the requested depth, generated by the hierarchy's own equations.
  JetField jets(int level, std::size_t sample, int depth) const;
};

// U0, U1 are rescaled light data (U = w/M); they are multiplied by M internally.
HierarchyResult solve_eft_hierarchy(const Field& U0, const Field& U1, const HierarchyConfig& cfg, double T,
                                    double dt, const HierarchyOptions& opts = {});

struct TailFit {
  double q = 0.0;          // fitted decay exponent of the last decade
  double integral = 0.0;   // trapezoid over the samples
  double tail = 0.0;       // extrapolated A T^{1-q}/(q-1)
  bool converged = false;  // q > 1 (or identically zero)
  std::string note;
};

// Integral of a sampled non-negative curve plus power-law tail extrapolation.
TailFit tail_integral(const std::vector<double>& t, const std::vector<double>& y);

struct ResidualSample {
  double t = 0.0;
  double R = 0.0, Rt = 0.0;                     // |R_M|_{H^{N-n}}, |d_t R_M|_{H^{N-n}}
  double u_inf = 0.0, ut_inf = 0.0, grad_inf = 0.0;
};

struct ResidualConfig {
  int n = 0;  // hierarchy level the candidate is tested against
  int N = 8;
  double M = 16.0;
  double coefficient = 1.0;
};

struct ResidualReport {
  std::vector<ResidualSample> samples;
  TailFit residual, residual_t, u_decay, ut_decay, grad_decay;
  bool scattering = false;
  std::vector<std::string> notes;  // TailFitInconclusive diagnostics
};

// R_M = M^{n+1} ((box - 1) u - sum_{i<=n} g_i[u] / M^i) from jets (depth >= max(3, loss + 1)).
ResidualReport certify_residual(const std::vector<std::pair<double, JetField>>& trajectory,
                                const ResidualConfig& cfg);

// Convenience: jets of a hierarchy level at every stored sample.
std::vector<std::pair<double, JetField>> hierarchy_trajectory(const HierarchyResult& r, int level, int depth);
// Jets of w = M U for a rescaled UV state via the UV eom.
JetField uv_light_jets(const UVState& s, int depth, const Nonlinearity& nl = {});

}  // namespace kgeft
