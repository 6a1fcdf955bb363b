#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral/grid.hpp"
#include "uv/uv_solver.hpp"

namespace kgeft {

// Everything a run needs. Missing keys take the desk-scale defaults below;
// serialize() always writes every key so stored configs are explicit.
struct RunConfig {
  GridSpec grid{1, 512, 400.0};

  struct Data {
    std::string generator = "gaussian";  // gaussian | zero | fld
    double sigma = 3.0;
    double amplitude = 1.0;  // of w = M U
    double support_radius = -1.0;  // declared R; < 0 means measure it from the data
    std::string U0, U1, V0, V1;    // .fld paths for generator = fld
    bool operator==(const Data&) const = default;
  } data;

  // physics
  double M = 16.0;
  double E = 1.0;
  Formulation formulation = Formulation::rescaled;
  Nonlinearity nonlinearity;

  // numerics
  double T = 150.0;
  double dt = 0.0;
  double sample_every = 1.0;
  int N = 8;
  int k = 5;
  double s = 3.0;
  double frak_a = 2.0;  // the lossy regularity of the multiplier estimate
  double delta = 1.0 / 14.0;
  double bootstrap_constant = 10.0;
  std::uint64_t seed = 0;
  std::string out_dir;  // exact run directory; empty: content-addressed under the output root

  // experiment
  std::string experiment = "simulate";  // simulate | resonance | eft-data | eft-solve | certify | sweep
  std::string sweep = "scattering_gap";
  std::vector<double> M_list{8.0, 16.0, 32.0, 64.0, 128.0};
  std::vector<int> orders{0};
  int order = 0;
  std::string phase = "u";
  std::string signs = "+-+";
  std::string check = "bounds";  // separation | bounds | symbols | opnorm
  int trials = 200;
  std::string trajectory;  // certify: directory written by eft-solve

  bool operator==(const RunConfig& o) const;
};

bool operator==(const Nonlinearity& a, const Nonlinearity& b);

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config(const std::string& path);  // ParseError with line:column
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value);  // ParseError on bad key/value

std::string serialize(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);  // 16 hex digits, FNV-1a of serialize()

// Data support radius used by the causality rule.
double declared_support_radius(const RunConfig& cfg);

// Throws ValidationError naming the first violated rule. Returns audit flags for
// the paper's parameter inequalities, which are recorded but not enforced.
std::vector<std::string> validate(const RunConfig& cfg);

}  // namespace kgeft
