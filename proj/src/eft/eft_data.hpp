#pragma once

#include <vector>

#include "eft/jets.hpp"
#include "uv/uv_solver.hpp"

namespace kgeft {

struct EFTConfig {
  int order = 0;  // n
  int N = 8;
  int k = 5;
  double M = 16.0;
  int jet_depth = 2;  // raised to at least 2n + 2
  double E = 1.0;
  bool enforce_budget = true;
  Nonlinearity nonlinearity;

  int depth() const;
  void validate() const;
};

struct EFTDataBundle {
  Field U0, U1, V0, V1;
  int order = 0;
  std::vector<Field> P_terms;        // F_i at jet index 0, i = 1..n
  std::vector<Field> P_tilde_terms;  // F_i at jet index 1
  std::vector<double> iterate_gaps;  // |V0^(p) - V0^(p-1)|_{L^2} per pass
  UVState state(double M) const;     // rescaled state at t = 0
};

// Heavy data in the ground state to order n: V = -sum_{i<=n} F_i[U]/M^{2i}, with the
// time derivatives inside F_i generated by the eom. Throws BudgetExceeded when
// M |U0|_{H^{N+2n+1}} > E (if enforced), NonConvergence if the passes do not contract.
EFTDataBundle make_eft_data(const Field& U0, const Field& U1, const EFTConfig& cfg);

// V^m = V + sum_{i<=m} F_i[U]/M^{2i}, evaluated on a rescaled state.
Field vm_transform(const UVState& s, int m, const Nonlinearity& nl = {});
std::vector<Field> vm_transform(const std::vector<UVState>& trajectory, int m, const Nonlinearity& nl = {});

}  // namespace kgeft
