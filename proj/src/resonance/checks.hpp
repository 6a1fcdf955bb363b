#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "common/fit.hpp"
#include "resonance/bilinear.hpp"
#include "resonance/phase.hpp"

namespace kgeft {

// ---- separation of {phi_u = 0} from the space-resonant point ----

struct SeparationSample {
  double M = 0.0;
  Vec3 rho{};
  double distance = 0.0;
  Vec3 nearest{};  // point of {phi_u = 0} realizing the distance
};

struct SeparationReport {
  std::vector<SeparationSample> samples;
  std::vector<double> M;
  std::vector<double> min_distance;  // over rho samples, per M
  ExponentFit fit;                   // log(min_distance) against log(M)
};

// Distance from nu* to the zero set of phi_u along the reduced (nu_par, |nu_perp|)
// half-plane: ray bisection over angles from nu*, refined by golden search from
// the best coarse seeds. Throws MinimizationFailed if no ray meets the zero set.
double resonance_distance(const PhaseSpec& spec, const Vec3& rho, Vec3* nearest = nullptr);

SeparationReport verify_separation(const std::vector<double>& M_list, const std::vector<Vec3>& rho_samples,
                                   std::array<int, 3> signs = {1, -1, 1});

// ---- lower bounds on the two pieces of the partition ----

struct LowerBoundRow {
  double M = 0.0;
  double inf_S = 0.0;  // inf |phi| <rho-nu> / M over chi_S > 0.01
  double inf_T = 0.0;  // inf |grad phi| min(<rho-nu>^2, <nu/M>^2) over chi_T > 0.01
  std::size_t count_S = 0;
  std::size_t count_T = 0;
  double partition_defect = 0.0;  // max |chi_S + chi_T - 1|
  double range_min = 1.0;         // min chi_S and chi_T seen
  double range_max = 0.0;
  Vec3 argmin_rho_S{};
  Vec3 argmin_nu_S{};
};

struct LowerBoundReport {
  std::vector<LowerBoundRow> rows;
  double c_S = 0.0;            // min over M of inf_S
  double c_T = 0.0;
  double stability_S = 0.0;    // max/min of inf_S across M
  double stability_T = 0.0;
  bool pass_S = false;         // positive and stable within factor 3
  bool pass_T = false;
};

LowerBoundReport verify_lower_bounds(const std::vector<double>& M_list, std::size_t samples_per_M,
                                     std::uint64_t seed);

// ---- finite-difference checks of the symbol estimates ----

// Central difference of order 0..3 in variable 1 (nu1) or 2 (nu2) along axis 0,
// step h = 1e-3 (1 + |nu_k|), returned as a magnitude. Throws StencilOutOfRange on non-finite stencil values.
double symbol_derivative(const BilinearSymbol& m, const Vec3& nu1, const Vec3& nu2, int variable,
                         int order);
// The estimate the derivative is compared against.
double symbolic_envelope(const BilinearSymbol& m, const Vec3& nu1, const Vec3& nu2, int variable, int order);

struct SymbolicBoundRow {
  double M = 0.0;
  int variable = 1;
  int order = 0;
  double sup_ratio = 0.0;
  std::size_t samples = 0;
};

struct SymbolicBoundReport {
  std::vector<SymbolicBoundRow> rows;
  double stability = 1.0;  // worst max/min of sup_ratio across M for one (variable, order)
  bool stable = false;     // stability <= 5
};

using SymbolFamily = std::function<BilinearSymbol(double M)>;

SymbolicBoundReport verify_symbolic_bounds(const SymbolFamily& family, int max_order,
                                           const std::vector<double>& M_list, std::size_t samples_per_M,
                                           std::uint64_t seed);

// ---- resonance sheets ----

struct SheetRow {
  double nu_par, nu_perp, phi, grad_norm, chi_S;
};

// Samples phi_u on the (nu_par, nu_perp) half-plane for |rho| along axis 0.
std::vector<SheetRow> resonance_sheet(const PhaseSpec& spec, double rho_mag, int resolution);
void write_sheet_csv(const std::string& path, const std::vector<SheetRow>& rows);

}  // namespace kgeft
