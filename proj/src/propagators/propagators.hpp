#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common/fit.hpp"
#include "spectral/field.hpp"

namespace kgeft {

struct HalfWavePair {
  Field plus;
  Field minus;
  double mass = 1.0;
  double time = 0.0;
};

// Scattering coordinates l_± = e^{∓i<D>t} u_± (light, mass 1) and h_± (heavy, mass M).
struct ProfileSet {
  Field l_plus, l_minus, h_plus, h_minus;
  double time = 0.0;
  double M = 1.0;
};

HalfWavePair to_halfwaves(const Field& U, const Field& Ut, double m, double t = 0.0);
// Inverse of to_halfwaves: (U, Ut), physical space.
std::pair<Field, Field> from_halfwaves(const HalfWavePair& w);

// Multiplier e^{sign i <rho>_m t}; result in the input's representation.
Field linear_flow(const Field& w, double m, int sign, double t);

ProfileSet make_profiles(const Field& U, const Field& Ut, const Field& V, const Field& Vt, double M,
                         double t);

// Radius beyond which all samples are below 1e-10 of the peak (max over the given fields).
double support_radius(std::initializer_list<const Field*> fields);

struct DecayOptions {
  double k = 0.0;
  // Fit window; when unset, t > 2m.
  std::optional<std::pair<double, double>> window;
};

// Free Klein-Gordon evolution of the half wave built from (U0, U1); fits
// log ||e^{i<D>t}u_+||_{W^{k,p}} against log t.
ExponentFit measure_decay(const Field& U0, const Field& U1, double m, const std::vector<double>& times,
                          double p, const DecayOptions& opts = {});

// Local log-log slope of the decay curve, useful for locating crossovers.
std::vector<std::pair<double, double>> local_decay_slopes(const ExponentFit& fit);

struct IntegralSample {
  double t = 0.0;
  double integral = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
};

struct IntegralReport {
  double alpha = 0.0, beta = 0.0, M = 1.0;
  std::string independent_case;  // "uncovered" when the lemma gives no envelope
  std::string dependent_case;
  std::vector<IntegralSample> independent;
  std::vector<IntegralSample> dependent;
  double sup_ratio_independent = 0.0;
  double sup_ratio_dependent = 0.0;
};

double integral_independent(double alpha, double beta, double t);
double integral_dependent(double alpha, double beta, double M, double t);

IntegralReport verify_integral_estimates(double alpha, double beta, double M,
                                         const std::vector<double>& t_grid);

}  // namespace kgeft
