#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "propagators/propagators.hpp"
#include "spectral/field.hpp"

namespace kgeft {

enum class Formulation { original, v_modified, rescaled };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

// Which nonlinear terms enter the heavy/light forcings.
struct Nonlinearity {
  double coefficient = 1.0;    // multiplies every nonlinear term; 0 gives the free flow
  bool include_u2v = true;     // the U^2 V term of the heavy equation
  bool exact_v_shift = false;  // the +U^2 heavy term produced by the V shift (absent in the printed eom)
};

struct UVState {
  Field U, Ut, V, Vt;
  double M = 2.0;
  double t = 0.0;
  Formulation formulation = Formulation::rescaled;

  static UVState zero(const GridSpec& grid, double M, Formulation f = Formulation::rescaled);
  const GridSpec& grid() const { return U.grid(); }
};

UVState change_variables(const UVState& s, Formulation target);

// Lawson RK4 on half waves u_+ = Ut + i<D>_m U of real fields. Each component
// obeys d/dt u_+ = i<D>_m u_+ - Fhat, with Fhat supplied by the forcing callback
// (the fields satisfy U_tt = Lap U - m^2 U - F).
class HalfWaveIntegrator {
 public:
  using Forcing =
      std::function<void(double t, const std::vector<CVec>& uplus_hat, std::vector<CVec>& forcing_hat)>;

  HalfWaveIntegrator(std::shared_ptr<const GridContext> ctx, std::vector<double> masses, Forcing forcing);

  void reset(std::vector<CVec> uplus_hat, double t);
  void step(double dt);

  const std::vector<CVec>& state() const { return u_; }
  double time() const { return t_; }
  const GridContext& context() const { return *ctx_; }
  const std::vector<double>& masses() const { return masses_; }

 private:
  void prepare(double dt);
  void eval(double t, const std::vector<CVec>& u, std::vector<CVec>& k);

  std::shared_ptr<const GridContext> ctx_;
  std::vector<double> masses_;
  Forcing forcing_;
  std::vector<CVec> u_;
  double t_ = 0.0;
  double prepared_dt_ = 0.0;
  std::vector<CVec> half_;  // e^{i<rho>_m dt/2}
  std::vector<CVec> k1_, k2_, k3_, k4_, tmp_;
};

// Spectral helpers for real fields represented by their + half wave.
CVec halfwave_from_fields(const GridContext& ctx, std::span<const Complex> U_hat,
                          std::span<const Complex> Ut_hat, double mass);
void fields_from_halfwave(const GridContext& ctx, std::span<const Complex> uplus_hat, double mass,
                          CVec& U_hat, CVec& Ut_hat);
// Masked inverse transform keeping the real part.
void to_physical_real(const GridContext& ctx, std::span<const Complex> spec, CVec& out, bool dealias);
// Forward transform followed by the 2/3 mask, in place.
void to_spectrum_dealiased(const GridContext& ctx, CVec& data);

class UVSolver {
 public:
  UVSolver(const UVState& s, const Nonlinearity& nl = {});

  void step(double dt);
  UVState state() const;
  double time() const { return integ_.time(); }
  double M() const { return M_; }
  Formulation formulation() const { return form_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  // Half-wave spectra (light, heavy) at the current time.
  const std::vector<CVec>& halfwaves() const { return integ_.state(); }

 private:
  void forcing(double t, const std::vector<CVec>& u, std::vector<CVec>& f);

  GridSpec grid_;
  double M_;
  Formulation form_;
  Nonlinearity nl_;
  HalfWaveIntegrator integ_;
  CVec Uh_, Uth_, Vh_, Vth_, U_, Ut_, V_, Vt_, g_, fu_, fv_;
};

// One step of the native equations of the state's formulation.
UVState step(const UVState& s, double dt, const Nonlinearity& nl = {});

// min(0.5 / <rho_max>_M, 0.1 dx), rho_max the largest mode kept by the 2/3 rule.
double default_dt(const GridSpec& grid, double M);
double max_stable_dt(const GridSpec& grid, double M);

}  // namespace kgeft
