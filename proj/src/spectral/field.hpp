#pragma once

#include <functional>
#include <span>

#include "spectral/grid.hpp"

namespace kgeft {

enum class Space { physical, fourier };

// Samples of a (generally complex) scalar field on a GridSpec, tagged with the
// representation they live in. Immutable once built.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& grid, Space space, CVec values);

  static Field zeros(const GridSpec& grid, Space space = Space::physical);
  // Samples fn at the centered grid points; x has dim entries.
  static Field sample(const GridSpec& grid, const std::function<Complex(std::span<const double>)>& fn);

  const GridSpec& grid() const { return grid_; }
  Space space() const { return space_; }
  const CVec& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  const GridContext& context() const { return *ctx_; }
  std::shared_ptr<const GridContext> context_ptr() const { return ctx_; }

  Field to(Space target) const;

 private:
  GridSpec grid_;
  Space space_ = Space::physical;
  CVec values_;
  std::shared_ptr<const GridContext> ctx_;
};

Field transform(const Field& f, Space target);

// F^{-1}(<rho>_m^s fhat), returned in the input's representation.
Field bessel_potential(const Field& f, double s, double mass);

// Linear combinations; both operands are brought to a's representation.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(Complex c, const Field& a);
Field conj(const Field& a);
Field real_part(const Field& a);

// Pointwise product with the 2/3 rule applied to inputs and output. Physical result.
Field dealiased_product(const Field& a, const Field& b);
// Zero all modes outside the 2/3 cutoff; keeps representation.
Field dealias(const Field& a);
// Spatial Laplacian (spectral), keeps representation.
Field laplacian(const Field& a);
// Spectral partial derivative along one axis, keeps representation.
Field partial(const Field& a, int axis);

bool same_grid(const Field& a, const Field& b);
void require_same_grid(const Field& a, const Field& b);

// Largest |fhat(rho) - conj(fhat(-rho))| relative to max |fhat|.
double hermitian_defect(const Field& f);

struct NormSpec {
  enum class Kind { Hs, Wkp, weightedHs };
  Kind kind = Kind::Hs;
  double regularity = 0.0;
  double p = 2.0;  // lebesgue exponent, Wkp only; infinity allowed
  double mass = 1.0;

  static NormSpec hs(double s, double mass = 1.0) { return {Kind::Hs, s, 2.0, mass}; }
  static NormSpec wkp(double k, double p, double mass = 1.0) { return {Kind::Wkp, k, p, mass}; }
  static NormSpec weighted(double s, double mass = 1.0) { return {Kind::weightedHs, s, 2.0, mass}; }
  void validate() const;
};

double norm(const Field& f, const NormSpec& spec);

// Span-level kernels shared with the solvers (continuum-normalized spectra).
double hs_norm_spectrum(const GridContext& ctx, std::span<const Complex> fhat, double s, double mass);
double lp_norm_physical(const GridContext& ctx, std::span<const Complex> f, double p);
double wkp_norm_spectrum(const GridContext& ctx, std::span<const Complex> fhat, double k, double p,
                         double mass);
// Throws UnsupportedWeight if f has non-negligible samples outside the central half box.
double weighted_hs_norm_physical(const GridContext& ctx, std::span<const Complex> f, double s,
                                 double mass);
// True if all samples with some |x_a| > L/4 are below 1e-10 max|f|.
bool supported_in_half_box(const GridContext& ctx, std::span<const Complex> f);

}  // namespace kgeft
