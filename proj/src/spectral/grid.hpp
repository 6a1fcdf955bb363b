#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace kgeft {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Periodic box [-L/2, L/2)^d sampled with n points per axis.
struct GridSpec {
  int dim = 1;
  int n = 64;
  double length = 64.0;

  void validate() const;  // throws InvalidArgument
  std::size_t size() const;
  double dx() const { return length / n; }
  double dk() const;
  bool operator==(const GridSpec&) const = default;
};

// Precomputed per-grid data: FFT plans, wavenumbers, coordinates, masks.
// Shared and immutable; obtain through GridContext::get.
class GridContext {
 public:
  static std::shared_ptr<const GridContext> get(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return size_; }

  // Continuum-normalized transforms: fhat(rho) = dx^d sum_j f(x_j) e^{-i rho x_j}
  // with x_j = -L/2 + j dx, and the matching inverse. in/out may alias.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  // Per-mode data, flattened row-major like the samples.
  const std::vector<double>& k2() const { return k2_; }                    // |rho|^2
  const std::vector<double>& k_axis(int axis) const { return kaxis_[axis]; }  // rho_axis
  const std::vector<double>& x_axis(int axis) const { return xaxis_[axis]; }  // x_axis
  const std::vector<unsigned char>& dealias_mask() const { return mask_; }  // 1 = kept
  // Flat index of the mode with negated wavenumber (Hermitian partner).
  const std::vector<std::size_t>& mirror() const { return mirror_; }

  // <rho>_m^s for every mode.
  std::vector<double> bessel_symbol(double s, double mass) const;

  GridContext(const GridContext&) = delete;
  GridContext& operator=(const GridContext&) = delete;
  ~GridContext();

 private:
  explicit GridContext(const GridSpec& grid);

  GridSpec grid_;
  std::size_t size_;
  // Out-of-place and in-place plans; FFTW requires the placement to match.
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  void* plan_fwd_ip_ = nullptr;
  void* plan_bwd_ip_ = nullptr;
  std::vector<double> k2_;
  std::array<std::vector<double>, 3> kaxis_;
  std::array<std::vector<double>, 3> xaxis_;
  std::vector<unsigned char> mask_;
  std::vector<signed char> parity_;
  std::vector<std::size_t> mirror_;
};

// Signed integer mode index for array index j on an n-point axis.
inline int signed_mode(int j, int n) { return j < n / 2 ? j : j - n; }

}  // namespace kgeft
