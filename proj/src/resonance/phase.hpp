#pragma once

#include <array>
#include <cmath>
#include <string>

namespace kgeft {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
double length(const Vec3& a);
Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);
inline double japanese(double x, double m = 1.0) { return std::sqrt(x * x + m * m); }
inline double japanese(const Vec3& x, double m = 1.0) { return japanese(length(x), m); }

// phi(rho, nu) = e0 <rho>_{m0} + e1 <nu>_{m1} + e2 <rho - nu>_{m2}
struct PhaseSpec {
  std::array<int, 3> signs{1, -1, 1};
  std::array<double, 3> masses{1.0, 1.0, 1.0};
  double M = 1.0;

  static PhaseSpec u(double M, std::array<int, 3> signs = {1, -1, 1});  // masses (1, M, 1)
  static PhaseSpec v(double M, std::array<int, 3> signs = {-1, 1, 1});  // masses (M, 1, 1)
  static std::array<int, 3> parse_signs(const std::string& s);          // "+-+"
  void validate() const;
};

double phase_eval(const PhaseSpec& spec, const Vec3& rho, const Vec3& nu);
// Gradient in nu at fixed rho.
Vec3 grad_phase_eval(const PhaseSpec& spec, const Vec3& rho, const Vec3& nu);

// nu* = rho M/(M-1), where grad_nu phi_u vanishes for the (+,-,+) choice.
Vec3 space_resonance_point(const PhaseSpec& spec, const Vec3& rho);

// Smooth step: 1 on |x| <= 1, 0 on |x| >= 2, built from exp(-1/y).
double bump(double x);

// The chi_S / chi_T split around the space-resonant point.
struct CutoffPartition {
  PhaseSpec phase;

  double chi_S(const Vec3& rho, const Vec3& nu) const;
  double chi_T(const Vec3& rho, const Vec3& nu) const { return 1.0 - chi_S(rho, nu); }
};

}  // namespace kgeft
