#include "resonance/phase.hpp"

#include <cmath>

#include "common/error.hpp"

namespace kgeft {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

PhaseSpec PhaseSpec::u(double M, std::array<int, 3> signs) { return {signs, {1.0, M, 1.0}, M}; }
PhaseSpec PhaseSpec::v(double M, std::array<int, 3> signs) { return {signs, {M, 1.0, 1.0}, M}; }

std::array<int, 3> PhaseSpec::parse_signs(const std::string& s) {
  require(s.size() == 3, ErrorCode::InvalidArgument, "signs must be three characters of + or -");
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    require(s[i] == '+' || s[i] == '-', ErrorCode::InvalidArgument, "signs must be + or -");
    out[i] = s[i] == '+' ? 1 : -1;
  }
  return out;
}

void PhaseSpec::validate() const {
  for (int e : signs) require(e == 1 || e == -1, ErrorCode::InvalidArgument, "phase signs must be +-1");
  for (double m : masses) require(m >= 1.0, ErrorCode::InvalidArgument, "phase masses must be >= 1");
}

double phase_eval(const PhaseSpec& s, const Vec3& rho, const Vec3& nu) {
  return s.signs[0] * japanese(rho, s.masses[0]) + s.signs[1] * japanese(nu, s.masses[1]) +
         s.signs[2] * japanese(rho - nu, s.masses[2]);
}

Vec3 grad_phase_eval(const PhaseSpec& s, const Vec3& rho, const Vec3& nu) {
  const Vec3 d = rho - nu;
  return (s.signs[1] / japanese(nu, s.masses[1])) * nu - (s.signs[2] / japanese(d, s.masses[2])) * d;
}

Vec3 space_resonance_point(const PhaseSpec& s, const Vec3& rho) {
  require(s.M > 1.0, ErrorCode::InvalidArgument, "space resonance needs M > 1");
  return (s.M / (s.M - 1.0)) * rho;
}

double bump(double x) {
  x = std::abs(x);
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - x));
  const double b = std::exp(-1.0 / (x - 1.0));
  return a / (a + b);
}

double CutoffPartition::chi_S(const Vec3& rho, const Vec3& nu) const {
  const double M = phase.M;
  const double r = length(rho);
  const double cr = bump(r);
  double out = bump(length(nu) / 2.0) * cr;
  if (cr < 1.0) {
    const Vec3 e = (1.0 / r) * rho;
    const double par = dot(nu, e);
    const double perp = length(nu - par * e);
    out += (1.0 - cr) * bump(perp) * bump(std::abs(r * M / (M - 1.0) - par) * 4.0 / japanese(r / M));
  }
  return out;
}

}  // namespace kgeft
