#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include "spectral/field.hpp"

namespace kgeft::test {

// Smooth real field: a few random Gaussians bumps, well inside the box.
inline Field random_smooth_field(const GridSpec& g, std::mt19937_64& rng, double width = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double w = width > 0 ? width : g.length / 16.0;
  double c[4][3], a[4];
  for (int b = 0; b < 4; ++b) {
    a[b] = u(rng);
    for (int d = 0; d < 3; ++d) c[b][d] = 0.15 * g.length * u(rng);
  }
  return Field::sample(g, [&](std::span<const double> x) {
    double v = 0.0;
    for (int b = 0; b < 4; ++b) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) r2 += (x[d] - c[b][d]) * (x[d] - c[b][d]);
      v += a[b] * std::exp(-r2 / (2 * w * w));
    }
    return Complex(v);
  });
}

inline double max_abs_diff(const Field& a, const Field& b) {
  const Field bb = b.to(a.space());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - bb[i]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (const auto& z : a.values()) m = std::max(m, std::abs(z));
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("kgeft-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace kgeft::test
