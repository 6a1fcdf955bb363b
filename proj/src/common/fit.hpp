#pragma once

#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace kgeft {

// Least-squares fit of log(y) = intercept + slope * log(x).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;        // root-mean-square residual in log space
  double slope_stderr = 0.0;    // standard error of the slope
  std::pair<double, double> window{0.0, 0.0};
  std::vector<std::pair<double, double>> samples;  // (x, y) used in the fit
};

// Fits only the points with window.first <= x <= window.second and y > 0.
// Throws InvalidArgument if fewer than two points survive.
ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y,
                          std::pair<double, double> window);
ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y);

nlohmann::json to_json(const ExponentFit& fit);

}  // namespace kgeft
