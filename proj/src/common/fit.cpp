#include "common/fit.hpp"

#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace kgeft {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorCode::CausalityBudgetExceeded: return "CausalityBudgetExceeded";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::MinimizationFailed: return "MinimizationFailed";
    case ErrorCode::SupportSamplingEmpty: return "SupportSamplingEmpty";
    case ErrorCode::StencilOutOfRange: return "StencilOutOfRange";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidHolderTriple: return "InvalidHolderTriple";
    case ErrorCode::InsufficientJetDepth: return "InsufficientJetDepth";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TailFitInconclusive: return "TailFitInconclusive";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConventionMismatch: return "ConventionMismatch";
    case ErrorCode::CertificationMissing: return "CertificationMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SweepFailed: return "SweepFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y,
                          std::pair<double, double> window) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit: size mismatch");
  ExponentFit fit;
  fit.window = window;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.first || x[i] > window.second) continue;
    if (!(y[i] > 0.0) || !(x[i] > 0.0) || !std::isfinite(y[i])) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    fit.samples.emplace_back(x[i], y[i]);
  }
  const std::size_t n = lx.size();
  require(n >= 2, ErrorCode::InvalidArgument, "fit: fewer than two usable samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0, ErrorCode::InvalidArgument, "fit: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.slope_stderr = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
  return fit;
}

ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  return fit_power_law(x, y, {-std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()});
}

nlohmann::json to_json(const ExponentFit& fit) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& [x, y] : fit.samples) samples.push_back({x, y});
  auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"residual", fit.residual},
          {"slope_stderr", fit.slope_stderr},
          {"window", {finite_or_null(fit.window.first), finite_or_null(fit.window.second)}},
          {"samples", samples}};
}

}  // namespace kgeft
