#include "spectral/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "common/error.hpp"

namespace kgeft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void GridSpec::validate() const {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "grid dim must be 1, 2 or 3");
  require(n >= 8 && (n & (n - 1)) == 0, ErrorCode::InvalidArgument,
          "grid n_per_axis must be a power of two >= 8");
  require(length > 0 && std::isfinite(length), ErrorCode::InvalidArgument,
          "grid box_length must be positive");
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double GridSpec::dk() const { return 2.0 * std::numbers::pi / length; }

std::shared_ptr<const GridContext> GridContext::get(const GridSpec& grid) {
  grid.validate();
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, double>, std::weak_ptr<const GridContext>> cache;
  std::lock_guard lock(cache_mutex);
  auto key = std::make_tuple(grid.dim, grid.n, grid.length);
  if (auto it = cache.find(key); it != cache.end()) {
    if (auto sp = it->second.lock()) return sp;
  }
  std::shared_ptr<const GridContext> sp(new GridContext(grid));
  cache[key] = sp;
  return sp;
}

GridContext::GridContext(const GridSpec& grid) : grid_(grid), size_(grid.size()) {
  const int d = grid.dim;
  const int n = grid.n;
  std::vector<int> dims(d, n);
  {
    std::lock_guard lock(planner_mutex());
    auto* tmp_in = fftw_alloc_complex(size_);
    auto* tmp_out = fftw_alloc_complex(size_);
    plan_fwd_ = fftw_plan_dft(d, dims.data(), tmp_in, tmp_out, FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft(d, dims.data(), tmp_in, tmp_out, FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_fwd_ip_ = fftw_plan_dft(d, dims.data(), tmp_in, tmp_in, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ip_ = fftw_plan_dft(d, dims.data(), tmp_in, tmp_in, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(tmp_in);
    fftw_free(tmp_out);
  }
  require(plan_fwd_ && plan_bwd_ && plan_fwd_ip_ && plan_bwd_ip_, ErrorCode::Internal, "FFTW planning failed");

  const double dk = grid.dk();
  const double dx = grid.dx();
  k2_.assign(size_, 0.0);
  for (int a = 0; a < d; ++a) {
    kaxis_[a].assign(size_, 0.0);
    xaxis_[a].assign(size_, 0.0);
  }
  mask_.assign(size_, 1);
  parity_.assign(size_, 1);
  mirror_.assign(size_, 0);
  // Modes with |k| <= n/3 on every axis survive the 2/3 rule.
  const int cutoff = n / 3;
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t rem = flat;
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % n);
      rem /= n;
    }
    int par = 0;
    std::size_t mirror_flat = 0;
    for (int a = 0; a < d; ++a) {
      const int km = signed_mode(idx[a], n);
      const double k = dk * km;
      kaxis_[a][flat] = k;
      xaxis_[a][flat] = -0.5 * grid.length + dx * idx[a];
      k2_[flat] += k * k;
      par += idx[a];
      if (std::abs(km) > cutoff) mask_[flat] = 0;
      mirror_flat = mirror_flat * n + static_cast<std::size_t>((n - idx[a]) % n);
    }
    parity_[flat] = (par % 2 == 0) ? 1 : -1;
    mirror_[flat] = mirror_flat;
  }
}

GridContext::~GridContext() {
  std::lock_guard lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  if (plan_fwd_ip_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_ip_));
  if (plan_bwd_ip_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_ip_));
}

void GridContext::forward(std::span<const Complex> in, std::span<Complex> out) const {
  require(in.size() == size_ && out.size() == size_, ErrorCode::GridMismatch,
          "forward transform size mismatch");
  auto plan = in.data() == out.data() ? plan_fwd_ip_ : plan_fwd_;
  fftw_execute_dft(static_cast<fftw_plan>(plan),
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = std::pow(grid_.dx(), grid_.dim);
  for (std::size_t i = 0; i < size_; ++i) out[i] *= scale * parity_[i];
}

void GridContext::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  require(in.size() == size_ && out.size() == size_, ErrorCode::GridMismatch,
          "inverse transform size mismatch");
  const double scale = 1.0 / std::pow(grid_.length, grid_.dim);
  if (in.data() == out.data()) {
    for (std::size_t i = 0; i < size_; ++i) out[i] *= scale * parity_[i];
  } else {
    for (std::size_t i = 0; i < size_; ++i) out[i] = in[i] * (scale * parity_[i]);
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_ip_), reinterpret_cast<fftw_complex*>(out.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<double> GridContext::bessel_symbol(double s, double mass) const {
  std::vector<double> out(size_);
  const double m2 = mass * mass;
  for (std::size_t i = 0; i < size_; ++i) out[i] = std::pow(k2_[i] + m2, 0.5 * s);
  return out;
}

}  // namespace kgeft
