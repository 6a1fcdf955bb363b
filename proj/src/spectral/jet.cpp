#include "spectral/jet.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace kgeft {

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

JetField::JetField(std::vector<Field> jets) : jets_(std::move(jets)) {
  require(!jets_.empty(), ErrorCode::InvalidArgument, "jet field needs at least one entry");
  for (auto& j : jets_) {
    require_same_grid(jets_.front(), j);
    j = transform(j, Space::physical);
  }
}

JetField JetField::truncated(int order) const {
  require(order >= 0 && order <= this->order(), ErrorCode::InsufficientJetDepth,
          "cannot truncate jet to a higher order");
  return JetField(std::vector<Field>(jets_.begin(), jets_.begin() + order + 1));
}

JetField JetField::with(Field next) const {
  auto v = jets_;
  v.push_back(std::move(next));
  return JetField(std::move(v));
}

JetField jet_multiply(const JetField& a, const JetField& b) {
  require(a.grid() == b.grid(), ErrorCode::GridMismatch, "jet_multiply: grids differ");
  const int J = std::min(a.order(), b.order());
  const GridSpec& g = a.grid();
  const auto& ctx = a[0].context();
  const std::size_t n = g.size();
  const auto& mask = ctx.dealias_mask();
  // Dealias each input jet once, then sum products in physical space.
  auto dealiased = [&](const JetField& f) {
    std::vector<CVec> out;
    for (int k = 0; k <= J; ++k) {
      CVec v(n);
      ctx.forward(f[k].values(), v);
      for (std::size_t i = 0; i < n; ++i)
        if (!mask[i]) v[i] = 0.0;
      ctx.inverse(v, v);
      out.push_back(std::move(v));
    }
    return out;
  };
  const auto A = dealiased(a);
  const auto B = dealiased(b);
  std::vector<Field> jets;
  for (int k = 0; k <= J; ++k) {
    CVec acc(n, Complex{});
    for (int j = 0; j <= k; ++j) {
      const double c = binom(k, j);
      const auto& x = A[j];
      const auto& y = B[k - j];
      for (std::size_t i = 0; i < n; ++i) acc[i] += c * x[i] * y[i];
    }
    ctx.forward(acc, acc);
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) acc[i] = 0.0;
    ctx.inverse(acc, acc);
    jets.emplace_back(g, Space::physical, std::move(acc));
  }
  return JetField(std::move(jets));
}

JetField jet_add(const JetField& a, const JetField& b) {
  const int J = std::min(a.order(), b.order());
  std::vector<Field> jets;
  for (int k = 0; k <= J; ++k) jets.push_back(a[k] + b[k]);
  return JetField(std::move(jets));
}

JetField jet_scale(Complex c, const JetField& a) {
  std::vector<Field> jets;
  for (const auto& f : a.jets()) jets.push_back(c * f);
  return JetField(std::move(jets));
}

JetField jet_box(const JetField& f) {
  require(f.order() >= 2, ErrorCode::InsufficientJetDepth, "box needs jets to order 2");
  std::vector<Field> jets;
  for (int k = 0; k + 2 <= f.order(); ++k) jets.push_back(laplacian(f[k]) - f[k + 2]);
  return JetField(std::move(jets));
}

JetField jet_lorentz_dot(const JetField& a, const JetField& b) {
  require(a.order() >= 1 && b.order() >= 1, ErrorCode::InsufficientJetDepth,
          "Lorentz product needs first time derivatives");
  const int J = std::min(a.order(), b.order()) - 1;
  auto shift = [J](const JetField& f) {
    std::vector<Field> v(f.jets().begin() + 1, f.jets().begin() + 2 + J);
    return JetField(std::move(v));
  };
  JetField acc = jet_scale(-1.0, jet_multiply(shift(a), shift(b)));
  for (int ax = 0; ax < a.grid().dim; ++ax) {
    std::vector<Field> da, db;
    for (int k = 0; k <= J; ++k) {
      da.push_back(partial(a[k], ax));
      db.push_back(partial(b[k], ax));
    }
    acc = jet_add(acc, jet_multiply(JetField(std::move(da)), JetField(std::move(db))));
  }
  return acc;
}

}  // namespace kgeft
