#include "eft/eft_data.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace kgeft {

int EFTConfig::depth() const { return std::max({jet_depth, 2 * order + 2, 2}); }

void EFTConfig::validate() const {
  require(order >= 0, ErrorCode::InvalidArgument, "EFT order must be >= 0");
  require(M >= 2.0, ErrorCode::InvalidArgument, "M must be >= 2");
  require(N >= 1 && k >= 0, ErrorCode::InvalidArgument, "N >= 1 and k >= 0 required");
}

UVState EFTDataBundle::state(double M) const { return {U0, U1, V0, V1, M, 0.0, Formulation::rescaled}; }

EFTDataBundle make_eft_data(const Field& U0, const Field& U1, const EFTConfig& cfg) {
  cfg.validate();
  require_same_grid(U0, U1);
  const double M = cfg.M;
  const int n = cfg.order;
  if (cfg.enforce_budget) {
    const double b = M * norm(U0, NormSpec::hs(cfg.N + 2 * n + 1));
    require(b <= cfg.E, ErrorCode::BudgetExceeded,
            "M|U0|_H^{N+2n+1} = " + std::to_string(b) + " exceeds E = " + std::to_string(cfg.E));
  }
  EFTDataBundle out;
  out.U0 = transform(U0, Space::physical);
  out.U1 = transform(U1, Space::physical);
  out.V0 = Field::zeros(U0.grid());
  out.V1 = out.V0;
  out.order = n;
  if (n == 0) return out;
  const int J = std::max(cfg.depth(), 2 * n + 1);
  double prev_gap = -1.0;
  for (int pass = 0; pass <= n; ++pass) {
    auto [Uj, Vj] = eom_jet_closure(JetField({out.U0, out.U1}), JetField({out.V0, out.V1}), M, J,
                                    cfg.nonlinearity);
    Field V0 = Field::zeros(U0.grid()), V1 = V0;
    std::vector<Field> P, Pt;
    for (int i = 1; i <= n; ++i) {
      JetField F = eft_functional(i, Uj);
      const double w = std::pow(M, -2.0 * i);
      P.push_back(F[0]);
      Pt.push_back(F[1]);
      V0 = V0 - Complex(w) * F[0];
      V1 = V1 - Complex(w) * F[1];
    }
    const double gap = norm(V0 - out.V0, NormSpec::hs(0));
    const double scale = norm(V0, NormSpec::hs(0));
    out.iterate_gaps.push_back(gap);
    // Contraction by M^2/2 per pass, ignoring gaps already at round-off level.
    if (prev_gap > 0 && gap > 1e-13 * scale)
      require(gap <= prev_gap * 2.0 / (M * M), ErrorCode::NonConvergence,
              "EFT data iteration failed to contract at pass " + std::to_string(pass));
    prev_gap = gap;
    out.V0 = real_part(V0);
    out.V1 = real_part(V1);
    out.P_terms = std::move(P);
    out.P_tilde_terms = std::move(Pt);
  }
  return out;
}

Field vm_transform(const UVState& s, int m, const Nonlinearity& nl) {
  require(m >= 0, ErrorCode::InvalidArgument, "V^m needs m >= 0");
  const UVState r = change_variables(s, Formulation::rescaled);
  if (m == 0) return transform(r.V, Space::physical);
  auto [Uj, Vj] = eom_jet_closure(JetField({r.U, r.Ut}), JetField({r.V, r.Vt}), r.M,
                                  std::max(2, 2 * m + 1), nl);
  Field out = transform(r.V, Space::physical);
  for (int i = 1; i <= m; ++i)
    out = out + Complex(std::pow(r.M, -2.0 * i)) * eft_functional(i, Uj)[0];
  return real_part(out);
}

std::vector<Field> vm_transform(const std::vector<UVState>& trajectory, int m, const Nonlinearity& nl) {
  std::vector<Field> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(vm_transform(s, m, nl));
  return out;
}

}  // namespace kgeft
