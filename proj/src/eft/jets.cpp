#include "eft/jets.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace kgeft {

namespace {

JetField jet_power(const JetField& a, int p) {
  JetField r = a;
  for (int i = 1; i < p; ++i) r = jet_multiply(r, a);
  return r;
}

}  // namespace

std::pair<JetField, JetField> eom_jet_closure(const JetField& U, const JetField& V, double M, int J,
                                              const Nonlinearity& nl) {
  require(U.grid() == V.grid(), ErrorCode::GridMismatch, "eom_jet_closure: grids differ");
  require(U.order() >= 1 && V.order() >= 1, ErrorCode::InsufficientJetDepth,
          "eom_jet_closure needs jets 0 and 1");
  require(J >= 2, ErrorCode::InvalidArgument, "closure depth must be >= 2");
  const double m2 = M * M;
  const double c = nl.coefficient;
  std::vector<Field> u(U.jets().begin(), U.jets().begin() + 2);
  std::vector<Field> v(V.jets().begin(), V.jets().begin() + 2);
  // Order r known; the forcing at order r-1 needs U to order r (for dU.dU).
  for (int r = 1; r < J; ++r) {
    const JetField Uj(u), Vj(v);
    const int k = r - 1;
    const JetField Ut = Uj.truncated(k), Vt = Vj.truncated(k);
    const JetField U2 = jet_multiply(Ut, Ut);
    const JetField U3 = jet_multiply(U2, Ut);
    const JetField U4 = jet_multiply(U2, U2);
    Field fu = jet_multiply(Ut, Vt)[k] - Complex(0.5) * U3[k];
    Field fv = Complex(-0.5) * U4[k] + jet_lorentz_dot(Uj.truncated(k + 1), Uj.truncated(k + 1))[k];
    if (nl.include_u2v) fv = fv + jet_multiply(U2, Vt)[k];
    if (nl.exact_v_shift) fv = fv + U2[k];
    u.push_back(laplacian(u[k]) - u[k] - c * fu);
    v.push_back(laplacian(v[k]) - Complex(m2) * v[k] - c * fv);
  }
  return {JetField(std::move(u)), JetField(std::move(v))};
}

JetField eft_functional(int i, const JetField& U) {
  require(i >= 1, ErrorCode::InvalidArgument, "F_i needs i >= 1");
  require(U.order() >= 2 * i + 1, ErrorCode::InsufficientJetDepth,
          "F_" + std::to_string(i) + " needs jet depth >= " + std::to_string(2 * i + 1));
  JetField F = jet_add(jet_lorentz_dot(U, U), jet_scale(-0.5, jet_power(U.truncated(U.order() - 1), 4)));
  for (int s = 1; s < i; ++s) F = jet_box(F);
  return F;
}

int hierarchy_forcing_loss(int i) {
  if (i % 2 == 1 || i < 2) return 0;
  const int p = i / 2;
  return p == 1 ? 0 : 2 * p - 3;
}

JetField hierarchy_forcing(int i, const JetField& w) {
  require(i >= 1, ErrorCode::InvalidArgument, "g_i needs i >= 1");
  const int J = w.order() - hierarchy_forcing_loss(i);
  require(J >= 0, ErrorCode::InsufficientJetDepth,
          "g_" + std::to_string(i) + " needs jet depth >= " + std::to_string(hierarchy_forcing_loss(i)));
  if (i % 2 == 1) return jet_scale(0.0, w.truncated(J));
  const int p = i / 2;
  if (p == 1) return jet_scale(-0.5, jet_power(w, 3));
  JetField q = jet_lorentz_dot(w, w);
  for (int s = 0; s < p - 2; ++s) q = jet_box(q);
  JetField g = jet_scale(-1.0, jet_multiply(w.truncated(q.order()), q));
  if (p >= 3) {
    JetField w4 = jet_power(w, 4);
    for (int s = 0; s < p - 3; ++s) w4 = jet_box(w4);
    g = jet_add(g, jet_scale(0.5, jet_multiply(w.truncated(w4.order()), w4)));
  }
  return g.truncated(J);
}

}  // namespace kgeft
