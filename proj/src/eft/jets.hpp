#pragma once

#include <utility>

#include "spectral/jet.hpp"
#include "uv/uv_solver.hpp"

namespace kgeft {

// Extends (U, V) jets of the rescaled eom to order J by differentiating
//   U_tt = Lap U - U - (UV - U^3/2)
//   V_tt = Lap V - M^2 V - (U^2 V - U^4/2 + dU.dU)   (+ U^2 with exact_v_shift)
// Inputs need at least jets 0 and 1.
std::pair<JetField, JetField> eom_jet_closure(const JetField& U, const JetField& V, double M, int J,
                                              const Nonlinearity& nl = {});

// F_1 = dU.dU - U^4/2, F_{i+1} = box F_i. Requires depth >= 2i + 1; returns order J - (2i - 1).
JetField eft_functional(int i, const JetField& U);

// Forcing of the single-field hierarchy in the O(1) light variable w:
//   g_2 = -w^3/2,  g_{2p} = -w box^{p-2}(dw.dw) + [p >= 3] w box^{p-3}(w^4)/2,  odd g = 0.
// Returns jets of order J - max(0, i - 3); an all-zero jet for odd i.
JetField hierarchy_forcing(int i, const JetField& w);
// Jet depth of w consumed by hierarchy_forcing(i).
int hierarchy_forcing_loss(int i);

}  // namespace kgeft
