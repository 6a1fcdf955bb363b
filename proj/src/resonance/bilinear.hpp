#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "resonance/phase.hpp"
#include "spectral/field.hpp"

namespace kgeft {

struct BilinearSymbol {
  enum class Descriptor { one, chiS_over_phi, chiT_gradphi_over_gradphisq, custom };
  using Evaluator = std::function<Complex(const Vec3& nu1, const Vec3& nu2)>;
  using SingularSet = std::function<bool(const Vec3& nu1, const Vec3& nu2)>;

  Descriptor descriptor = Descriptor::one;
  Evaluator evaluator;
  std::optional<CutoffPartition> partition;  // set for the two phase symbols
  SingularSet singular;                      // custom symbols only; may be empty
  int component = 0;                         // vector component for chiT_gradphi_over_gradphisq

  Complex operator()(const Vec3& nu1, const Vec3& nu2) const { return evaluator(nu1, nu2); }
  double M() const { return partition ? partition->phase.M : 1.0; }

  static BilinearSymbol one();
  // chi_S / (i phi), with rho = nu1 + nu2 and nu = nu1.
  static BilinearSymbol chiS_over_phi(const CutoffPartition& p);
  // chi_T d_c phi / |grad_nu phi|^2 for one component c.
  static BilinearSymbol chiT_gradphi_over_gradphisq(const CutoffPartition& p, int component = 0);
  static BilinearSymbol custom(Evaluator fn, SingularSet singular = {});
};

const char* to_string(BilinearSymbol::Descriptor d);

// T_m(f, g)(rho) = L^{-d} sum_nu m(nu, rho - nu) fhat(nu) ghat(rho - nu), with
// rho - nu taken on the periodic lattice so that T_1(f, g) is exactly the grid
// product. The symbol table is cached when it fits in memory.
class BilinearOperator {
 public:
  BilinearOperator(BilinearSymbol symbol, const GridSpec& grid);
  Field apply(const Field& f, const Field& g) const;  // physical result
  const GridSpec& grid() const { return grid_; }

 private:
  Complex symbol_at(std::size_t i_nu, std::size_t i_rho_minus_nu) const;
  std::size_t wrapped_difference(std::size_t i_rho, std::size_t i_nu) const;

  BilinearSymbol symbol_;
  GridSpec grid_;
  std::shared_ptr<const GridContext> ctx_;
  std::vector<Vec3> freq_;
  std::vector<Complex> table_;  // [i_nu * size + i_second] when cached
};

// Throws GridTooLarge above 1D n = 512, 2D n = 64, 3D n = 16.
Field bilinear_apply(const BilinearSymbol& symbol, const Field& f, const Field& g);

// Norm pairing for the multiplier estimate
//   |T(f,g)|_{W^{k,r}} <~ |f|_{W^{a,p}} |g|_{W^{k,q}} + |f|_{W^{k,pbar}} |g|_{W^{a,qbar}}.
struct MultiplierNorms {
  static constexpr double inf = std::numeric_limits<double>::infinity();
  double k = 0.0;
  double a = 0.0;
  double r = 2.0;
  double p = inf;
  double q = 2.0;
  double pbar = 2.0;
  double qbar = inf;
  double mass = 1.0;
  void validate() const;  // InvalidHolderTriple
};

double multiplier_ratio(const BilinearOperator& op, const Field& f, const Field& g,
                        const MultiplierNorms& norms);

struct OperatorNormEstimate {
  double sup_ratio = 0.0;
  std::vector<double> ratios;
};

// Max of the ratio over `trials` random real band-limited pairs. For the phase
// symbols every other pair is a random wave-packet pair placed on the
// space-resonant point.
OperatorNormEstimate estimate_operator_norm(const BilinearSymbol& symbol, const GridSpec& grid,
                                            const MultiplierNorms& norms, int trials,
                                            std::uint64_t seed);

// Real field with random Gaussian Fourier coefficients inside the 2/3 cutoff,
// shaped by a random shell |rho| ~ center +- width.
Field random_bandlimited_field(const GridSpec& grid, std::mt19937_64& rng);
// Real field concentrated near frequency +-center (a wave packet).
Field wave_packet(const GridSpec& grid, const Vec3& center, double width);

}  // namespace kgeft
