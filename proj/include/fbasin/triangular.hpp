#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fbasin/polyalg.hpp"

namespace fbasin {

// Polynomial lower-triangular automorphism: component v reads
// c_v z_v + h_v(z_1, ..., z_{v-1}) with every c_v != 0.
class LowerTriangularAuto {
 public:
  // Validates the triangular structure; throws kZeroDiagonal or
  // kInvalidArgument. Coefficients with |c| <= tol are treated as zero.
  explicit LowerTriangularAuto(PolyJetMap map, double tol = 0.0);

  static LowerTriangularAuto from_linear(const CMatrix& a);

  int dimension() const { return map_.dimension(); }
  int degree() const { return map_.degree(); }
  const PolyJetMap& map() const { return map_; }
  std::vector<Complex> diagonal() const;
  CMatrix linear_part() const { return map_.linear_part(); }
  // G - d_0 G
  PolyJetMap nonlinear_part() const;

  CVector evaluate(const CVector& z) const { return map_.evaluate(z); }
  // G^{-1}(z) by pointwise back-substitution.
  CVector solve(const CVector& z) const;

 private:
  PolyJetMap map_;
};

// Exact polynomial inverse, deg G^{-1} <= (deg G)^{n-1}.
LowerTriangularAuto invert_exact(const LowerTriangularAuto& g);

struct ChainResult {
  // Exact composition; absent when it exceeds the term budget.
  std::optional<LowerTriangularAuto> composed;
  std::vector<LowerTriangularAuto> factors;
  bool degree_check_skipped = false;
  int max_factor_degree = 0;

  int degree() const { return composed ? composed->degree() : -1; }
  CVector evaluate(const CVector& z) const;
};

inline constexpr std::size_t kDefaultChainTermBudget = 512;

// G_k ∘ ... ∘ G_1 for chain = [G_1, ..., G_k].
ChainResult compose_chain(std::span<const LowerTriangularAuto> chain,
                          std::size_t term_budget = kDefaultChainTermBudget);

// Certified C with ||G(z)|| <= C ||z|| on the ball of radius rho: operator
// norm of the linear part plus coefficient sums of the higher layers.
double linear_growth_constant(const PolyJetMap& g, double rho);

// sum_{i=1}^{d^{n-1}} Q(i) sqrt(n)^i C^i
double gamma_chain_bound(int d, int n, double c);

struct InverseBound {
  double radius = 0.0;
  double constant = 0.0;
};

// ||G^{-1}(z)|| <= constant ||z|| for ||z|| < radius, where
// constant = sqrt(n) (n-1)! (1+C)^{n-1} / s^n and radius = delta / constant.
InverseBound inverse_linear_bound(int n, double s, double c, double delta);

struct ChainContainmentSetup {
  double rho = 0.0;
  bool clamped = false;  // rho was reduced to 0.99
  double growth = 0.0;   // C
  int degree = 0;        // d
  double gamma = 0.0;
};

// Constants for G_{1,k}(polydisc rho/sqrt(n)) ⊂ polydisc gamma^k.
ChainContainmentSetup chain_containment_setup(const LowerTriangularAuto& g, double rho);

// First k <= k_max with ||G^k(z)|| < eps for each sample; parallel over
// samples.
std::vector<std::optional<int>> iterates_to_zero_check(const LowerTriangularAuto& g,
                                                       std::span<const CVector> samples, int k_max,
                                                       double eps);

}  // namespace fbasin
