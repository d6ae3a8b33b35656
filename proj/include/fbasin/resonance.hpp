#pragma once

#include <optional>
#include <vector>

#include "fbasin/polyalg.hpp"
#include "fbasin/spectral.hpp"

namespace fbasin {

// A basis element e_j z^alpha of the degree-m homogeneous maps.
struct BasisElement {
  int component = 0;  // 0-based
  MultiIndex alpha;

  auto operator<=>(const BasisElement&) const = default;
};

struct SpecialBasisReport {
  int degree = 0;
  std::vector<BasisElement> entries;
  // min |lambda_j - lambda^alpha| over non-special basis elements.
  double margin = 0.0;
  // Smallest p >= 2 with |lambda_1|^p < |lambda_n|: no special elements in
  // any degree >= p.
  std::optional<int> vanishes_for_all_degrees_ge;
};

struct ResonanceOptions {
  // A divisor is resonant when |lambda_j - lambda^alpha| <= tol |lambda_j|.
  double tol = 1e-9;
  // Non-resonant divisors at or below near_tol |lambda_j| are rejected.
  double near_tol = 1e-6;
};

// lambda^alpha
Complex eigen_power(const Spectrum& spectrum, std::span<const int> alpha);

bool is_special(const Spectrum& spectrum, int component, std::span<const int> alpha, double tol);

SpecialBasisReport special_basis(const Spectrum& spectrum, int m, double tol = 1e-9);

// Smallest p >= 2 with |lambda_1|^p < |lambda_n| (nullopt for an empty or
// non-attracting spectrum).
std::optional<int> special_free_degree(const Spectrum& spectrum);

// Gamma_A H = A∘H - H∘A for a linear map A.
HomogeneousMap commutator_apply(const CMatrix& a, const HomogeneousMap& h);

struct CommutatorSolution {
  HomogeneousMap X;  // supported on special basis elements
  HomogeneousMap H;
};

// Decomposes R = X + Gamma_A H for lower-triangular A whose diagonal carries
// the spectrum. Diagonal A uses the explicit projection onto the special
// elements; otherwise Gamma_A is triangular in the order (component
// ascending, multi-index lexicographically ascending) and the system is
// solved by forward substitution.
CommutatorSolution commutator_solve(const CMatrix& a, const HomogeneousMap& r, ResonanceOptions options = {});

}  // namespace fbasin
