#pragma once

// Internal: truncated scalar polynomials in n variables and their products.

#include <cstdint>
#include <memory>
#include <vector>

#include "fbasin/polyalg.hpp"

namespace fbasin::detail {

// For every pair (i, j) of monomials of degrees (da, db), the rank of their
// product within degree da + db. Row-major: i * Q(db) + j.
std::shared_ptr<const std::vector<std::uint32_t>> product_table(int n, int da, int db);

// Dense scalar polynomial with layers of degree low..order (lower layers are
// implicitly zero).
struct ScalarJet {
  int n = 0;
  int order = 0;
  int low = 0;
  std::vector<std::vector<Complex>> layers;  // index d in [0, order]

  ScalarJet() = default;
  ScalarJet(int n_, int order_, int low_);

  void add_scaled(const ScalarJet& other, Complex k);
};

ScalarJet multiply(const ScalarJet& a, const ScalarJet& b, int order);

// Component `component` of f as a scalar jet truncated at `order`.
ScalarJet component_jet(const PolyJetMap& f, int component, int order);

// Components of f∘g truncated at `order`, with g given componentwise.
std::vector<ScalarJet> substitute(const PolyJetMap& f, const std::vector<ScalarJet>& g, int order);

}  // namespace fbasin::detail
