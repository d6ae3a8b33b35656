#pragma once

// Automorphism sequences f_1, f_2, ... of C^n fixing the origin, built from
// words of elementary invertible maps.

#include <cstdint>
#include <vector>

#include "fbasin/bounds.hpp"
#include "fbasin/polyalg.hpp"

namespace fbasin {

// c z^alpha added to one output component (0-based).
struct PolyTerm {
  int component = 0;
  MultiIndex alpha;
  Complex coeff;
  bool operator==(const PolyTerm&) const = default;
};

enum class PrimitiveKind { kLinear, kDiagonal, kTriangular, kShear, kSwap };

// One invertible map fixing 0.
//   linear:     z -> M z
//   diagonal:   z_v -> c_v z_v
//   triangular: z_v -> c_v z_v + (terms of component v in z_1..z_{v-1})
//   shear:      z_k -> z_k + (terms of component k free of z_k)
//   swap:       exchanges z_a and z_b
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kDiagonal;
  CMatrix matrix;
  std::vector<Complex> diagonal;
  std::vector<PolyTerm> terms;
  int component = 0;
  int swap_a = 0;
  int swap_b = 1;

  static Primitive linear(CMatrix m);
  static Primitive diag(std::vector<Complex> c);
  static Primitive triangular(std::vector<Complex> c, std::vector<PolyTerm> terms);
  static Primitive shear(int component, std::vector<PolyTerm> terms);
  static Primitive swap(int a, int b);

  // Throws kValidation for a singular linear part, a constant term or a
  // term that would break invertibility.
  void validate(int n) const;
  CVector apply(const CVector& z) const;
  // Exact polynomial form.
  PolyJetMap to_map(int n) const;
  int degree() const;
  bool operator==(const Primitive& other) const;
};

// Applied first to last: word {a, b} is b∘a.
using Word = std::vector<Primitive>;

CVector apply_word(const Word& word, const CVector& z);
PolyJetMap word_jet(const Word& word, int n, int order);

enum class SequenceKind { kSingle, kCyclic, kPerturbed };

struct Perturbation {
  int q_min = 2;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  bool operator==(const Perturbation&) const = default;
};

// kSingle: f_j = maps[0]. kCyclic: f_j = maps[(j-1) mod size].
// kPerturbed: f_j = maps[(j-1) mod size] ∘ P_j where P_j adds to each
// z_v random terms of degree q_min in z_1..z_{v-1}. Coefficients are a pure
// function of (seed, j, component, multi-index).
struct SequenceSpec {
  int n = 2;
  SequenceKind kind = SequenceKind::kSingle;
  std::vector<Word> maps;
  Perturbation perturbation;
  AttractionParams params;
  int block = 1;

  void validate() const;
  const Word& base(int j) const;
  std::vector<PolyTerm> perturbation_terms(int j) const;
  CVector apply(int j, const CVector& z) const;
  PolyJetMap jet(int j, int order) const;
  bool operator==(const SequenceSpec&) const = default;
};

struct OrbitResult {
  CVector point;  // last finite iterate when diverged
  bool diverged = false;
};

// f_{j,k}(z) = f_k∘...∘f_j(z); k = j - 1 gives z.
OrbitResult orbit_compose(const SequenceSpec& seq, int j, int k, const CVector& z);

// Uniform point in the centered disc of the given radius, keyed by a counter.
Complex keyed_disc_sample(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c, double radius);

}  // namespace fbasin
