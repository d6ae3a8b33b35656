#pragma once

#include <vector>

#include "fbasin/polyalg.hpp"
#include "fbasin/resonance.hpp"
#include "fbasin/spectral.hpp"
#include "fbasin/triangular.hpp"

namespace fbasin {

struct DegreeStep {
  int degree = 0;
  HomogeneousMap R;  // obstruction layer
  HomogeneousMap X;  // absorbed into Gtilde
  HomogeneousMap H;  // T <- T + H∘T
  std::vector<BasisElement> special;  // special basis of this degree
  bool r_special = false;              // R lies in the special span (H = 0)
};

// S, Gtilde and T with S∘Gtilde^{-1}∘S^{-1}∘T∘f - T vanishing to order q.
struct NormalFormResult {
  CMatrix S;       // unitary
  CMatrix linear;  // lower triangular S^{-1} d_0f S, diagonal of Gtilde
  Spectrum spectrum;
  bool normal = false;
  LowerTriangularAuto Gtilde;
  PolyJetMap T;  // exact polynomial of degree <= q-1, T(0) = 0, d_0T = id
  int q = 0;
  std::vector<DegreeStep> log;
  std::vector<double> residual_norms;  // layers 1..q-1
  double scale = 1.0;                  // max(1, |coeff| of f and T up to degree q-1)
  bool vanishing_layers_fast_path = false;

  // G = S∘Gtilde∘S^{-1} and its inverse, pointwise.
  CVector apply_G(const CVector& z) const;
  CVector apply_G_inverse(const CVector& z) const;
  bool residual_ok(double rel_tol = 1e-9) const;
};

struct NormalFormOptions {
  ResonanceOptions resonance;
  SchurOptions schur;
};

NormalFormResult normal_form(const PolyJetMap& f, int q, NormalFormOptions options = {});

// Layers 2..p-1 of f vanish (max |coeff| <= 1e-12).
bool low_layers_vanish(const PolyJetMap& f, int p);

// Layers 1..q-1 of S∘Gtilde^{-1}∘S^{-1}∘T∘f - T.
std::vector<HomogeneousMap> residual_jets(const PolyJetMap& f, const NormalFormResult& nf, int q);

}  // namespace fbasin
