#pragma once

#include <vector>

#include "fbasin/types.hpp"

namespace fbasin {

// Eigenvalues sorted by non-increasing modulus (ties: ascending argument,
// then order of discovery).
struct Spectrum {
  std::vector<Complex> eigenvalues;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  const Complex& operator[](int i) const { return eigenvalues[static_cast<std::size_t>(i)]; }
};

struct SchurLower {
  CMatrix S;  // unitary
  CMatrix L;  // lower triangular, L ≈ S^* A S
  Spectrum spectrum;
  bool normal = false;  // A A^* = A^* A within tolerance; L is then diagonal
};

struct SchurOptions {
  double tol = 1e-10;
  bool require_attracting = true;
};

// Unitary reduction A = S L S^* with L lower triangular and its diagonal
// sorted by non-increasing modulus. Already lower-triangular, sorted input is
// returned unchanged with S = I.
SchurLower schur_lower(const CMatrix& a, SchurOptions options = {});

struct SpectrumCheck {
  bool ok = false;
  double lower_margin = 0.0;  // |lambda_n| - s
  double upper_margin = 0.0;  // r - |lambda_1|
  double margin() const { return lower_margin < upper_margin ? lower_margin : upper_margin; }
};

SpectrumCheck spectrum_bounds_check(const Spectrum& spectrum, double r, double s);

// Comparison used for the diagonal order: true when a precedes b.
bool precedes_in_spectrum(Complex a, Complex b, double tol);

}  // namespace fbasin
