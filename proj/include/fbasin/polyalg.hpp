#pragma once

// Complex-coefficient algebra for homogeneous polynomial maps and truncated
// polynomial maps (jets) of C^n fixing the origin.
//
// Monomials of a fixed degree are stored in graded lexicographic order with the
// first exponent most significant and descending, e.g. for n = 2, m = 2:
// z1^2, z1 z2, z2^2. Components are 0-based in this API.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fbasin/types.hpp"

namespace fbasin {

struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}
  MultiIndex(std::initializer_list<int> e) : exponents(e) {}

  int dimension() const { return static_cast<int>(exponents.size()); }
  int order() const;
  int operator[](int k) const { return exponents[static_cast<std::size_t>(k)]; }

  auto operator<=>(const MultiIndex&) const = default;
};

// Q(m): number of multi-indices in n variables of order m.
std::int64_t multi_index_count(int n, int m);

// All multi-indices of order m in n variables, graded lexicographic order.
std::vector<MultiIndex> multi_index_basis(int n, int m);

// Position of `alpha` inside multi_index_basis(n, |alpha|).
std::size_t multi_index_rank(std::span<const int> alpha);

// Flat exponent table (Q(m) rows of n ints) shared between all maps of the
// same shape. Tables are created once and never mutated.
struct MonomialTable {
  int n = 0;
  int degree = 0;
  std::size_t size = 0;
  std::vector<int> exponents;

  std::span<const int> row(std::size_t i) const {
    return {exponents.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

std::shared_ptr<const MonomialTable> monomial_table(int n, int m);

// One homogeneous layer: every component is a homogeneous polynomial of
// degree m. Dense, component-major storage.
class HomogeneousMap {
 public:
  HomogeneousMap() = default;
  HomogeneousMap(int n, int degree);

  int dimension() const { return n_; }
  int degree() const { return degree_; }
  std::size_t basis_size() const { return table_ ? table_->size : 0; }
  const MonomialTable& table() const { return *table_; }

  Complex coeff(int component, std::size_t index) const {
    return coeffs_[static_cast<std::size_t>(component) * basis_size() + index];
  }
  Complex coeff(int component, const MultiIndex& alpha) const;
  void set_coeff(int component, std::size_t index, Complex value) {
    coeffs_[static_cast<std::size_t>(component) * basis_size() + index] = value;
  }
  void set_coeff(int component, const MultiIndex& alpha, Complex value);
  void add_coeff(int component, const MultiIndex& alpha, Complex value);

  std::span<const Complex> coefficients() const { return coeffs_; }
  std::span<Complex> coefficients() { return coeffs_; }

  CVector evaluate(const CVector& z) const;
  // Adds this layer's value at z into `out` using precomputed powers
  // powers[k * (degree + 1) + e] = z_k^e.
  void accumulate(std::span<const Complex> powers, int stride, CVector& out) const;

  double max_abs() const;
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  HomogeneousMap& operator+=(const HomogeneousMap& other);
  HomogeneousMap& operator-=(const HomogeneousMap& other);
  HomogeneousMap& operator*=(Complex scale);
  friend HomogeneousMap operator+(HomogeneousMap a, const HomogeneousMap& b) { return a += b; }
  friend HomogeneousMap operator-(HomogeneousMap a, const HomogeneousMap& b) { return a -= b; }
  friend HomogeneousMap operator*(Complex k, HomogeneousMap a) { return a *= k; }

  bool operator==(const HomogeneousMap& other) const;

 private:
  void check_same_shape(const HomogeneousMap& other) const;

  int n_ = 0;
  int degree_ = 0;
  std::shared_ptr<const MonomialTable> table_;
  std::vector<Complex> coeffs_;
};

// A polynomial self-map of C^n with zero constant term, stored as homogeneous
// layers of degree 1..order. `exact` marks a genuine polynomial of degree
// <= order rather than the truncation of something larger.
class PolyJetMap {
 public:
  PolyJetMap() = default;
  PolyJetMap(int n, int order, bool exact = false);

  static PolyJetMap identity(int n, int order = 1);
  static PolyJetMap linear(const CMatrix& a, int order = 1);

  int dimension() const { return n_; }
  int order() const { return order_; }
  bool exact() const { return exact_; }
  void set_exact(bool exact) { exact_ = exact; }

  const HomogeneousMap& layer(int m) const;
  HomogeneousMap& layer(int m);
  void set_layer(const HomogeneousMap& h);

  CMatrix linear_part() const;
  // Highest degree with a coefficient of magnitude > tol (0 for the zero map).
  int degree(double tol = 0.0) const;
  std::size_t nonzero_terms(double tol = 0.0) const;
  double max_abs() const;

  CVector evaluate(const CVector& z) const;

  PolyJetMap truncated(int order) const;
  // Same map with zero layers appended up to `order` (exactness preserved).
  PolyJetMap extended(int order) const;
  // Drops trailing zero layers; the map keeps at least one layer.
  PolyJetMap trimmed() const;

  PolyJetMap& operator+=(const PolyJetMap& other);
  PolyJetMap& operator-=(const PolyJetMap& other);
  friend PolyJetMap operator+(PolyJetMap a, const PolyJetMap& b) { return a += b; }
  friend PolyJetMap operator-(PolyJetMap a, const PolyJetMap& b) { return a -= b; }

  bool operator==(const PolyJetMap& other) const;

 private:
  int n_ = 0;
  int order_ = 0;
  bool exact_ = false;
  std::vector<HomogeneousMap> layers_;
};

// Jet of f∘g truncated to degree N.
PolyJetMap compose_truncated(const PolyJetMap& f, const PolyJetMap& g, int order);

HomogeneousMap homogeneous_part(const PolyJetMap& f, int m);

PolyJetMap to_jet(const HomogeneousMap& h, int order, bool exact = true);

enum class SupNormMode { kCoeffUpper, kSampleLower };

struct SupNormOptions {
  SupNormMode mode = SupNormMode::kCoeffUpper;
  std::size_t samples = 1000;
};

// Sup of the Euclidean norm over the polydisc of radius delta.
// kCoeffUpper: sum |coeff| delta^m, an upper bound.
// kSampleLower: max over quasi-random points of the distinguished boundary,
// a lower bound. Parallel over samples; the result does not depend on the
// thread count.
double polydisc_sup_norm(const HomogeneousMap& h, double delta, SupNormOptions options = {});
double polydisc_sup_norm(const PolyJetMap& f, double delta, SupNormOptions options = {});
double polydisc_sup_norm_serial(const PolyJetMap& f, double delta, std::size_t samples);

// Deterministic low-discrepancy point on the torus |z_k| = radius.
CVector torus_point(int n, std::size_t index, double radius);

}  // namespace fbasin
