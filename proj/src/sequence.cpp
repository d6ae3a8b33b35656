#include "fbasin/sequence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "fbasin/error.hpp"

namespace fbasin {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::kValidation, msg); }

Complex monomial(const MultiIndex& alpha, const CVector& z) {
  Complex v{1.0, 0.0};
  for (int k = 0; k < alpha.dimension(); ++k)
    for (int e = 0; e < alpha[k]; ++e) v *= z[k];
  return v;
}

void validate_term(const PolyTerm& t, int n, std::size_t index) {
  std::ostringstream where;
  where << "terms[" << index << "]";
  if (t.component < 0 || t.component >= n) invalid(where.str() + ".component out of range");
  if (t.alpha.dimension() != n) invalid(where.str() + ".exponents must have length n");
  for (int e : t.alpha.exponents)
    if (e < 0) invalid(where.str() + ".exponents must be non-negative");
  if (t.alpha.order() == 0) invalid(where.str() + " is a constant term; maps must fix 0");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

Primitive Primitive::linear(CMatrix m) {
  Primitive p;
  p.kind = PrimitiveKind::kLinear;
  p.matrix = std::move(m);
  return p;
}

Primitive Primitive::diag(std::vector<Complex> c) {
  Primitive p;
  p.kind = PrimitiveKind::kDiagonal;
  p.diagonal = std::move(c);
  return p;
}

Primitive Primitive::triangular(std::vector<Complex> c, std::vector<PolyTerm> terms) {
  Primitive p;
  p.kind = PrimitiveKind::kTriangular;
  p.diagonal = std::move(c);
  p.terms = std::move(terms);
  return p;
}

Primitive Primitive::shear(int component, std::vector<PolyTerm> terms) {
  Primitive p;
  p.kind = PrimitiveKind::kShear;
  p.component = component;
  p.terms = std::move(terms);
  return p;
}

Primitive Primitive::swap(int a, int b) {
  Primitive p;
  p.kind = PrimitiveKind::kSwap;
  p.swap_a = a;
  p.swap_b = b;
  return p;
}

void Primitive::validate(int n) const {
  if ((kind == PrimitiveKind::kLinear || kind == PrimitiveKind::kSwap || kind == PrimitiveKind::kDiagonal) &&
      !terms.empty())
    invalid("this primitive takes no terms");
  switch (kind) {
    case PrimitiveKind::kLinear: {
      if (matrix.rows() != n || matrix.cols() != n) invalid("matrix must be n x n");
      const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
      if (std::abs(matrix.fullPivLu().determinant()) <= 1e-14 * std::pow(scale, n)) invalid("matrix is singular");
      return;
    }
    case PrimitiveKind::kDiagonal:
    case PrimitiveKind::kTriangular: {
      if (static_cast<int>(diagonal.size()) != n) invalid("diagonal must have n entries");
      for (int v = 0; v < n; ++v)
        if (diagonal[static_cast<std::size_t>(v)] == Complex{})
          invalid("diagonal entry " + std::to_string(v + 1) + " is zero");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        validate_term(terms[i], n, i);
        for (int k = terms[i].component; k < n; ++k)
          if (terms[i].alpha[k] != 0)
            invalid("terms[" + std::to_string(i) + "] may only use variables below its component");
      }
      return;
    }
    case PrimitiveKind::kShear:
      if (component < 0 || component >= n) invalid("shear component out of range");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        validate_term(terms[i], n, i);
        if (terms[i].component != component) invalid("terms[" + std::to_string(i) + "] must target the shear component");
        if (terms[i].alpha[component] != 0)
          invalid("terms[" + std::to_string(i) + "] must not use the sheared variable");
      }
      return;
    case PrimitiveKind::kSwap:
      if (swap_a < 0 || swap_a >= n || swap_b < 0 || swap_b >= n || swap_a == swap_b)
        invalid("swap needs two distinct components");
      return;
  }
}

CVector Primitive::apply(const CVector& z) const {
  switch (kind) {
    case PrimitiveKind::kLinear:
      return matrix * z;
    case PrimitiveKind::kDiagonal:
    case PrimitiveKind::kTriangular: {
      CVector out(z.size());
      for (Eigen::Index v = 0; v < z.size(); ++v) out[v] = diagonal[static_cast<std::size_t>(v)] * z[v];
      for (const auto& t : terms) out[t.component] += t.coeff * monomial(t.alpha, z);
      return out;
    }
    case PrimitiveKind::kShear: {
      CVector out = z;
      for (const auto& t : terms) out[t.component] += t.coeff * monomial(t.alpha, z);
      return out;
    }
    case PrimitiveKind::kSwap: {
      CVector out = z;
      std::swap(out[swap_a], out[swap_b]);
      return out;
    }
  }
  return z;
}

int Primitive::degree() const {
  int d = 1;
  for (const auto& t : terms) d = std::max(d, t.alpha.order());
  return d;
}

PolyJetMap Primitive::to_map(int n) const {
  PolyJetMap f(n, degree(), true);
  auto& lin = f.layer(1);
  switch (kind) {
    case PrimitiveKind::kLinear:
      f = PolyJetMap::linear(matrix, 1);
      f.set_exact(true);
      return f;
    case PrimitiveKind::kDiagonal:
    case PrimitiveKind::kTriangular:
      for (int v = 0; v < n; ++v) lin.set_coeff(v, static_cast<std::size_t>(v), diagonal[static_cast<std::size_t>(v)]);
      break;
    case PrimitiveKind::kShear:
      for (int v = 0; v < n; ++v) lin.set_coeff(v, static_cast<std::size_t>(v), 1.0);
      break;
    case PrimitiveKind::kSwap:
      for (int v = 0; v < n; ++v) {
        const int src = v == swap_a ? swap_b : (v == swap_b ? swap_a : v);
        lin.set_coeff(v, static_cast<std::size_t>(src), 1.0);
      }
      break;
  }
  for (const auto& t : terms) f.layer(t.alpha.order()).add_coeff(t.component, t.alpha, t.coeff);
  return f;
}

bool Primitive::operator==(const Primitive& other) const {
  const bool same_matrix =
      matrix.rows() == other.matrix.rows() && matrix.cols() == other.matrix.cols() && matrix == other.matrix;
  return kind == other.kind && same_matrix && diagonal == other.diagonal && terms == other.terms &&
         component == other.component && swap_a == other.swap_a && swap_b == other.swap_b;
}

CVector apply_word(const Word& word, const CVector& z) {
  CVector w = z;
  for (const auto& p : word) w = p.apply(w);
  return w;
}

PolyJetMap word_jet(const Word& word, int n, int order) {
  PolyJetMap acc = PolyJetMap::identity(n, order);
  acc.set_exact(true);
  for (const auto& p : word) acc = compose_truncated(p.to_map(n), acc, order);
  return acc;
}

void SequenceSpec::validate() const {
  if (n < 1) invalid("dimension must be >= 1");
  if (maps.empty()) invalid("maps must not be empty");
  if (kind == SequenceKind::kSingle && maps.size() != 1) invalid("a single sequence takes exactly one map");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].empty()) invalid("maps[" + std::to_string(i) + "] is an empty word");
    for (std::size_t k = 0; k < maps[i].size(); ++k) {
      try {
        maps[i][k].validate(n);
      } catch (const Error& e) {
        invalid("maps[" + std::to_string(i) + "][" + std::to_string(k) + "]: " + e.what());
      }
    }
  }
  if (params.n != n) invalid("attraction.n must equal the dimension");
  params.validate();
  if (block < 1) invalid("sequence.block must be >= 1");
  if (kind == SequenceKind::kPerturbed) {
    if (perturbation.q_min < 2) invalid("sequence.perturbation.q_min must be >= 2");
    if (!(perturbation.amplitude >= 0.0)) invalid("sequence.perturbation.amplitude must be >= 0");
  }
}

const Word& SequenceSpec::base(int j) const {
  if (j < 1) throw Error(ErrorKind::kOutOfRange, "sequence index starts at 1");
  if (kind == SequenceKind::kSingle) return maps.front();
  return maps[static_cast<std::size_t>(j - 1) % maps.size()];
}

Complex keyed_disc_sample(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c, double radius) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  const double u = unit_double(h);
  const double v = unit_double(splitmix64(h));
  return std::polar(radius * std::sqrt(u), 2.0 * std::numbers::pi * v);
}

std::vector<PolyTerm> SequenceSpec::perturbation_terms(int j) const {
  std::vector<PolyTerm> out;
  if (kind != SequenceKind::kPerturbed || perturbation.amplitude == 0.0) return out;
  const auto table = monomial_table(n, perturbation.q_min);
  for (int v = 1; v < n; ++v)
    for (std::size_t idx = 0; idx < table->size; ++idx) {
      const auto row = table->row(idx);
      bool lower = true;
      for (int k = v; k < n; ++k) lower = lower && row[static_cast<std::size_t>(k)] == 0;
      if (!lower) continue;
      out.push_back({v, MultiIndex(std::vector<int>(row.begin(), row.end())),
                     keyed_disc_sample(perturbation.seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(v),
                                       idx, perturbation.amplitude)});
    }
  return out;
}

CVector SequenceSpec::apply(int j, const CVector& z) const {
  if (z.size() != n) throw Error(ErrorKind::kDimensionMismatch, "point dimension differs from sequence dimension");
  const Word& word = base(j);
  if (kind != SequenceKind::kPerturbed) return apply_word(word, z);
  CVector w = z;
  for (const auto& t : perturbation_terms(j)) w[t.component] += t.coeff * monomial(t.alpha, z);
  return apply_word(word, w);
}

PolyJetMap SequenceSpec::jet(int j, int order) const {
  PolyJetMap f = word_jet(base(j), n, order);
  const auto terms = perturbation_terms(j);
  if (terms.empty()) return f;
  PolyJetMap pert = PolyJetMap::identity(n, std::max(order, perturbation.q_min));
  pert.set_exact(true);
  for (const auto& t : terms) pert.layer(t.alpha.order()).add_coeff(t.component, t.alpha, t.coeff);
  return compose_truncated(f, pert, order);
}

OrbitResult orbit_compose(const SequenceSpec& seq, int j, int k, const CVector& z) {
  if (j < 1) throw Error(ErrorKind::kOutOfRange, "orbit start index must be >= 1");
  if (k < j - 1) throw Error(ErrorKind::kOutOfRange, "orbit end index must be >= start - 1");
  OrbitResult result{z, false};
  for (int i = j; i <= k; ++i) {
    CVector next = seq.apply(i, result.point);
    if (!next.allFinite()) {
      result.diverged = true;
      return result;
    }
    result.point = std::move(next);
  }
  return result;
}

}  // namespace fbasin
