#pragma once

// Independent reference implementations used only by the tests: a sparse
// map-based polynomial algebra and a few helpers to move between it and the
// dense library types.

#include <complex>
#include <map>
#include <random>
#include <vector>

#include "fbasin/polyalg.hpp"
#include "fbasin/triangular.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Exponents = std::vector<int>;
using Poly = std::map<Exponents, Complex>;  // one scalar polynomial
using Map = std::vector<Poly>;              // one polynomial per component

inline int total_degree(const Exponents& e) {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

inline Poly truncate(const Poly& p, int order) {
  Poly out;
  for (const auto& [e, c] : p)
    if (total_degree(e) <= order && c != Complex{}) out[e] = c;
  return out;
}

inline Poly add(const Poly& a, const Poly& b, Complex scale = 1.0) {
  Poly out = a;
  for (const auto& [e, c] : b) out[e] += scale * c;
  return out;
}

inline Poly multiply(const Poly& a, const Poly& b, int order) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponents e(ea.size());
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      if (total_degree(e) <= order) out[e] += ca * cb;
    }
  return out;
}

inline Poly constant(int n, Complex c) { return Poly{{Exponents(static_cast<std::size_t>(n), 0), c}}; }

// p∘g truncated at `order`, by repeated multiplication.
inline Poly substitute(const Poly& p, const Map& g, int order) {
  const int n = static_cast<int>(g.size());
  Poly out;
  for (const auto& [e, c] : p) {
    Poly term = constant(n, c);
    for (int k = 0; k < n; ++k)
      for (int r = 0; r < e[static_cast<std::size_t>(k)]; ++r) term = multiply(term, g[static_cast<std::size_t>(k)], order);
    out = add(out, term);
  }
  return truncate(out, order);
}

inline Map compose(const Map& f, const Map& g, int order) {
  Map out;
  for (const auto& p : f) out.push_back(substitute(p, g, order));
  return out;
}

inline Complex evaluate(const Poly& p, const std::vector<Complex>& z) {
  Complex total{};
  for (const auto& [e, c] : p) {
    Complex m = c;
    for (std::size_t k = 0; k < z.size(); ++k) m *= std::pow(z[k], e[k]);
    total += m;
  }
  return total;
}

inline Map from_jet(const fbasin::PolyJetMap& f) {
  const int n = f.dimension();
  Map out(static_cast<std::size_t>(n));
  for (int m = 1; m <= f.order(); ++m) {
    const auto& layer = f.layer(m);
    for (int v = 0; v < n; ++v)
      for (std::size_t idx = 0; idx < layer.basis_size(); ++idx) {
        const auto c = layer.coeff(v, idx);
        if (c == Complex{}) continue;
        const auto row = layer.table().row(idx);
        out[static_cast<std::size_t>(v)][Exponents(row.begin(), row.end())] = c;
      }
  }
  return out;
}

inline Map from_layer(const fbasin::HomogeneousMap& h) { return from_jet(fbasin::to_jet(h, h.degree())); }

// Largest coefficient difference between two maps.
inline double distance(const Map& a, const Map& b) {
  double worst = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    for (const auto& [e, c] : a[v]) {
      const auto it = b[v].find(e);
      worst = std::max(worst, std::abs(c - (it == b[v].end() ? Complex{} : it->second)));
    }
    for (const auto& [e, c] : b[v])
      if (!a[v].count(e)) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

inline Map linear_map(const fbasin::CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  Map out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a(i, k) == Complex{}) continue;
      Exponents e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(k)] = 1;
      out[static_cast<std::size_t>(i)][e] = a(i, k);
    }
  return out;
}

// Random dense jet with coefficients uniform in the unit square.
inline fbasin::PolyJetMap random_jet(int n, int order, std::mt19937_64& rng, bool exact = true, int min_degree = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  fbasin::PolyJetMap f(n, order, exact);
  for (int m = min_degree; m <= order; ++m)
    for (auto& c : f.layer(m).coefficients()) c = {u(rng), u(rng)};
  return f;
}

inline fbasin::CVector random_point(int n, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  fbasin::CVector z(n);
  for (int k = 0; k < n; ++k) z[k] = {g(rng), g(rng)};
  return z * (radius / z.norm());
}

// Lower-triangular map with diagonal moduli in (0.2, 0.9) and random
// coefficients of size <= scale in degrees 2..d.
inline fbasin::LowerTriangularAuto random_triangular(int n, int d, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), mod(0.2, 0.9);
  fbasin::PolyJetMap f(n, d, true);
  for (int v = 0; v < n; ++v) f.layer(1).set_coeff(v, static_cast<std::size_t>(v), mod(rng));
  for (int m = 2; m <= d; ++m) {
    auto& layer = f.layer(m);
    for (std::size_t idx = 0; idx < layer.basis_size(); ++idx) {
      const auto row = layer.table().row(idx);
      for (int v = 1; v < n; ++v) {
        bool lower = true;
        for (int k = v; k < n; ++k) lower = lower && row[static_cast<std::size_t>(k)] == 0;
        if (lower) layer.set_coeff(v, idx, scale * fbasin::Complex{u(rng), u(rng)});
      }
    }
  }
  return fbasin::LowerTriangularAuto(f);
}

}  // namespace oracle
