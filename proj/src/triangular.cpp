#include "fbasin/triangular.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/SVD>

#include "fbasin/error.hpp"
#include "scalar_jet.hpp"

namespace fbasin {

namespace {

double checked_sum(long double total, const char* what) {
  if (!std::isfinite(static_cast<double>(total)) || total > 1e300L) {
    std::ostringstream msg;
    msg << what << " overflows double range; reduce p or the degree";
    throw Error(ErrorKind::kOverflow, msg.str());
  }
  return static_cast<double>(total);
}

}  // namespace

LowerTriangularAuto::LowerTriangularAuto(PolyJetMap map, double tol) : map_(std::move(map)) {
  const int n = map_.dimension();
  map_.set_exact(true);
  for (int m = 1; m <= map_.order(); ++m) {
    const auto& layer = map_.layer(m);
    const auto& table = layer.table();
    for (int v = 0; v < n; ++v)
      for (std::size_t idx = 0; idx < layer.basis_size(); ++idx) {
        if (std::abs(layer.coeff(v, idx)) <= tol) continue;
        const auto alpha = table.row(idx);
        if (m == 1 && alpha[static_cast<std::size_t>(v)] == 1) continue;
        for (int k = v; k < n; ++k)
          if (alpha[static_cast<std::size_t>(k)] != 0) {
            std::ostringstream msg;
            msg << "not lower triangular: component " << v + 1 << " depends on z" << k + 1;
            throw Error(ErrorKind::kInvalidArgument, msg.str());
          }
      }
  }
  const auto diag = diagonal();
  for (int v = 0; v < n; ++v)
    if (std::abs(diag[static_cast<std::size_t>(v)]) <= tol)
      throw Error(ErrorKind::kZeroDiagonal, "diagonal element c" + std::to_string(v + 1) + " vanishes");
}

LowerTriangularAuto LowerTriangularAuto::from_linear(const CMatrix& a) {
  return LowerTriangularAuto(PolyJetMap::linear(a, 1));
}

std::vector<Complex> LowerTriangularAuto::diagonal() const {
  const int n = dimension();
  std::vector<Complex> d(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) d[static_cast<std::size_t>(v)] = map_.layer(1).coeff(v, static_cast<std::size_t>(v));
  return d;
}

PolyJetMap LowerTriangularAuto::nonlinear_part() const {
  PolyJetMap h = map_;
  h.layer(1) = HomogeneousMap(dimension(), 1);
  return h;
}

CVector LowerTriangularAuto::solve(const CVector& z) const {
  const int n = dimension();
  if (z.size() != n) throw Error(ErrorKind::kDimensionMismatch, "point dimension differs from map dimension");
  const auto diag = diagonal();
  CVector w = CVector::Zero(n);
  for (int v = 0; v < n; ++v) {
    // With w_v = 0 the v-th component reduces to h_v(w_1..w_{v-1}).
    const Complex h = map_.evaluate(w)[v];
    w[v] = (z[v] - h) / diag[static_cast<std::size_t>(v)];
  }
  return w;
}

LowerTriangularAuto invert_exact(const LowerTriangularAuto& g) {
  const int n = g.dimension();
  const int d = std::max(1, g.degree());
  int bound = 1;
  for (int k = 1; k < n; ++k) bound *= d;

  const auto diag = g.diagonal();
  PolyJetMap shears = g.map();
  for (int v = 0; v < n; ++v) shears.layer(1).set_coeff(v, static_cast<std::size_t>(v), Complex{});

  std::vector<detail::ScalarJet> w;
  w.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) w.emplace_back(n, bound, 1);
  for (int v = 0; v < n; ++v) {
    // h_v only reads w_1..w_{v-1}, which are final at this point.
    const auto h = detail::substitute(shears, w, bound);
    auto& wv = w[static_cast<std::size_t>(v)];
    wv.add_scaled(h[static_cast<std::size_t>(v)], Complex{-1.0, 0.0});
    wv.layers[1][static_cast<std::size_t>(v)] += 1.0;
    for (int deg = 1; deg <= bound; ++deg)
      for (auto& c : wv.layers[static_cast<std::size_t>(deg)]) c /= diag[static_cast<std::size_t>(v)];
  }

  PolyJetMap inv(n, bound, true);
  for (int deg = 1; deg <= bound; ++deg)
    for (int v = 0; v < n; ++v) {
      const auto& src = w[static_cast<std::size_t>(v)].layers[static_cast<std::size_t>(deg)];
      for (std::size_t idx = 0; idx < src.size(); ++idx) inv.layer(deg).set_coeff(v, idx, src[idx]);
    }
  return LowerTriangularAuto(inv.trimmed());
}

CVector ChainResult::evaluate(const CVector& z) const {
  if (composed) return composed->evaluate(z);
  CVector w = z;
  for (const auto& g : factors) w = g.evaluate(w);
  return w;
}

ChainResult compose_chain(std::span<const LowerTriangularAuto> chain, std::size_t term_budget) {
  if (chain.empty()) throw Error(ErrorKind::kInvalidArgument, "compose_chain needs at least one map");
  const int n = chain.front().dimension();
  ChainResult result;
  for (const auto& g : chain) {
    if (g.dimension() != n) throw Error(ErrorKind::kDimensionMismatch, "chain maps differ in dimension");
    result.factors.push_back(g);
    result.max_factor_degree = std::max(result.max_factor_degree, g.degree());
  }
  PolyJetMap acc = chain.front().map();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const auto& g = chain[i].map();
    const int order = std::max(1, g.degree() * acc.degree());
    acc = compose_truncated(g, acc, order).trimmed();
    if (acc.nonzero_terms() > term_budget) {
      std::fprintf(stderr, "compose_chain: exceeded %zu-term budget, falling back to pointwise evaluation\n",
                   term_budget);
      result.degree_check_skipped = true;
      return result;
    }
  }
  result.composed.emplace(acc);
  return result;
}

double linear_growth_constant(const PolyJetMap& g, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorKind::kInvalidArgument, "radius must be positive");
  const int n = g.dimension();
  const CMatrix a = g.linear_part();
  const double linear = Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double comp = 0.0;
    for (int m = 2; m <= g.order(); ++m) {
      const auto& layer = g.layer(m);
      double s = 0.0;
      for (std::size_t idx = 0; idx < layer.basis_size(); ++idx) s += std::abs(layer.coeff(i, idx));
      comp += s * std::pow(rho, m - 1);
    }
    sq += comp * comp;
  }
  return linear + std::sqrt(sq);
}

double gamma_chain_bound(int d, int n, double c) {
  if (d < 1 || n < 1) throw Error(ErrorKind::kInvalidArgument, "gamma_chain_bound needs d >= 1 and n >= 1");
  if (c < 0.0) throw Error(ErrorKind::kInvalidArgument, "growth constant must be >= 0");
  long double top = 1;
  for (int k = 1; k < n; ++k) top *= d;
  if (top > 1e6L) throw Error(ErrorKind::kOverflow, "d^(n-1) too large for gamma_chain_bound");
  const long double base = std::sqrt(static_cast<long double>(n)) * c;
  long double total = 0;
  long double power = 1;
  for (int i = 1; i <= static_cast<int>(top); ++i) {
    power *= base;
    total += static_cast<long double>(multi_index_count(n, i)) * power;
  }
  return checked_sum(total, "gamma_chain_bound");
}

InverseBound inverse_linear_bound(int n, double s, double c, double delta) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::kInvalidArgument, "inverse bound needs 0 < s < 1");
  if (c < 0.0 || !(delta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "inverse bound needs C >= 0 and delta > 0");
  double factorial = 1.0;
  for (int k = 2; k <= n - 1; ++k) factorial *= k;
  InverseBound b;
  b.constant = std::sqrt(static_cast<double>(n)) * factorial * std::pow(1.0 + c, n - 1) / std::pow(s, n);
  b.radius = delta / b.constant;
  return b;
}

ChainContainmentSetup chain_containment_setup(const LowerTriangularAuto& g, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorKind::kInvalidArgument, "radius must be positive");
  ChainContainmentSetup setup;
  setup.rho = rho;
  if (rho >= 1.0) {
    std::fprintf(stderr, "chain_containment_setup: rho=%g clamped to 0.99 (bound requires rho < 1)\n", rho);
    setup.rho = 0.99;
    setup.clamped = true;
  }
  setup.growth = linear_growth_constant(g.map(), setup.rho);
  setup.degree = std::max(1, g.degree());
  setup.gamma = gamma_chain_bound(setup.degree, g.dimension(), setup.growth);
  return setup;
}

std::vector<std::optional<int>> iterates_to_zero_check(const LowerTriangularAuto& g,
                                                       std::span<const CVector> samples, int k_max,
                                                       double eps) {
  for (const auto& c : g.diagonal())
    if (!(std::abs(c) < 1.0))
      throw Error(ErrorKind::kNotAttracting, "iterates_to_zero_check needs all |c_v| < 1");
  std::vector<std::optional<int>> out(samples.size());
  const auto count = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    CVector z = samples[static_cast<std::size_t>(i)];
    for (int k = 0; k <= k_max; ++k) {
      if (z.norm() < eps) {
        out[static_cast<std::size_t>(i)] = k;
        break;
      }
      z = g.evaluate(z);
    }
  }
  return out;
}

}  // namespace fbasin
