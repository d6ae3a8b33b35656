#include "fbasin/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "fbasin/error.hpp"
#include "scalar_jet.hpp"

namespace fbasin {

namespace {

std::int64_t binomial(std::int64_t a, std::int64_t b) {
  if (b < 0 || a < b) return 0;
  b = std::min(b, a - b);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Monomials of degree <= d in k variables.
std::int64_t count_up_to(int k, int d) {
  if (d < 0) return 0;
  return binomial(d + k, k);
}

void fill_basis(int n, int pos, int remaining, std::vector<int>& current, std::vector<int>& out) {
  if (pos == n - 1) {
    current[static_cast<std::size_t>(pos)] = remaining;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[static_cast<std::size_t>(pos)] = e;
    fill_basis(n, pos + 1, remaining - e, current, out);
  }
}

void check_dimension(int n) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "dimension must be >= 1");
}

}  // namespace

int MultiIndex::order() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

std::int64_t multi_index_count(int n, int m) {
  check_dimension(n);
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "degree must be >= 0");
  return binomial(m + n - 1, n - 1);
}

std::size_t multi_index_rank(std::span<const int> alpha) {
  const int n = static_cast<int>(alpha.size());
  int remaining = 0;
  for (int e : alpha) remaining += e;
  std::int64_t rank = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const int k = n - i - 1;
    rank += count_up_to(k, remaining - alpha[static_cast<std::size_t>(i)] - 1);
    remaining -= alpha[static_cast<std::size_t>(i)];
  }
  return static_cast<std::size_t>(rank);
}

std::shared_ptr<const MonomialTable> monomial_table(int n, int m) {
  check_dimension(n);
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "degree must be >= 0");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, m}];
  if (!slot) {
    auto table = std::make_shared<MonomialTable>();
    table->n = n;
    table->degree = m;
    table->size = static_cast<std::size_t>(multi_index_count(n, m));
    table->exponents.reserve(table->size * static_cast<std::size_t>(n));
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    fill_basis(n, 0, m, current, table->exponents);
    slot = std::move(table);
  }
  return slot;
}

std::vector<MultiIndex> multi_index_basis(int n, int m) {
  const auto table = monomial_table(n, m);
  std::vector<MultiIndex> out;
  out.reserve(table->size);
  for (std::size_t i = 0; i < table->size; ++i) {
    const auto row = table->row(i);
    out.emplace_back(std::vector<int>(row.begin(), row.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// HomogeneousMap

HomogeneousMap::HomogeneousMap(int n, int degree)
    : n_(n), degree_(degree), table_(monomial_table(n, degree)) {
  coeffs_.assign(static_cast<std::size_t>(n) * table_->size, Complex{});
}

void HomogeneousMap::check_same_shape(const HomogeneousMap& other) const {
  if (n_ != other.n_ || degree_ != other.degree_)
    throw Error(ErrorKind::kDimensionMismatch, "homogeneous maps differ in dimension or degree");
}

namespace {
std::size_t checked_rank(const MultiIndex& alpha, int n, int degree) {
  if (alpha.dimension() != n)
    throw Error(ErrorKind::kDimensionMismatch, "multi-index length differs from dimension");
  if (alpha.order() != degree)
    throw Error(ErrorKind::kInvalidArgument, "multi-index order differs from layer degree");
  for (int e : alpha.exponents)
    if (e < 0) throw Error(ErrorKind::kInvalidArgument, "negative exponent");
  return multi_index_rank(alpha.exponents);
}
}  // namespace

Complex HomogeneousMap::coeff(int component, const MultiIndex& alpha) const {
  return coeff(component, checked_rank(alpha, n_, degree_));
}

void HomogeneousMap::set_coeff(int component, const MultiIndex& alpha, Complex value) {
  if (component < 0 || component >= n_) throw Error(ErrorKind::kOutOfRange, "component out of range");
  set_coeff(component, checked_rank(alpha, n_, degree_), value);
}

void HomogeneousMap::add_coeff(int component, const MultiIndex& alpha, Complex value) {
  if (component < 0 || component >= n_) throw Error(ErrorKind::kOutOfRange, "component out of range");
  const auto idx = checked_rank(alpha, n_, degree_);
  set_coeff(component, idx, coeff(component, idx) + value);
}

void HomogeneousMap::accumulate(std::span<const Complex> powers, int stride, CVector& out) const {
  const std::size_t q = basis_size();
  const auto& exps = table_->exponents;
  for (std::size_t idx = 0; idx < q; ++idx) {
    Complex mono{1.0, 0.0};
    bool evaluated = false;
    for (int i = 0; i < n_; ++i) {
      const Complex c = coeffs_[static_cast<std::size_t>(i) * q + idx];
      if (c == Complex{}) continue;
      if (!evaluated) {
        const int* row = exps.data() + idx * static_cast<std::size_t>(n_);
        for (int k = 0; k < n_; ++k)
          if (row[k] != 0) mono *= powers[static_cast<std::size_t>(k * stride + row[k])];
        evaluated = true;
      }
      out[i] += c * mono;
    }
  }
}

namespace {
std::vector<Complex> power_table(const CVector& z, int max_degree) {
  const int n = static_cast<int>(z.size());
  const int stride = max_degree + 1;
  std::vector<Complex> powers(static_cast<std::size_t>(n * stride));
  for (int k = 0; k < n; ++k) {
    Complex p{1.0, 0.0};
    for (int e = 0; e <= max_degree; ++e) {
      powers[static_cast<std::size_t>(k * stride + e)] = p;
      p *= z[k];
    }
  }
  return powers;
}
}  // namespace

CVector HomogeneousMap::evaluate(const CVector& z) const {
  if (z.size() != n_) throw Error(ErrorKind::kDimensionMismatch, "point dimension differs from map dimension");
  CVector out = CVector::Zero(n_);
  const auto powers = power_table(z, degree_);
  accumulate(powers, degree_ + 1, out);
  return out;
}

double HomogeneousMap::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

HomogeneousMap& HomogeneousMap::operator+=(const HomogeneousMap& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

HomogeneousMap& HomogeneousMap::operator-=(const HomogeneousMap& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

HomogeneousMap& HomogeneousMap::operator*=(Complex scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

bool HomogeneousMap::operator==(const HomogeneousMap& other) const {
  return n_ == other.n_ && degree_ == other.degree_ && coeffs_ == other.coeffs_;
}

// ---------------------------------------------------------------------------
// PolyJetMap

PolyJetMap::PolyJetMap(int n, int order, bool exact) : n_(n), order_(order), exact_(exact) {
  check_dimension(n);
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "jet order must be >= 1");
  layers_.reserve(static_cast<std::size_t>(order));
  for (int m = 1; m <= order; ++m) layers_.emplace_back(n, m);
}

PolyJetMap PolyJetMap::identity(int n, int order) {
  return linear(CMatrix::Identity(n, n), order);
}

PolyJetMap PolyJetMap::linear(const CMatrix& a, int order) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::kDimensionMismatch, "linear map must be square");
  const int n = static_cast<int>(a.rows());
  PolyJetMap f(n, order, true);
  auto& l1 = f.layer(1);
  // Degree-1 basis is e_1, ..., e_n in that order.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l1.set_coeff(i, static_cast<std::size_t>(j), a(i, j));
  return f;
}

const HomogeneousMap& PolyJetMap::layer(int m) const {
  if (m < 1 || m > order_) throw Error(ErrorKind::kOutOfRange, "layer " + std::to_string(m) + " outside 1.." + std::to_string(order_));
  return layers_[static_cast<std::size_t>(m - 1)];
}

HomogeneousMap& PolyJetMap::layer(int m) {
  if (m < 1 || m > order_) throw Error(ErrorKind::kOutOfRange, "layer " + std::to_string(m) + " outside 1.." + std::to_string(order_));
  return layers_[static_cast<std::size_t>(m - 1)];
}

void PolyJetMap::set_layer(const HomogeneousMap& h) {
  if (h.dimension() != n_) throw Error(ErrorKind::kDimensionMismatch, "layer dimension differs");
  layer(h.degree()) = h;
}

CMatrix PolyJetMap::linear_part() const {
  CMatrix a(n_, n_);
  const auto& l1 = layers_.front();
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) a(i, j) = l1.coeff(i, static_cast<std::size_t>(j));
  return a;
}

int PolyJetMap::degree(double tol) const {
  for (int m = order_; m >= 1; --m)
    if (layers_[static_cast<std::size_t>(m - 1)].max_abs() > tol) return m;
  return 0;
}

std::size_t PolyJetMap::nonzero_terms(double tol) const {
  std::size_t count = 0;
  for (const auto& l : layers_)
    for (const auto& c : l.coefficients())
      if (std::abs(c) > tol) ++count;
  return count;
}

double PolyJetMap::max_abs() const {
  double m = 0.0;
  for (const auto& l : layers_) m = std::max(m, l.max_abs());
  return m;
}

CVector PolyJetMap::evaluate(const CVector& z) const {
  if (z.size() != n_) throw Error(ErrorKind::kDimensionMismatch, "point dimension differs from map dimension");
  CVector out = CVector::Zero(n_);
  const auto powers = power_table(z, order_);
  for (const auto& l : layers_) l.accumulate(powers, order_ + 1, out);
  return out;
}

PolyJetMap PolyJetMap::truncated(int order) const {
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "jet order must be >= 1");
  if (order >= order_) return extended(order);
  PolyJetMap out(n_, order, exact_ && degree() <= order);
  for (int m = 1; m <= order; ++m) out.layers_[static_cast<std::size_t>(m - 1)] = layers_[static_cast<std::size_t>(m - 1)];
  return out;
}

PolyJetMap PolyJetMap::extended(int order) const {
  if (order <= order_) return *this;
  PolyJetMap out(n_, order, exact_);
  for (int m = 1; m <= order_; ++m) out.layers_[static_cast<std::size_t>(m - 1)] = layers_[static_cast<std::size_t>(m - 1)];
  return out;
}

PolyJetMap PolyJetMap::trimmed() const {
  const int d = std::max(1, degree());
  PolyJetMap out = truncated(d);
  out.exact_ = exact_;
  return out;
}

PolyJetMap& PolyJetMap::operator+=(const PolyJetMap& other) {
  if (n_ != other.n_) throw Error(ErrorKind::kDimensionMismatch, "jet dimensions differ");
  if (other.order_ > order_) *this = extended(other.order_);
  for (int m = 1; m <= other.order_; ++m) layers_[static_cast<std::size_t>(m - 1)] += other.layer(m);
  exact_ = exact_ && other.exact_;
  return *this;
}

PolyJetMap& PolyJetMap::operator-=(const PolyJetMap& other) {
  if (n_ != other.n_) throw Error(ErrorKind::kDimensionMismatch, "jet dimensions differ");
  if (other.order_ > order_) *this = extended(other.order_);
  for (int m = 1; m <= other.order_; ++m) layers_[static_cast<std::size_t>(m - 1)] -= other.layer(m);
  exact_ = exact_ && other.exact_;
  return *this;
}

bool PolyJetMap::operator==(const PolyJetMap& other) const {
  return n_ == other.n_ && order_ == other.order_ && exact_ == other.exact_ && layers_ == other.layers_;
}

// ---------------------------------------------------------------------------
// Scalar jets and composition

namespace detail {

std::shared_ptr<const std::vector<std::uint32_t>> product_table(int n, int da, int db) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({n, da, db});
    if (it != cache.end()) return it->second;
  }
  const auto ta = monomial_table(n, da);
  const auto tb = monomial_table(n, db);
  auto table = std::make_shared<std::vector<std::uint32_t>>(ta->size * tb->size);
  std::vector<int> sum(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < ta->size; ++i) {
    const auto ra = ta->row(i);
    for (std::size_t j = 0; j < tb->size; ++j) {
      const auto rb = tb->row(j);
      for (int k = 0; k < n; ++k) sum[static_cast<std::size_t>(k)] = ra[static_cast<std::size_t>(k)] + rb[static_cast<std::size_t>(k)];
      (*table)[i * tb->size + j] = static_cast<std::uint32_t>(multi_index_rank(sum));
    }
  }
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(std::make_tuple(n, da, db), std::move(table));
  return it->second;
}

ScalarJet::ScalarJet(int n_, int order_, int low_) : n(n_), order(order_), low(low_) {
  layers.resize(static_cast<std::size_t>(order + 1));
  for (int d = std::max(low, 0); d <= order; ++d)
    layers[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(multi_index_count(n, d)), Complex{});
}

void ScalarJet::add_scaled(const ScalarJet& other, Complex k) {
  for (int d = std::max(other.low, 0); d <= std::min(order, other.order); ++d) {
    auto& dst = layers[static_cast<std::size_t>(d)];
    const auto& src = other.layers[static_cast<std::size_t>(d)];
    if (dst.empty()) dst.assign(src.size(), Complex{});
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += k * src[i];
  }
  low = std::min(low, other.low);
}

ScalarJet multiply(const ScalarJet& a, const ScalarJet& b, int order) {
  ScalarJet out(a.n, order, a.low + b.low);
  for (int da = a.low; da <= a.order; ++da) {
    const auto& la = a.layers[static_cast<std::size_t>(da)];
    for (int db = b.low; db <= b.order && da + db <= order; ++db) {
      const auto& lb = b.layers[static_cast<std::size_t>(db)];
      if (la.empty() || lb.empty()) continue;
      const auto table = product_table(a.n, da, db);
      auto& dst = out.layers[static_cast<std::size_t>(da + db)];
      const std::size_t nb = lb.size();
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (la[i] == Complex{}) continue;
        const std::uint32_t* row = table->data() + i * nb;
        for (std::size_t j = 0; j < nb; ++j)
          if (lb[j] != Complex{}) dst[row[j]] += la[i] * lb[j];
      }
    }
  }
  return out;
}

ScalarJet component_jet(const PolyJetMap& f, int component, int order) {
  ScalarJet out(f.dimension(), order, 1);
  for (int d = 1; d <= std::min(order, f.order()); ++d) {
    const auto& l = f.layer(d);
    auto& dst = out.layers[static_cast<std::size_t>(d)];
    for (std::size_t i = 0; i < l.basis_size(); ++i) dst[i] = l.coeff(component, i);
  }
  return out;
}

std::vector<ScalarJet> substitute(const PolyJetMap& f, const std::vector<ScalarJet>& g, int order) {
  const int n = f.dimension();
  const int max_degree = std::min(f.order(), order);
  // powers[d][rank] = g^alpha for |alpha| = d, computed on demand.
  std::vector<std::vector<std::unique_ptr<ScalarJet>>> powers(static_cast<std::size_t>(max_degree + 1));
  for (int d = 1; d <= max_degree; ++d)
    powers[static_cast<std::size_t>(d)].resize(static_cast<std::size_t>(multi_index_count(n, d)));

  std::vector<int> alpha(static_cast<std::size_t>(n));
  auto power = [&](auto&& self, std::span<const int> exps, int d) -> const ScalarJet& {
    const std::size_t r = multi_index_rank(exps);
    auto& slot = powers[static_cast<std::size_t>(d)][r];
    if (slot) return *slot;
    int k = 0;
    while (exps[static_cast<std::size_t>(k)] == 0) ++k;
    if (d == 1) {
      slot = std::make_unique<ScalarJet>(g[static_cast<std::size_t>(k)]);
    } else {
      std::vector<int> reduced(exps.begin(), exps.end());
      --reduced[static_cast<std::size_t>(k)];
      const ScalarJet& base = self(self, reduced, d - 1);
      slot = std::make_unique<ScalarJet>(multiply(base, g[static_cast<std::size_t>(k)], order));
    }
    return *slot;
  };

  std::vector<ScalarJet> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.emplace_back(n, order, 1);

  for (int d = 1; d <= max_degree; ++d) {
    const auto& l = f.layer(d);
    const auto& table = l.table();
    for (std::size_t idx = 0; idx < l.basis_size(); ++idx) {
      bool any = false;
      for (int i = 0; i < n && !any; ++i) any = l.coeff(i, idx) != Complex{};
      if (!any) continue;
      const ScalarJet& p = power(power, table.row(idx), d);
      for (int i = 0; i < n; ++i) {
        const Complex c = l.coeff(i, idx);
        if (c != Complex{}) out[static_cast<std::size_t>(i)].add_scaled(p, c);
      }
    }
  }
  return out;
}

}  // namespace detail

PolyJetMap compose_truncated(const PolyJetMap& f, const PolyJetMap& g, int order) {
  if (f.dimension() != g.dimension()) throw Error(ErrorKind::kDimensionMismatch, "composition of maps with different dimensions");
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "jet order must be >= 1");
  const int n = f.dimension();
  std::vector<detail::ScalarJet> gj;
  gj.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) gj.push_back(detail::component_jet(g, k, order));
  const auto comps = detail::substitute(f, gj, order);

  const bool exact = f.exact() && g.exact() && f.degree() * g.degree() <= order;
  PolyJetMap out(n, order, exact);
  for (int d = 1; d <= order; ++d) {
    auto& l = out.layer(d);
    for (int i = 0; i < n; ++i) {
      const auto& src = comps[static_cast<std::size_t>(i)].layers[static_cast<std::size_t>(d)];
      for (std::size_t idx = 0; idx < src.size(); ++idx) l.set_coeff(i, idx, src[idx]);
    }
  }
  return out;
}

HomogeneousMap homogeneous_part(const PolyJetMap& f, int m) {
  if (m < 1 || m > f.order())
    throw Error(ErrorKind::kOutOfRange, "degree " + std::to_string(m) + " outside 1.." + std::to_string(f.order()));
  return f.layer(m);
}

PolyJetMap to_jet(const HomogeneousMap& h, int order, bool exact) {
  PolyJetMap f(h.dimension(), std::max(order, h.degree()), exact);
  f.set_layer(h);
  return f;
}

// ---------------------------------------------------------------------------
// Sup norms

CVector torus_point(int n, std::size_t index, double radius) {
  // Additive recurrence with the generalized golden ratio (root of
  // x^(n+1) = x + 1), which has low discrepancy in every dimension.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  CVector z(n);
  double a = 1.0;
  for (int k = 0; k < n; ++k) {
    a /= phi;
    const double t = std::fmod(0.5 + a * static_cast<double>(index + 1), 1.0);
    z[k] = std::polar(radius, 2.0 * std::numbers::pi * t);
  }
  return z;
}

namespace {
double coeff_upper(const PolyJetMap& f, double delta) {
  double total = 0.0;
  for (int m = 1; m <= f.order(); ++m) {
    double s = 0.0;
    for (const auto& c : f.layer(m).coefficients()) s += std::abs(c);
    total += s * std::pow(delta, m);
  }
  return total;
}

void check_radius(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "polydisc radius must be positive");
}
}  // namespace

double polydisc_sup_norm_serial(const PolyJetMap& f, double delta, std::size_t samples) {
  check_radius(delta);
  double best = 0.0;
  for (std::size_t i = 0; i < samples; ++i)
    best = std::max(best, f.evaluate(torus_point(f.dimension(), i, delta)).norm());
  return best;
}

double polydisc_sup_norm(const PolyJetMap& f, double delta, SupNormOptions options) {
  check_radius(delta);
  if (options.mode == SupNormMode::kCoeffUpper) return coeff_upper(f, delta);
  if (options.samples < 1) throw Error(ErrorKind::kInvalidArgument, "sampling needs at least one sample");
  const auto count = static_cast<std::int64_t>(options.samples);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::int64_t i = 0; i < count; ++i)
    best = std::max(best, f.evaluate(torus_point(f.dimension(), static_cast<std::size_t>(i), delta)).norm());
  return best;
}

double polydisc_sup_norm(const HomogeneousMap& h, double delta, SupNormOptions options) {
  return polydisc_sup_norm(to_jet(h, h.degree()), delta, options);
}

}  // namespace fbasin
