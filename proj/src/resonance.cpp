#include "fbasin/resonance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fbasin/error.hpp"

namespace fbasin {

Complex eigen_power(const Spectrum& spectrum, std::span<const int> alpha) {
  Complex p{1.0, 0.0};
  for (std::size_t k = 0; k < alpha.size(); ++k)
    for (int e = 0; e < alpha[k]; ++e) p *= spectrum.eigenvalues[k];
  return p;
}

bool is_special(const Spectrum& spectrum, int component, std::span<const int> alpha, double tol) {
  for (std::size_t k = static_cast<std::size_t>(component); k < alpha.size(); ++k)
    if (alpha[k] != 0) return false;
  const Complex lj = spectrum[component];
  return std::abs(lj - eigen_power(spectrum, alpha)) <= tol * std::abs(lj);
}

std::optional<int> special_free_degree(const Spectrum& spectrum) {
  if (spectrum.eigenvalues.empty()) return std::nullopt;
  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& l : spectrum.eigenvalues) {
    largest = std::max(largest, std::abs(l));
    smallest = std::min(smallest, std::abs(l));
  }
  if (!(largest < 1.0) || !(smallest > 0.0)) return std::nullopt;
  double power = largest * largest;
  for (int p = 2; p < 100000; ++p, power *= largest)
    if (power < smallest) return p;
  return std::nullopt;
}

SpecialBasisReport special_basis(const Spectrum& spectrum, int m, double tol) {
  if (m < 2) throw Error(ErrorKind::kInvalidArgument, "special basis needs degree >= 2");
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "resonance tolerance must be positive");
  const int n = spectrum.size();
  SpecialBasisReport report;
  report.degree = m;
  report.margin = std::numeric_limits<double>::infinity();
  const auto table = monomial_table(n, m);
  for (int j = 0; j < n; ++j) {
    for (std::size_t idx = 0; idx < table->size; ++idx) {
      const auto alpha = table->row(idx);
      if (is_special(spectrum, j, alpha, tol)) {
        report.entries.push_back({j, MultiIndex(std::vector<int>(alpha.begin(), alpha.end()))});
      } else {
        report.margin = std::min(report.margin, std::abs(spectrum[j] - eigen_power(spectrum, alpha)));
      }
    }
  }
  report.vanishes_for_all_degrees_ge = special_free_degree(spectrum);
  return report;
}

HomogeneousMap commutator_apply(const CMatrix& a, const HomogeneousMap& h) {
  const int n = h.dimension();
  if (a.rows() != n || a.cols() != n)
    throw Error(ErrorKind::kDimensionMismatch, "commutator: matrix size differs from map dimension");
  const int m = h.degree();
  HomogeneousMap out(n, m);
  const std::size_t q = h.basis_size();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t idx = 0; idx < q; ++idx) out.set_coeff(i, idx, out.coeff(i, idx) + aik * h.coeff(k, idx));
    }
  const auto h_of_a = compose_truncated(to_jet(h, m), PolyJetMap::linear(a, m), m);
  out -= h_of_a.layer(m);
  return out;
}

namespace {

std::string describe(int component, std::span<const int> alpha) {
  std::ostringstream s;
  s << "(component " << component + 1 << ", alpha=(";
  for (std::size_t k = 0; k < alpha.size(); ++k) s << (k ? "," : "") << alpha[k];
  s << "))";
  return s.str();
}

Complex checked_divisor(const Spectrum& spectrum, int j, std::span<const int> alpha, const ResonanceOptions& options) {
  const Complex lj = spectrum[j];
  const Complex d = lj - eigen_power(spectrum, alpha);
  if (std::abs(d) <= options.near_tol * std::abs(lj)) {
    std::ostringstream msg;
    msg << "near-resonant divisor |lambda_j - lambda^alpha| = " << std::abs(d) << " at " << describe(j, alpha)
        << "; raise the resonance tolerance to classify it as special";
    throw Error(ErrorKind::kNearResonance, msg.str());
  }
  return d;
}

}  // namespace

CommutatorSolution commutator_solve(const CMatrix& a, const HomogeneousMap& r, ResonanceOptions options) {
  const int n = r.dimension();
  const int m = r.degree();
  if (a.rows() != n || a.cols() != n)
    throw Error(ErrorKind::kDimensionMismatch, "commutator_solve: matrix size differs from map dimension");
  if (m < 2) throw Error(ErrorKind::kInvalidArgument, "commutator_solve needs degree >= 2");
  bool diagonal = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j > i && a(i, j) != Complex{})
        throw Error(ErrorKind::kInvalidArgument, "commutator_solve expects a lower-triangular matrix");
      if (j < i && a(i, j) != Complex{}) diagonal = false;
    }
  Spectrum spectrum;
  for (int i = 0; i < n; ++i) spectrum.eigenvalues.push_back(a(i, i));

  CommutatorSolution sol{HomogeneousMap(n, m), HomogeneousMap(n, m)};
  const auto& table = r.table();
  const std::size_t q = r.basis_size();

  if (diagonal) {
    for (int j = 0; j < n; ++j)
      for (std::size_t idx = 0; idx < q; ++idx) {
        const auto alpha = table.row(idx);
        const Complex rho = r.coeff(j, idx);
        if (is_special(spectrum, j, alpha, options.tol)) {
          sol.X.set_coeff(j, idx, rho);
        } else {
          const Complex d = checked_divisor(spectrum, j, alpha, options);
          sol.H.set_coeff(j, idx, rho / d);
        }
      }
    return sol;
  }

  HomogeneousMap residual = r;
  for (int j = 0; j < n; ++j)
    for (std::size_t step = 0; step < q; ++step) {
      // Lexicographically ascending is the reverse of the basis order.
      const std::size_t idx = q - 1 - step;
      const auto alpha = table.row(idx);
      const Complex rho = residual.coeff(j, idx);
      if (is_special(spectrum, j, alpha, options.tol)) {
        sol.X.set_coeff(j, idx, rho);
        residual.set_coeff(j, idx, Complex{});
        continue;
      }
      const Complex d = checked_divisor(spectrum, j, alpha, options);
      if (rho == Complex{}) continue;
      const Complex h = rho / d;
      sol.H.set_coeff(j, idx, h);
      HomogeneousMap unit(n, m);
      unit.set_coeff(j, idx, Complex{1.0, 0.0});
      residual -= h * commutator_apply(a, unit);
    }
  return sol;
}

}  // namespace fbasin
