#include "fbasin/spectral.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fbasin/error.hpp"

namespace fbasin {

bool precedes_in_spectrum(Complex a, Complex b, double tol) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma > mb + tol) return true;
  if (mb > ma + tol) return false;
  return std::arg(a) < std::arg(b) - tol;
}

namespace {

bool lower_triangular_exactly(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != Complex{}) return false;
  return true;
}

bool diagonal_sorted(const CMatrix& a, double tol) {
  for (Eigen::Index k = 0; k + 1 < a.rows(); ++k)
    if (precedes_in_spectrum(a(k + 1, k + 1), a(k, k), tol)) return false;
  return true;
}

bool is_normal(const CMatrix& a, double tol) {
  const double scale = std::max(1.0, a.squaredNorm());
  return (a * a.adjoint() - a.adjoint() * a).norm() <= tol * scale;
}

// Swaps the adjacent diagonal entries k, k+1 of the upper triangular t with a
// unitary rotation, updating the accumulated unitary u.
void swap_adjacent(CMatrix& t, CMatrix& u, Eigen::Index k) {
  const Complex a = t(k, k);
  const Complex b = t(k + 1, k + 1);
  const Complex off = t(k, k + 1);
  // First column: eigenvector of [[a, off], [0, b]] for eigenvalue b.
  Eigen::Vector2cd v(off, b - a);
  const double nv = v.norm();
  if (nv == 0.0) return;
  v /= nv;
  Eigen::Matrix2cd q;
  q << v(0), -std::conj(v(1)),
       v(1), std::conj(v(0));
  t.middleRows(k, 2) = q.adjoint() * t.middleRows(k, 2);
  t.middleCols(k, 2) = t.middleCols(k, 2) * q;
  u.middleCols(k, 2) = u.middleCols(k, 2) * q;
  t(k + 1, k) = Complex{};
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

}  // namespace

SchurLower schur_lower(const CMatrix& a, SchurOptions options) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorKind::kDimensionMismatch, "schur_lower expects a non-empty square matrix");
  const Eigen::Index n = a.rows();
  const double tol = options.tol;

  SchurLower out;
  out.normal = is_normal(a, tol);

  if (lower_triangular_exactly(a) && diagonal_sorted(a, tol)) {
    out.S = CMatrix::Identity(n, n);
    out.L = a;
  } else {
    Eigen::ComplexSchur<CMatrix> schur(n);
    schur.setMaxIterations(static_cast<Eigen::Index>(100 * n * n));
    schur.compute(a, true);
    if (schur.info() != Eigen::Success)
      throw Error(ErrorKind::kNoConvergence, "Schur iteration did not converge within 100 n^2 sweeps");
    CMatrix t = schur.matrixT().triangularView<Eigen::Upper>();
    CMatrix u = schur.matrixU();

    // Upper form is sorted in the reverse of the final order; bubble sort is
    // stable, so equal entries keep their discovery order.
    for (Eigen::Index pass = 0; pass < n; ++pass) {
      bool swapped = false;
      for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (precedes_in_spectrum(t(k, k), t(k + 1, k + 1), tol) &&
            std::abs(t(k, k) - t(k + 1, k + 1)) > tol) {
          swap_adjacent(t, u, k);
          swapped = true;
        }
      }
      if (!swapped) break;
    }

    // Index reversal turns the upper form into a lower one.
    CMatrix flip = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) flip(i, n - 1 - i) = 1.0;
    out.S = u * flip;
    out.L = flip * t * flip;
    out.L.triangularView<Eigen::StrictlyUpper>().setZero();
  }
  if (out.normal) out.L.triangularView<Eigen::StrictlyLower>().setZero();

  out.spectrum.eigenvalues.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.spectrum.eigenvalues[static_cast<std::size_t>(i)] = out.L(i, i);

  if (options.require_attracting) {
    for (const auto& lambda : out.spectrum.eigenvalues) {
      const double mod = std::abs(lambda);
      if (!(mod > 0.0 && mod < 1.0)) {
        std::ostringstream msg;
        msg << "not attracting: eigenvalue " << lambda << " has modulus " << mod << " outside (0,1)";
        throw Error(ErrorKind::kNotAttracting, msg.str());
      }
    }
  }
  return out;
}

SpectrumCheck spectrum_bounds_check(const Spectrum& spectrum, double r, double s) {
  if (!(0.0 < s && s < r && r < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "spectrum check needs 0 < s < r < 1");
  SpectrumCheck check;
  if (spectrum.eigenvalues.empty()) return check;
  double largest = 0.0;
  double smallest = std::abs(spectrum.eigenvalues.front());
  for (const auto& l : spectrum.eigenvalues) {
    largest = std::max(largest, std::abs(l));
    smallest = std::min(smallest, std::abs(l));
  }
  check.lower_margin = smallest - s;
  check.upper_margin = r - largest;
  check.ok = check.lower_margin >= 0.0 && check.upper_margin >= 0.0;
  return check;
}

}  // namespace fbasin
