#pragma once

// Basin of attraction of a uniformly attracting sequence: hypothesis checks,
// membership, the approximating maps psi_j = G^{-j}∘T∘f_{1,j} and grid
// classification of two-parameter slices.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fbasin/normal_form.hpp"
#include "fbasin/sequence.hpp"

namespace fbasin {

inline constexpr double kDefaultEscapeRadius = 1e8;
inline constexpr int kDefaultJMax = 200;

struct HypothesisReport {
  int q = 0;
  int j_max = 0;
  std::size_t samples = 0;
  // s|z| < |f_j(z)| < r|z| on B_delta
  std::size_t attraction_checks = 0;
  std::size_t attraction_violations = 0;
  double max_upper_ratio = 0.0;  // max |f_j(z)| / (r|z|)
  double min_lower_ratio = 0.0;  // min |f_j(z)| / (s|z|)
  // |f_{j,k}(z)| <= r^{k-j+1} |z| for k >= j + K - 1
  std::size_t chain_checks = 0;
  std::size_t chain_violations = 0;
  double max_chain_ratio = 0.0;
  // max |coeff| of jet_{q-1}(f_j) - jet_{q-1}(f_1)
  double derivative_discrepancy = 0.0;

  bool ok() const { return attraction_violations == 0 && chain_violations == 0 && derivative_discrepancy <= 1e-12; }
};

// Sample points lie on spheres of radius in (0.05, 0.95) delta, chosen
// deterministically from `seed`.
HypothesisReport verify_hypotheses(const SequenceSpec& seq, int q, int j_max, std::size_t samples,
                                   std::uint64_t seed = 1);

// Deterministic point with |z| = radius.
CVector sphere_point(int n, double radius, std::uint64_t seed, std::uint64_t index);

enum class BasinStatus { kAttracted, kUndecided, kDiverged };

struct Membership {
  BasinStatus status = BasinStatus::kUndecided;
  int step = -1;  // first k with |f_{1,k}(z)| < delta; -1 unless attracted
  bool operator==(const Membership&) const = default;
};

Membership basin_membership(const SequenceSpec& seq, const CVector& z, int j_max,
                            double escape_radius = kDefaultEscapeRadius);

// psi_j(z); throws kDiverged if the inverse chain leaves the double range.
CVector psi_approx(const SequenceSpec& seq, const NormalFormResult& nf, const CVector& z, int j);

// psi_1(z), ..., psi_count(z).
std::vector<CVector> psi_iterates(const SequenceSpec& seq, const NormalFormResult& nf, const CVector& z, int count);

// Ratio of a log-linear fit over the longest strictly decreasing run of
// positive values; nullopt with fewer than three such values.
std::optional<double> fit_geometric_ratio(std::span<const double> values);

struct PsiPointReport {
  CVector point;
  std::vector<double> diffs;  // |psi_{j+K} - psi_j| for j = K..j_max
  std::optional<double> fitted_ratio;
  bool diverged = false;  // the inverse chain overflowed; diffs stop early
};

struct PsiConvergenceReport {
  int j_max = 0;
  int block = 1;
  double reference_ratio = 0.0;  // r^q gamma
  std::vector<PsiPointReport> points;
  Complex det_jacobian_at_zero;  // det D psi_{j_max}(0)
};

// Points are processed in parallel; output order follows `points`.
PsiConvergenceReport psi_convergence_report(const SequenceSpec& seq, const NormalFormResult& nf,
                                            std::span<const CVector> points, int j_max, double reference_ratio);

// d_0 psi_j, from the linear parts of the chain.
CMatrix psi_linear_part(const SequenceSpec& seq, const NormalFormResult& nf, int j);

struct InjectivityReport {
  std::size_t pairs = 0;
  std::size_t collisions = 0;  // pairs with |psi(z) - psi(z')| < min_gap
  double smallest_gap = 0.0;
};

// Random pairs from `points` at distance >= min_separation.
InjectivityReport injectivity_check(const SequenceSpec& seq, const NormalFormResult& nf,
                                    std::span<const CVector> points, int j, std::size_t pairs,
                                    std::uint64_t seed, double min_separation = 1e-3, double min_gap = 1e-8);

// z = origin + t1 dir1 + t2 dir2 with t1, t2 on uniform grids (endpoints
// included).
struct GridSpec {
  CVector origin;
  CVector dir1;
  CVector dir2;
  double t1_min = -1.0;
  double t1_max = 1.0;
  double t2_min = -1.0;
  double t2_max = 1.0;
  int width = 64;
  int height = 64;
  double escape_radius = kDefaultEscapeRadius;

  static GridSpec coordinate_plane(int n, double radius, int width, int height);
  void validate(int n) const;
  double t1(int i) const;
  double t2(int j) const;
  CVector point(int i, int j) const;
  bool operator==(const GridSpec& other) const;
};

struct BasinGrid {
  GridSpec spec;
  int j_max = 0;
  std::vector<Membership> cells;  // row-major: cells[j * width + i]

  const Membership& at(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.width) + static_cast<std::size_t>(i)];
  }
  std::size_t count(BasinStatus status) const;
};

BasinGrid grid_classify(const SequenceSpec& seq, const GridSpec& grid, int j_max);
BasinGrid grid_classify_serial(const SequenceSpec& seq, const GridSpec& grid, int j_max);

}  // namespace fbasin
