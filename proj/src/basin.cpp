#include "fbasin/basin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>

#include "fbasin/error.hpp"

namespace fbasin {

namespace {

CMatrix g_inverse_linear(const NormalFormResult& nf) {
  return nf.S * nf.linear.triangularView<Eigen::Lower>().solve(CMatrix::Identity(nf.linear.rows(), nf.linear.cols())) *
         nf.S.adjoint();
}

void check_pair(const SequenceSpec& seq, const NormalFormResult& nf) {
  if (seq.n != nf.Gtilde.dimension()) throw Error(ErrorKind::kDimensionMismatch, "normal form and sequence differ in dimension");
}

}  // namespace

CVector sphere_point(int n, double radius, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  CVector z(n);
  do {
    for (int k = 0; k < n; ++k) z[k] = Complex{gauss(rng), gauss(rng)};
  } while (z.norm() == 0.0);
  return z * (radius / z.norm());
}

HypothesisReport verify_hypotheses(const SequenceSpec& seq, int q, int j_max, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::kInvalidArgument, "verify_hypotheses needs at least one sample");
  if (j_max < 1) throw Error(ErrorKind::kInvalidArgument, "j_max must be >= 1");
  if (q < 2) throw Error(ErrorKind::kInvalidArgument, "q must be >= 2");
  seq.validate();
  const auto& prm = seq.params;
  HypothesisReport report;
  report.q = q;
  report.j_max = j_max;
  report.samples = samples;

  std::size_t att_viol = 0, chain_checks = 0, chain_viol = 0;
  double upper = 0.0, lower = std::numeric_limits<double>::infinity(), chain_ratio = 0.0;
  const auto count = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : att_viol, chain_checks, chain_viol) \
    reduction(max : upper, chain_ratio) reduction(min : lower)
  for (std::int64_t s = 0; s < count; ++s) {
    const auto index = static_cast<std::uint64_t>(s);
    std::mt19937_64 pick(seed ^ (index * 0x9e3779b97f4a7c15ULL));
    const double radius = prm.delta * std::uniform_real_distribution<double>(0.05, 0.95)(pick);
    const CVector z = sphere_point(seq.n, radius, seed, index);
    const double nz = z.norm();
    for (int j = 1; j <= j_max; ++j) {
      const double nf = seq.apply(j, z).norm();
      const double up = nf / (prm.r * nz);
      const double lo = nf / (prm.s * nz);
      upper = std::max(upper, up);
      lower = std::min(lower, lo);
      if (!(up < 1.0) || !(lo > 1.0)) ++att_viol;
    }
    for (int j = 1; j <= j_max; ++j) {
      CVector w = z;
      for (int k = j; k <= j_max; ++k) {
        w = seq.apply(k, w);
        if (k < j + seq.block - 1) continue;
        const double ratio = w.norm() / (std::pow(prm.r, k - j + 1) * nz);
        ++chain_checks;
        chain_ratio = std::max(chain_ratio, ratio);
        if (!(ratio <= 1.0 + 1e-12)) ++chain_viol;
      }
    }
  }
  report.attraction_checks = samples * static_cast<std::size_t>(j_max);
  report.attraction_violations = att_viol;
  report.max_upper_ratio = upper;
  report.min_lower_ratio = lower;
  report.chain_checks = chain_checks;
  report.chain_violations = chain_viol;
  report.max_chain_ratio = chain_ratio;

  const int order = q - 1;
  const auto first = seq.jet(1, order);
  for (int j = 2; j <= j_max; ++j)
    report.derivative_discrepancy = std::max(report.derivative_discrepancy, (seq.jet(j, order) - first).max_abs());
  return report;
}

Membership basin_membership(const SequenceSpec& seq, const CVector& z, int j_max, double escape_radius) {
  if (j_max < 1) throw Error(ErrorKind::kInvalidArgument, "j_max must be >= 1");
  const double delta = seq.params.delta;
  if (z.norm() < delta) return {BasinStatus::kAttracted, 0};
  CVector w = z;
  for (int k = 1; k <= j_max; ++k) {
    w = seq.apply(k, w);
    const double norm = w.norm();
    if (!std::isfinite(norm) || norm > escape_radius) return {BasinStatus::kDiverged, -1};
    if (norm < delta) return {BasinStatus::kAttracted, k};
  }
  return {BasinStatus::kUndecided, -1};
}

std::vector<CVector> psi_iterates(const SequenceSpec& seq, const NormalFormResult& nf, const CVector& z, int count) {
  check_pair(seq, nf);
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  CVector w = z;
  for (int j = 1; j <= count; ++j) {
    w = seq.apply(j, w);
    CVector y = nf.T.evaluate(w);
    for (int i = 0; i < j; ++i) y = nf.apply_G_inverse(y);
    if (!y.allFinite()) throw Error(ErrorKind::kDiverged, "inverse chain overflowed at j = " + std::to_string(j));
    out.push_back(std::move(y));
  }
  return out;
}

CVector psi_approx(const SequenceSpec& seq, const NormalFormResult& nf, const CVector& z, int j) {
  if (j < 1) throw Error(ErrorKind::kOutOfRange, "psi index must be >= 1");
  check_pair(seq, nf);
  const auto orbit = orbit_compose(seq, 1, j, z);
  if (orbit.diverged) throw Error(ErrorKind::kDiverged, "forward orbit overflowed");
  CVector y = nf.T.evaluate(orbit.point);
  for (int i = 0; i < j; ++i) y = nf.apply_G_inverse(y);
  if (!y.allFinite()) throw Error(ErrorKind::kDiverged, "inverse chain overflowed at j = " + std::to_string(j));
  return y;
}

std::optional<double> fit_geometric_ratio(std::span<const double> values) {
  std::size_t best_start = 0, best_len = 0;
  std::size_t start = 0;
  while (start < values.size()) {
    if (!(values[start] > 0.0) || !std::isfinite(values[start])) {
      ++start;
      continue;
    }
    std::size_t end = start + 1;
    while (end < values.size() && values[end] > 0.0 && values[end] < values[end - 1]) ++end;
    if (end - start > best_len) {
      best_start = start;
      best_len = end - start;
    }
    start = end;
  }
  if (best_len < 3) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < best_len; ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log(values[best_start + i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(best_len);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return std::exp(slope);
}

CMatrix psi_linear_part(const SequenceSpec& seq, const NormalFormResult& nf, int j) {
  check_pair(seq, nf);
  const CMatrix g_inv = g_inverse_linear(nf);
  CMatrix m = nf.T.linear_part();
  CMatrix chain = CMatrix::Identity(seq.n, seq.n);
  for (int i = 1; i <= j; ++i) chain = seq.jet(i, 1).linear_part() * chain;
  m = m * chain;
  for (int i = 0; i < j; ++i) m = g_inv * m;
  return m;
}

PsiConvergenceReport psi_convergence_report(const SequenceSpec& seq, const NormalFormResult& nf,
                                            std::span<const CVector> points, int j_max, double reference_ratio) {
  if (j_max < seq.block) throw Error(ErrorKind::kInvalidArgument, "j_max must be >= the block size");
  check_pair(seq, nf);
  const int block = seq.block;
  PsiConvergenceReport report;
  report.j_max = j_max;
  report.block = block;
  report.reference_ratio = reference_ratio;
  report.points.resize(points.size());

  const auto count = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t p = 0; p < count; ++p) {
    auto& row = report.points[static_cast<std::size_t>(p)];
    row.point = points[static_cast<std::size_t>(p)];
    std::vector<CVector> psi;
    try {
      psi = psi_iterates(seq, nf, row.point, j_max + block);
    } catch (const Error&) {
      row.diverged = true;
      continue;
    }
    for (int j = block; j <= j_max; ++j)
      row.diffs.push_back((psi[static_cast<std::size_t>(j + block - 1)] - psi[static_cast<std::size_t>(j - 1)]).norm());
    row.fitted_ratio = fit_geometric_ratio(row.diffs);
  }
  report.det_jacobian_at_zero = psi_linear_part(seq, nf, j_max).determinant();
  return report;
}

InjectivityReport injectivity_check(const SequenceSpec& seq, const NormalFormResult& nf,
                                    std::span<const CVector> points, int j, std::size_t pairs, std::uint64_t seed,
                                    double min_separation, double min_gap) {
  if (points.size() < 2) throw Error(ErrorKind::kInvalidArgument, "injectivity check needs at least two points");
  std::vector<CVector> images(points.size());
  std::vector<char> failed(points.size(), 0);
  const auto count = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t p = 0; p < count; ++p) {
    try {
      images[static_cast<std::size_t>(p)] = psi_approx(seq, nf, points[static_cast<std::size_t>(p)], j);
    } catch (const Error&) {
      failed[static_cast<std::size_t>(p)] = 1;
    }
  }

  InjectivityReport report;
  report.smallest_gap = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  const std::size_t max_draws = pairs * 100;
  for (std::size_t draw = 0; draw < max_draws && report.pairs < pairs; ++draw) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    if (a == b || failed[a] || failed[b]) continue;
    if ((points[a] - points[b]).norm() < min_separation) continue;
    const double gap = (images[a] - images[b]).norm();
    ++report.pairs;
    report.smallest_gap = std::min(report.smallest_gap, gap);
    if (gap < min_gap) ++report.collisions;
  }
  return report;
}

GridSpec GridSpec::coordinate_plane(int n, double radius, int width, int height) {
  GridSpec g;
  g.origin = CVector::Zero(n);
  g.dir1 = CVector::Zero(n);
  g.dir2 = CVector::Zero(n);
  g.dir1[0] = 1.0;
  if (n > 1)
    g.dir2[1] = 1.0;
  else
    g.dir2[0] = Complex{0.0, 1.0};
  g.t1_min = g.t2_min = -radius;
  g.t1_max = g.t2_max = radius;
  g.width = width;
  g.height = height;
  return g;
}

void GridSpec::validate(int n) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kValidation, msg); };
  if (width < 2) fail("grid.width must be >= 2");
  if (height < 2) fail("grid.height must be >= 2");
  if (origin.size() != n) fail("grid.origin must have n entries");
  if (dir1.size() != n || dir2.size() != n) fail("grid.directions must have n entries each");
  if (dir1.norm() == 0.0 || dir2.norm() == 0.0) fail("grid.directions must be nonzero");
  if (!(t1_min < t1_max)) fail("grid.t1 must be an increasing range");
  if (!(t2_min < t2_max)) fail("grid.t2 must be an increasing range");
  if (!(escape_radius > 0.0)) fail("grid.escape_radius must be > 0");
}

double GridSpec::t1(int i) const { return t1_min + (t1_max - t1_min) * i / (width - 1); }
double GridSpec::t2(int j) const { return t2_min + (t2_max - t2_min) * j / (height - 1); }

CVector GridSpec::point(int i, int j) const { return origin + t1(i) * dir1 + t2(j) * dir2; }

bool GridSpec::operator==(const GridSpec& o) const {
  auto same = [](const CVector& a, const CVector& b) { return a.size() == b.size() && a == b; };
  return same(origin, o.origin) && same(dir1, o.dir1) && same(dir2, o.dir2) && t1_min == o.t1_min &&
         t1_max == o.t1_max && t2_min == o.t2_min && t2_max == o.t2_max && width == o.width && height == o.height &&
         escape_radius == o.escape_radius;
}

std::size_t BasinGrid::count(BasinStatus status) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [&](const Membership& m) { return m.status == status; }));
}

BasinGrid grid_classify(const SequenceSpec& seq, const GridSpec& grid, int j_max) {
  grid.validate(seq.n);
  if (j_max < 1) throw Error(ErrorKind::kInvalidArgument, "j_max must be >= 1");
  BasinGrid out{grid, j_max, std::vector<Membership>(static_cast<std::size_t>(grid.width) * grid.height)};
  const auto cells = static_cast<std::int64_t>(out.cells.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t c = 0; c < cells; ++c) {
    const int i = static_cast<int>(c % grid.width);
    const int j = static_cast<int>(c / grid.width);
    out.cells[static_cast<std::size_t>(c)] = basin_membership(seq, grid.point(i, j), j_max, grid.escape_radius);
  }
  return out;
}

BasinGrid grid_classify_serial(const SequenceSpec& seq, const GridSpec& grid, int j_max) {
  grid.validate(seq.n);
  BasinGrid out{grid, j_max, {}};
  out.cells.reserve(static_cast<std::size_t>(grid.width) * grid.height);
  for (int j = 0; j < grid.height; ++j)
    for (int i = 0; i < grid.width; ++i)
      out.cells.push_back(basin_membership(seq, grid.point(i, j), j_max, grid.escape_radius));
  return out;
}

}  // namespace fbasin
