#include <doctest.h>

#include <omp.h>

#include <random>

#include "fbasin/basin.hpp"
#include "fbasin/error.hpp"
#include "oracle.hpp"

using namespace fbasin;

namespace {

CVector point(Complex a, Complex b) {
  CVector z(2);
  z << a, b;
  return z;
}

SequenceSpec single(Word word, AttractionParams prm) {
  SequenceSpec seq;
  seq.n = 2;
  seq.maps = {std::move(word)};
  seq.params = prm;
  seq.validate();
  return seq;
}

Primitive example_triangular(double second) {
  return Primitive::triangular({0.5, second}, {{1, MultiIndex{2, 0}, 1.0}});
}

SequenceSpec perturbed(std::uint64_t seed) {
  SequenceSpec seq = single({example_triangular(0.2)}, {2, 0.6, 0.15, 0.1});
  seq.kind = SequenceKind::kPerturbed;
  seq.perturbation = {4, 0.1, seed};
  seq.validate();
  return seq;
}

// (z1, z2) -> (z2 + z1^2, 0.1 z1)
Word henon_word() {
  return {Primitive::shear(1, {{1, MultiIndex{2, 0}, 1.0}}), Primitive::swap(0, 1), Primitive::diag({1.0, 0.1})};
}

}  // namespace

TEST_SUITE("basin") {
  TEST_CASE("orbit examples") {
    const auto diag = single({Primitive::diag({0.5, 0.25})}, {2, 0.6, 0.2, 1.0});
    const auto z = point(1.0, 1.0);
    CHECK(orbit_compose(diag, 1, 0, z).point == z);
    const auto r = orbit_compose(diag, 1, 3, z);
    CHECK(r.point[0] == Complex{0.125, 0.0});
    CHECK(r.point[1] == Complex{0.015625, 0.0});

    const auto tri = single({example_triangular(0.25)}, {2, 0.6, 0.2, 1.0});
    const auto t = orbit_compose(tri, 1, 2, point(1.0, 0.0));
    CHECK(t.point[0] == Complex{0.25, 0.0});
    CHECK(t.point[1] == Complex{0.5, 0.0});
    CHECK_THROWS_AS(orbit_compose(tri, 0, 2, z), Error);
    CHECK_THROWS_AS(orbit_compose(tri, 3, 1, z), Error);
  }

  TEST_CASE("orbit overflow is flagged with the last finite iterate") {
    const auto h = single(henon_word(), {2, 0.6, 0.2, 0.1});
    const auto r = orbit_compose(h, 1, 40, point(10.0, 10.0));
    CHECK(r.diverged);
    CHECK(r.point.allFinite());
  }

  TEST_CASE("semigroup property") {
    const auto seq = perturbed(42);
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      const auto z = oracle::random_point(2, 0.09, rng);
      for (int j = 1; j <= 5; ++j) {
        const auto head = orbit_compose(seq, 1, j - 1, z).point;
        const auto split = orbit_compose(seq, j, 8, head).point;
        const auto whole = orbit_compose(seq, 1, 8, z).point;
        CHECK((split - whole).norm() <= 1e-10 * whole.norm() + 1e-300);
      }
    }
  }

  TEST_CASE("word application matches the word jet") {
    std::mt19937_64 rng(62);
    CMatrix m(2, 2);
    m << 0.3, 0.1, -0.2, 0.4;
    const Word word{Primitive::linear(m), Primitive::shear(0, {{0, MultiIndex{0, 3}, {0.5, 0.2}}}), Primitive::swap(0, 1),
                    example_triangular(0.2)};
    const auto jet = word_jet(word, 2, 9);
    for (int i = 0; i < 10; ++i) {
      const auto z = oracle::random_point(2, 0.4, rng);
      CHECK((jet.evaluate(z) - apply_word(word, z)).norm() < 1e-13);
    }
  }

  TEST_CASE("primitive validation") {
    CHECK_THROWS_AS(Primitive::diag({0.5, 0.0}).validate(2), Error);
    CHECK_THROWS_AS(Primitive::triangular({0.5, 0.2}, {{0, MultiIndex{0, 2}, 1.0}}).validate(2), Error);
    CHECK_THROWS_AS(Primitive::triangular({0.5, 0.2}, {{1, MultiIndex{0, 0}, 1.0}}).validate(2), Error);
    CHECK_THROWS_AS(Primitive::shear(1, {{1, MultiIndex{1, 1}, 1.0}}).validate(2), Error);
    CHECK_THROWS_AS(Primitive::swap(1, 1).validate(2), Error);
    CHECK_THROWS_AS(Primitive::linear(CMatrix::Zero(2, 2)).validate(2), Error);
    CHECK_NOTHROW(example_triangular(0.2).validate(2));
  }

  TEST_CASE("perturbations are reproducible and keyed by index") {
    const auto a = perturbed(42);
    const auto b = perturbed(42);
    const auto c = perturbed(43);
    CHECK(a.perturbation_terms(7) == b.perturbation_terms(7));
    CHECK_FALSE(a.perturbation_terms(7) == a.perturbation_terms(8));
    CHECK_FALSE(a.perturbation_terms(7) == c.perturbation_terms(7));
    for (int j = 1; j <= 20; ++j)
      for (const auto& t : a.perturbation_terms(j)) {
        CHECK(std::abs(t.coeff) <= 0.1);
        CHECK(t.alpha.order() == 4);
        CHECK(t.component == 1);
      }
  }

  TEST_CASE("hypotheses: linear diagonal map") {
    const auto seq = single({Primitive::diag({0.5, 0.25})}, {2, 0.6, 0.2, 1.0});
    const auto rep = verify_hypotheses(seq, 3, 10, 200);
    CHECK(rep.ok());
    CHECK(rep.attraction_violations == 0);
    CHECK(rep.chain_violations == 0);
  }

  TEST_CASE("hypotheses: quadratic term dominates on a large ball") {
    const auto seq = single({example_triangular(0.25)}, {2, 0.6, 0.2, 10.0});
    const auto rep = verify_hypotheses(seq, 3, 5, 200);
    CHECK(rep.attraction_violations > 0);
    CHECK_FALSE(rep.ok());
  }

  TEST_CASE("hypotheses: perturbed jets agree through q - 1") {
    const auto rep = verify_hypotheses(perturbed(42), 4, 20, 100);
    CHECK(rep.derivative_discrepancy == 0.0);
    CHECK(rep.ok());
    const auto low = verify_hypotheses(perturbed(42), 5, 5, 10);
    CHECK(low.derivative_discrepancy > 0.0);
  }

  TEST_CASE("membership examples") {
    const auto diag = single({Primitive::diag({0.5, 0.25})}, {2, 0.6, 0.2, 1.0});
    CHECK(basin_membership(diag, point(0.0, 0.0), 10) == Membership{BasinStatus::kAttracted, 0});
    CHECK(basin_membership(diag, point(4.0, 0.0), 10) == Membership{BasinStatus::kAttracted, 3});
    const auto h = single(henon_word(), {2, 0.6, 0.2, 0.1});
    CHECK(basin_membership(h, point(10.0, 10.0), 200).status == BasinStatus::kDiverged);
    CHECK(basin_membership(diag, point(1e6, 0.0), 3).status == BasinStatus::kUndecided);
  }

  TEST_CASE("membership is stable under a larger iteration limit") {
    const auto seq = single({example_triangular(0.25)}, {2, 0.6, 0.2, 0.5});
    std::mt19937_64 rng(63);
    for (int i = 0; i < 50; ++i) {
      const auto z = oracle::random_point(2, 4.0, rng);
      const auto small = basin_membership(seq, z, 30);
      if (small.status == BasinStatus::kAttracted) CHECK(basin_membership(seq, z, 200) == small);
    }
  }

  TEST_CASE("psi examples") {
    const auto seq = single({example_triangular(0.2)}, {2, 0.6, 0.15, 0.1});
    const auto nf = normal_form(seq.jet(1, 2), 3);
    CHECK(psi_approx(seq, nf, point(0.0, 0.0), 5).norm() == 0.0);
    const auto z = point(0.05, 0.02);
    const CVector t = point(0.05, 0.02 - 20.0 * 0.05 * 0.05);
    for (int j = 1; j <= 8; ++j) CHECK((psi_approx(seq, nf, z, j) - t).norm() < 1e-12);

    // f itself triangular with T = id: psi_j is the identity.
    const auto res = single({example_triangular(0.25)}, {2, 0.6, 0.2, 0.3});
    const auto nf2 = normal_form(res.jet(1, 2), 3);
    for (int j = 1; j <= 8; ++j) CHECK((psi_approx(res, nf2, z, j) - z).norm() < 1e-12);
  }

  TEST_CASE("psi report on the exact linearization") {
    const auto seq = single({example_triangular(0.2)}, {2, 0.6, 0.15, 0.1});
    const auto nf = normal_form(seq.jet(1, 2), 3);
    const std::vector<CVector> pts{point(0.0, 0.0), point(0.03, -0.01)};
    const auto rep = psi_convergence_report(seq, nf, pts, 8, 0.5);
    CHECK(std::abs(rep.det_jacobian_at_zero - 1.0) < 1e-12);
    for (double d : rep.points[0].diffs) CHECK(d == 0.0);
    for (double d : rep.points[1].diffs) CHECK(d < 1e-13);
    CHECK_FALSE(rep.points[0].fitted_ratio);
  }

  TEST_CASE("psi on a perturbed sequence converges geometrically") {
    const auto seq = perturbed(42);
    const auto nf = normal_form(seq.jet(1, 3), 4);
    std::vector<CVector> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(sphere_point(2, 0.05 + 0.01 * i, 3, static_cast<std::uint64_t>(i)));
    const auto rep = psi_convergence_report(seq, nf, pts, 12, std::pow(0.6, 4) / 0.15);
    for (const auto& row : rep.points) {
      REQUIRE(row.fitted_ratio);
      CHECK(*row.fitted_ratio < rep.reference_ratio);
    }
    CHECK(std::abs(rep.det_jacobian_at_zero - 1.0) < 1e-8);
    CHECK((psi_linear_part(seq, nf, 12) - CMatrix::Identity(2, 2)).norm() < 1e-8);
  }

  TEST_CASE("geometric fit") {
    const std::vector<double> exact{1.0, 0.5, 0.25, 0.125, 0.0625};
    CHECK(*fit_geometric_ratio(exact) == doctest::Approx(0.5));
    const std::vector<double> noisy{1.0, 0.3, 0.09, 0.027, 0.05, 0.04};
    CHECK(*fit_geometric_ratio(noisy) == doctest::Approx(0.3));
    CHECK_FALSE(fit_geometric_ratio(std::vector<double>{0.0, 0.0, 0.0}));
    CHECK_FALSE(fit_geometric_ratio(std::vector<double>{1.0, 0.5}));
  }

  TEST_CASE("injectivity sampling") {
    const auto seq = perturbed(42);
    const auto nf = normal_form(seq.jet(1, 3), 4);
    std::vector<CVector> pts;
    for (int i = 0; i < 60; ++i) pts.push_back(sphere_point(2, 0.09, 5, static_cast<std::uint64_t>(i)));
    const auto rep = injectivity_check(seq, nf, pts, 10, 200, 9);
    CHECK(rep.pairs == 200);
    CHECK(rep.collisions == 0);
    CHECK(rep.smallest_gap > 1e-8);
  }

  TEST_CASE("grid: linear contraction is attracted everywhere") {
    const auto seq = single({Primitive::diag({0.5, 0.25})}, {2, 0.6, 0.2, 1.0});
    const auto grid = grid_classify(seq, GridSpec::coordinate_plane(2, 1.0, 16, 16), 50);
    CHECK(grid.count(BasinStatus::kAttracted) == 256);
  }

  TEST_CASE("grid: triangular map is attracted everywhere") {
    const auto seq = single({example_triangular(0.25)}, {2, 0.6, 0.2, 0.3});
    const auto grid = grid_classify(seq, GridSpec::coordinate_plane(2, 3.0, 32, 32), 200);
    CHECK(grid.count(BasinStatus::kAttracted) == 32 * 32);
  }

  TEST_CASE("grid: escaping map gives mixed statuses") {
    const auto seq = single(henon_word(), {2, 0.6, 0.2, 0.1});
    const auto grid = grid_classify(seq, GridSpec::coordinate_plane(2, 3.0, 32, 32), 200);
    CHECK(grid.count(BasinStatus::kAttracted) > 0);
    CHECK(grid.count(BasinStatus::kDiverged) > 0);
  }

  TEST_CASE("grid: parallel and serial kernels agree for every thread count") {
    const auto seq = perturbed(42);
    auto spec = GridSpec::coordinate_plane(2, 1.5, 24, 20);
    const auto serial = grid_classify_serial(seq, spec, 100);
    for (int threads : {1, 2, 4}) {
      omp_set_num_threads(threads);
      CHECK(grid_classify(seq, spec, 100).cells == serial.cells);
    }
  }

  TEST_CASE("grid validation") {
    const auto seq = single({Primitive::diag({0.5, 0.25})}, {2, 0.6, 0.2, 1.0});
    CHECK_THROWS_AS(grid_classify(seq, GridSpec::coordinate_plane(2, 1.0, 1, 16), 10), Error);
    CHECK_THROWS_AS(grid_classify(seq, GridSpec::coordinate_plane(2, 1.0, 16, 16), 0), Error);
    const auto g = GridSpec::coordinate_plane(2, 2.0, 5, 3);
    CHECK(g.t1(0) == -2.0);
    CHECK(g.t1(4) == 2.0);
    CHECK(g.t2(1) == 0.0);
  }
}
