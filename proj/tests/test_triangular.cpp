#include <doctest.h>

#include <random>

#include "fbasin/error.hpp"
#include "fbasin/triangular.hpp"
#include "oracle.hpp"

using namespace fbasin;

using oracle::random_triangular;

TEST_SUITE("triangular") {
  TEST_CASE("structure validation") {
    PolyJetMap f(2, 2, true);
    f.layer(1).set_coeff(0, MultiIndex{1, 0}, 0.5);
    f.layer(1).set_coeff(1, MultiIndex{0, 1}, 0.25);
    f.layer(2).set_coeff(1, MultiIndex{2, 0}, 1.0);
    CHECK_NOTHROW(LowerTriangularAuto{f});

    auto upper = f;
    upper.layer(2).set_coeff(0, MultiIndex{0, 2}, 1.0);
    CHECK_THROWS_AS(LowerTriangularAuto{upper}, Error);

    auto self = f;
    self.layer(2).set_coeff(1, MultiIndex{1, 1}, 1.0);
    CHECK_THROWS_AS(LowerTriangularAuto{self}, Error);

    auto zero = f;
    zero.layer(1).set_coeff(1, MultiIndex{0, 1}, 0.0);
    try {
      LowerTriangularAuto{zero};
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kZeroDiagonal);
    }
  }

  TEST_CASE("exact inverse composes to the identity") {
    std::mt19937_64 rng(41);
    for (int n = 2; n <= 3; ++n)
      for (int d = 2; d <= 3; ++d) {
        const auto g = random_triangular(n, d, rng);
        const auto inv = invert_exact(g);
        int bound = 1;
        for (int k = 1; k < n; ++k) bound *= d;
        CHECK(inv.degree() <= bound);
        const int order = inv.degree() * d;
        const auto left = compose_truncated(g.map(), inv.map(), order);
        const auto right = compose_truncated(inv.map(), g.map(), order);
        const auto id = PolyJetMap::identity(n, order);
        CHECK((left - id).max_abs() < 1e-9);
        CHECK((right - id).max_abs() < 1e-9);
      }
  }

  TEST_CASE("pointwise solve agrees with the exact inverse") {
    std::mt19937_64 rng(42);
    const auto g = random_triangular(3, 2, rng);
    const auto inv = invert_exact(g);
    for (int i = 0; i < 10; ++i) {
      const auto z = oracle::random_point(3, 0.5, rng);
      CHECK((g.solve(z) - inv.evaluate(z)).norm() < 1e-10);
      CHECK((g.evaluate(g.solve(z)) - z).norm() < 1e-12);
    }
  }

  TEST_CASE("chain degree never exceeds d^(n-1)") {
    std::mt19937_64 rng(43);
    for (int n = 2; n <= 3; ++n) {
      std::vector<LowerTriangularAuto> chain;
      for (int k = 0; k < 6; ++k) {
        chain.push_back(random_triangular(n, 2, rng));
        const auto res = compose_chain(chain);
        REQUIRE(res.composed);
        CHECK(res.degree() <= (n == 2 ? 2 : 4));
        const auto z = oracle::random_point(n, 0.3, rng);
        CVector w = z;
        for (const auto& g : chain) w = g.evaluate(w);
        CHECK((res.evaluate(z) - w).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("term budget falls back to pointwise evaluation") {
    std::mt19937_64 rng(44);
    std::vector<LowerTriangularAuto> chain{random_triangular(3, 3, rng), random_triangular(3, 3, rng)};
    const auto res = compose_chain(chain, 4);
    CHECK_FALSE(res.composed);
    CHECK(res.degree_check_skipped);
    const auto z = oracle::random_point(3, 0.3, rng);
    CHECK((res.evaluate(z) - chain[1].evaluate(chain[0].evaluate(z))).norm() < 1e-15);
  }

  TEST_CASE("growth constant bounds the image on the ball") {
    std::mt19937_64 rng(45);
    const auto g = random_triangular(3, 3, rng);
    const double rho = 0.7;
    const double c = linear_growth_constant(g.map(), rho);
    for (int i = 0; i < 2000; ++i) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const auto z = oracle::random_point(3, rho * u(rng), rng);
      CHECK(g.evaluate(z).norm() <= c * z.norm() * (1 + 1e-12));
    }
  }

  TEST_CASE("gamma chain bound small cases") {
    // d = 1, n = 2: sum over i = 1 only, Q(1) sqrt(2) C = 2 sqrt(2) C.
    CHECK(gamma_chain_bound(1, 2, 1.0) == doctest::Approx(2.0 * std::sqrt(2.0)));
    // d = 2, n = 2: 2 sqrt2 C + 3 * 2 C^2.
    CHECK(gamma_chain_bound(2, 2, 0.5) == doctest::Approx(2 * std::sqrt(2.0) * 0.5 + 3 * 2 * 0.25));
    CHECK_THROWS_AS(gamma_chain_bound(0, 2, 1.0), Error);
  }

  TEST_CASE("inverse bound constants") {
    const auto b = inverse_linear_bound(2, 0.5, 1.0, 1.0);
    CHECK(b.constant == doctest::Approx(std::sqrt(2.0) * 2.0 / 0.25));
    CHECK(b.radius == doctest::Approx(1.0 / b.constant));
  }

  TEST_CASE("containment setup clamps rho") {
    std::mt19937_64 rng(46);
    const auto g = random_triangular(2, 2, rng);
    const auto s = chain_containment_setup(g, 1.5);
    CHECK(s.clamped);
    CHECK(s.rho == 0.99);
    CHECK(s.gamma > 0.0);
  }

  TEST_CASE("iterates of an attracting triangular map reach zero") {
    PolyJetMap f(2, 2, true);
    f.layer(1).set_coeff(0, MultiIndex{1, 0}, 0.5);
    f.layer(1).set_coeff(1, MultiIndex{0, 1}, 0.25);
    f.layer(2).set_coeff(1, MultiIndex{2, 0}, 1.0);
    const LowerTriangularAuto g(f);
    std::vector<CVector> pts;
    std::mt19937_64 rng(47);
    for (int i = 0; i < 50; ++i) pts.push_back(oracle::random_point(2, 3.0, rng));
    for (const auto& k : iterates_to_zero_check(g, pts, 200, 1e-8)) CHECK(k.has_value());
  }
}
