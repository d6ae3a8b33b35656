#include <doctest.h>

#include <random>

#include "fbasin/error.hpp"
#include "fbasin/resonance.hpp"
#include "oracle.hpp"

using namespace fbasin;

namespace {

CMatrix diagonal(std::initializer_list<Complex> values) {
  const int n = static_cast<int>(values.size());
  CMatrix a = CMatrix::Zero(n, n);
  int i = 0;
  for (const auto& v : values) a(i, i) = v, ++i;
  return a;
}

Spectrum spectrum_of(const CMatrix& a) {
  Spectrum s;
  for (int i = 0; i < a.rows(); ++i) s.eigenvalues.push_back(a(i, i));
  return s;
}

HomogeneousMap random_layer(int n, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HomogeneousMap h(n, m);
  for (auto& c : h.coefficients()) c = {u(rng), u(rng)};
  return h;
}

}  // namespace

TEST_SUITE("resonance") {
  TEST_CASE("special basis of (0.5, 0.25) in degree 2") {
    const auto rep = special_basis(spectrum_of(diagonal({0.5, 0.25})), 2);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].component == 1);
    CHECK(rep.entries[0].alpha == MultiIndex{2, 0});
    CHECK(rep.margin == doctest::Approx(0.125));
    CHECK(rep.vanishes_for_all_degrees_ge == 3);
  }

  TEST_CASE("no special elements for (0.5, 0.2)") {
    const auto sp = spectrum_of(diagonal({0.5, 0.2}));
    for (int m = 2; m <= 8; ++m) CHECK(special_basis(sp, m).entries.empty());
    CHECK(special_free_degree(sp) == 3);
  }

  TEST_CASE("special elements never use the own or higher variables") {
    const auto sp = spectrum_of(diagonal({0.8, 0.64, 0.512}));
    for (int m = 2; m <= 5; ++m)
      for (const auto& e : special_basis(sp, m).entries)
        for (int k = e.component; k < 3; ++k) CHECK(e.alpha[k] == 0);
    CHECK_FALSE(is_special(sp, 0, std::vector<int>{2, 0, 0}, 1e-9));
    CHECK(is_special(sp, 1, std::vector<int>{2, 0, 0}, 1e-9));
    CHECK(is_special(sp, 2, std::vector<int>{1, 1, 0}, 1e-9));
    CHECK(is_special(sp, 2, std::vector<int>{3, 0, 0}, 1e-9));
  }

  TEST_CASE("commutator agrees with the sparse oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int n = 2; n <= 3; ++n)
      for (int m = 2; m <= 4; ++m) {
        CMatrix a = CMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k <= i; ++k) a(i, k) = {u(rng), u(rng)};
        const auto h = random_layer(n, m, rng);
        const auto got = oracle::from_layer(commutator_apply(a, h));
        const auto am = oracle::linear_map(a);
        const auto hm = oracle::from_layer(h);
        const auto ah = oracle::compose(am, hm, m);
        const auto ha = oracle::compose(hm, am, m);
        oracle::Map expected;
        for (int v = 0; v < n; ++v) expected.push_back(oracle::add(ah[v], ha[v], -1.0));
        CHECK(oracle::distance(got, expected) < 1e-13);
      }
  }

  TEST_CASE("solve: diagonal non-resonant gives X = 0") {
    std::mt19937_64 rng(32);
    const auto a = diagonal({0.6, 0.3, 0.1});
    for (int m = 2; m <= 6; ++m) {
      const auto r = random_layer(3, m, rng);
      const auto sol = commutator_solve(a, r);
      CHECK(sol.X.is_zero());
      CHECK((r - sol.X - commutator_apply(a, sol.H)).max_abs() < 1e-10);
    }
  }

  TEST_CASE("solve: resonant special coordinates go to X") {
    std::mt19937_64 rng(33);
    const auto a = diagonal({0.5, 0.25});
    const auto r = random_layer(2, 2, rng);
    const auto sol = commutator_solve(a, r);
    CHECK(sol.X.coeff(1, MultiIndex{2, 0}) == r.coeff(1, MultiIndex{2, 0}));
    CHECK(sol.H.coeff(1, MultiIndex{2, 0}) == Complex{});
    CHECK((r - sol.X - commutator_apply(a, sol.H)).max_abs() < 1e-12);
    HomogeneousMap x_off = sol.X;
    x_off.set_coeff(1, MultiIndex{2, 0}, {});
    CHECK(x_off.is_zero());
  }

  TEST_CASE("solve: general lower-triangular linear part") {
    std::mt19937_64 rng(34);
    CMatrix a(3, 3);
    a << 0.7, 0, 0, 0.3, 0.49, 0, -0.2, 0.1, 0.2;
    const auto sp = spectrum_of(a);
    for (int m = 2; m <= 5; ++m) {
      const auto r = random_layer(3, m, rng);
      const auto sol = commutator_solve(a, r);
      CHECK((r - sol.X - commutator_apply(a, sol.H)).max_abs() < 1e-10);
      const auto special = special_basis(sp, m).entries;
      for (int v = 0; v < 3; ++v)
        for (const auto& alpha : multi_index_basis(3, m)) {
          const bool is_sp = std::find(special.begin(), special.end(), BasisElement{v, alpha}) != special.end();
          if (!is_sp) CHECK(sol.X.coeff(v, alpha) == Complex{});
        }
    }
  }

  TEST_CASE("near-resonant divisors are rejected") {
    const auto a = diagonal({0.5, 0.25 + 1e-8});
    HomogeneousMap r(2, 2);
    r.set_coeff(1, MultiIndex{2, 0}, 1.0);
    CHECK_THROWS_AS(commutator_solve(a, r), Error);
    try {
      commutator_solve(a, r);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNearResonance);
    }
  }

  TEST_CASE("non-triangular linear part is rejected") {
    CMatrix a(2, 2);
    a << 0.5, 0.1, 0.0, 0.2;
    CHECK_THROWS_AS(commutator_solve(a, HomogeneousMap(2, 2)), Error);
  }
}
