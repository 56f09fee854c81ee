#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "starsense/branch_pair.hpp"
#include "starsense/rng.hpp"
#include "starsense/star_system.hpp"
#include "test_util.hpp"

using namespace starsense;

// ---------------------------------------------------------------------------
// combinatorics
// ---------------------------------------------------------------------------

TEST_CASE("binomial agrees with a Pascal-triangle oracle") {
  for (int n = 0; n <= 20; ++n)
    for (int k = -1; k <= n + 1; ++k)
      CHECK(binomial(n, k) == test_util::pascal_binomial(n, k));
}

TEST_CASE("binomial row for nine peripheral spins") {
  const unsigned long long expected[] = {1, 9, 36, 84, 126, 126, 84, 36, 9, 1};
  for (int m = 0; m <= 9; ++m) CHECK(binomial(9, m) == expected[m]);
}

// ---------------------------------------------------------------------------
// lopsidedness
// ---------------------------------------------------------------------------

TEST_CASE("weighted lopsidedness: pinned values") {
  const StarSystem sys;
  CHECK(weighted_lopsidedness(9, 0, sys) == doctest::Approx(9.405171806374334).epsilon(1e-14));
  CHECK(weighted_lopsidedness(8, 1, sys) == doctest::Approx(7.405171806374333).epsilon(1e-14));
  CHECK(weighted_lopsidedness(4, 5, sys) == doctest::Approx(0.5948281936256664).epsilon(1e-13));
}

TEST_CASE("weighted lopsidedness: direct recomputation oracle") {
  const StarSystem sys;
  for (int m_up = 0; m_up <= sys.n_b; ++m_up)
    for (int s_up = 0; s_up <= sys.n_b; ++s_up) {
      const double expect =
          std::abs(sys.gamma_a + double(m_up - s_up) * sys.gamma_b) / sys.gamma_b;
      CHECK(weighted_lopsidedness(m_up, s_up, sys) == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK_THROWS_AS(weighted_lopsidedness(-1, 0, sys), std::invalid_argument);
  CHECK_THROWS_AS(weighted_lopsidedness(0, sys.n_b + 1, sys), std::invalid_argument);
}

TEST_CASE("line lopsidedness pairs weight m with its complement") {
  const StarSystem sys;
  const double ratio = sys.gamma_a / sys.gamma_b;
  for (int m = 0; m <= sys.n_b; ++m)
    CHECK(line_lopsidedness(m, sys) ==
          doctest::Approx(std::abs(ratio + sys.n_b - 2.0 * m)).epsilon(1e-14));
  // outermost lines carry the largest weight difference
  CHECK(line_lopsidedness(0, sys) > line_lopsidedness(4, sys));
  CHECK(line_lopsidedness(9, sys) > line_lopsidedness(5, sys));
}

TEST_CASE("homonuclear star gives integer cat sizes") {
  const StarSystem homo(9, 42.577, 42.577, 10.67);
  CHECK(line_lopsidedness(0, homo) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(line_lopsidedness(9, homo) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("enhancement over the bare A spin") {
  const StarSystem sys;
  CHECK(enhancement_over_a(sys) == doctest::Approx(23.212799258014023).epsilon(1e-14));
  // oracle: the NOON line precesses ell times faster than a bare B spin,
  // and the bare A spin gamma_a/gamma_b times slower.
  const double expect = weighted_lopsidedness(sys.n_b, 0, sys) * sys.gamma_b / sys.gamma_a;
  CHECK(enhancement_over_a(sys) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(enhancement_over_a(0, 17.251, 42.577) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(enhancement_over_a(-1, 17.251, 42.577), std::invalid_argument);
}

TEST_CASE("system validation rejects degenerate parameters") {
  StarSystem sys;
  CHECK_NOTHROW(sys.validate());
  sys.n_b = 0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = StarSystem{};
  sys.gamma_b = 0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = StarSystem{};
  sys.t2_base = 0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  sys = StarSystem{};
  sys.kappa = 1.5;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
  CHECK_THROWS_AS(StarSystem(9, -1.0, 42.577, 10.67), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// branch pairs and the thermal bath
// ---------------------------------------------------------------------------

TEST_CASE("ground state: unit norm on the reference pattern") {
  const auto g = BranchPaird::ground(3);
  CHECK(g.weight == 3);
  CHECK(g.c(0, Pattern::ref) == std::complex<double>(1, 0));
  CHECK(g.c(0, Pattern::comp) == std::complex<double>(0, 0));
  CHECK(g.c(1, Pattern::ref) == std::complex<double>(0, 0));
  CHECK(g.squared_norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalized() restores unit norm") {
  BranchPaird s;
  s.weight = 2;
  s.coeffs << std::complex<double>(3, 1), std::complex<double>(0, -2),
      std::complex<double>(1, 1), std::complex<double>(0.5, 0);
  const auto n = s.normalized();
  CHECK(n.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
  // direction preserved
  const auto ratio = n.coeffs(0, 0) / s.coeffs(0, 0);
  CHECK(std::abs(n.coeffs(1, 1) - ratio * s.coeffs(1, 1)) < 1e-14);
}

TEST_CASE("thermal ensemble: binomial sector statistics") {
  const StarSystem sys;
  for (const double p : {0.1, 0.3, 0.5, 0.9}) {
    const auto ens = build_thermal_ensemble<double>(sys, p);
    REQUIRE(ens.components.size() == 10);
    double total = 0;
    for (int m = 0; m <= 9; ++m) {
      const auto& c = ens.components[m];
      CHECK(c.weight == m);
      CHECK(c.multiplicity == test_util::pascal_binomial(9, m));
      const double expect = double(c.multiplicity) * std::pow(p, m) * std::pow(1 - p, 9 - m);
      CHECK(c.probability == doctest::Approx(expect).epsilon(1e-12));
      CHECK(c.state.squared_norm() == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(c.coherence_factor == 1.0);
      total += c.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("unpolarized bath lands on exact dyadic weights") {
  const auto ens = build_thermal_ensemble<double>(StarSystem{}, 0.5);
  for (int m = 0; m <= 9; ++m)
    CHECK(ens.components[m].probability ==
          doctest::Approx(double(binomial(9, m)) / 512.0).epsilon(1e-15));
}

TEST_CASE("fully polarized baths collapse onto one sector") {
  const auto down = build_thermal_ensemble<double>(StarSystem{}, 0.0);
  CHECK(down.components[0].probability == doctest::Approx(1.0).epsilon(1e-15));
  const auto up = build_thermal_ensemble<double>(StarSystem{}, 1.0);
  CHECK(up.components[9].probability == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(build_thermal_ensemble<double>(StarSystem{}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_thermal_ensemble<double>(StarSystem{}, 1.01), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// deterministic randomness
// ---------------------------------------------------------------------------

TEST_CASE("splitmix substreams reproduce exactly and decorrelate") {
  SplitMix64 a(42, 7), b(42, 7), c(42, 8);
  bool identical = true, differ = false;
  for (int i = 0; i < 256; ++i) {
    const auto x = a();
    identical = identical && (x == b());
    differ = differ || (x != c());
  }
  CHECK(identical);
  CHECK(differ);
}

TEST_CASE("uniform draws stay in [0, 1)") {
  SplitMix64 rng(123);
  double lo = 1, hi = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  // with 2e4 draws the extremes should approach the ends
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("gaussian sampler: first two moments") {
  GaussianSampler g(2026, 0);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = g();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("gaussian sampler substreams reproduce") {
  GaussianSampler a(99, 3), b(99, 3);
  for (int i = 0; i < 64; ++i) CHECK(a() == b());
}
