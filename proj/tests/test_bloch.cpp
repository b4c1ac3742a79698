#include <doctest.h>

#include <cmath>

#include "blochball/bloch.hpp"
#include "blochball/rng.hpp"
#include "blochball/verify.hpp"

using namespace blochball;
using namespace blochball::bloch;
using holo::HoloMap;
using holo::PolyTerm;

namespace {

BallPoint rand_point(Rng& rng, int n, double rmax) {
  CVec v(n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    v[k] = {rng.gaussian(), rng.gaussian()};
    s += std::norm(v[k]);
  }
  const double r = rmax * std::pow(rng.uniform01(), 1.0 / (2.0 * n));
  for (cplx& c : v) c *= r / std::sqrt(s);
  return BallPoint(std::move(v));
}

HoloMap bloch_extremal_disk() {
  // f(z) = 3 sqrt(3) z^2 / 4
  return HoloMap::polynomial(1, {{PolyTerm{cplx(0.75 * std::sqrt(3.0)), {2}}}});
}

}  // namespace

TEST_CASE("density closed-form examples") {
  for (int n : {1, 2, 3}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      CHECK(density(HoloMap::identity(n), BallPoint::origin(n), {n, alpha}) ==
            doctest::Approx(1.0));
    }
  }
  // the Bloch extremal attains density one on |z| = 1/sqrt(3)
  const HoloMap f = bloch_extremal_disk();
  const BallPoint z({cplx(1.0 / std::sqrt(3.0))});
  CHECK(density(f, z, {1, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  // extremal family: density vanishes where the determinant does
  const HoloMap g = holo::extremal_map(0.3, 2);
  CVec zm(2, cplx(0.0));
  zm[0] = 0.3;
  CHECK(density(g, BallPoint(zm), {2, 1.0}) == 0.0);
}

TEST_CASE("density homogeneity and automorphism invariance") {
  Rng rng(3);
  for (int n : {1, 2}) {
    const HoloMap f = holo::random_polynomial(n, 4, rng);
    const cplx c{-0.8, 0.45};
    const HoloMap cf = holo::scaled(f, c);
    const BallPoint a = rand_point(rng, n, 0.7);
    const HoloMap phi = holo::mobius_auto(a);
    const HoloMap fphi = holo::compose(f, phi);
    for (int i = 0; i < 40; ++i) {
      const BallPoint z = rand_point(rng, n, 0.93);
      const double d = density(f, z, {n, 1.0});
      CHECK(density(cf, z, {n, 1.0}) ==
            doctest::Approx(std::abs(c) * d).epsilon(1e-12));
      // composition with an automorphism pulls the density back (alpha = 1)
      const BallPoint pz(phi.eval(z.coords()));
      CHECK(density(fphi, z, {n, 1.0}) ==
            doctest::Approx(density(f, pz, {n, 1.0})).epsilon(1e-10));
    }
  }
}

TEST_CASE("prenorm certificates") {
  PrenormBudget budget;
  SUBCASE("identity peaks at the origin") {
    const auto est = prenorm(HoloMap::identity(1), {1, 1.0}, budget, 5);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(est.arg.norm() < 1e-4);
    CHECK(est.converged);
  }
  SUBCASE("bloch extremal has unit prenorm") {
    const auto est = prenorm(bloch_extremal_disk(), {1, 1.0}, budget, 7);
    CHECK(std::abs(est.value - 1.0) < 1e-8);
  }
  SUBCASE("theorem-D extremal is prenorm-normalized, on and off the branch") {
    for (int n : {1, 2}) {
      const auto on = prenorm(holo::extremal_map(a0(1.0, n), n), {n, 1.0},
                              budget, 11);
      CHECK(std::abs(on.value - 1.0) < 1e-6);
      const auto off = prenorm(holo::extremal_map(0.6, n), {n, 1.0}, budget, 13);
      CHECK(std::abs(off.value - 1.0) < 1e-6);
    }
  }
  SUBCASE("estimate replays through density") {
    Rng rng(17);
    const HoloMap f = holo::random_polynomial(2, 4, rng);
    const auto est = prenorm(f, {2, 1.0}, budget, 19);
    CHECK(density(f, est.arg, {2, 1.0}) ==
          doctest::Approx(est.value).epsilon(1e-12));
  }
  SUBCASE("deterministic given the seed") {
    Rng rng(23);
    const HoloMap f = holo::random_polynomial(2, 3, rng);
    const auto a = prenorm(f, {2, 1.0}, budget, 29);
    const auto b = prenorm(f, {2, 1.0}, budget, 29);
    CHECK(a.value == b.value);
    CHECK(a.arg.coords() == b.arg.coords());
  }
}

TEST_CASE("sharp constant M") {
  CHECK(constant_M(1) == doctest::Approx(2.5980762113533159).epsilon(1e-15));
  CHECK(constant_M(1) == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-15));
  CHECK(constant_M(2) == doctest::Approx(1.7547653506033233).epsilon(1e-15));
  CHECK(constant_M(3) == doctest::Approx(1.5174055775072931).epsilon(1e-15));
  CHECK(constant_M(1) < 3.31);  // improves the earlier 3.31 bound
  CHECK_THROWS_AS(constant_M(0), std::invalid_argument);
}

TEST_CASE("a0 closed form") {
  CHECK(a0(1.0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(a0(1.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(a0(0.0, 1), std::invalid_argument);
}

TEST_CASE("lemma-C profile") {
  for (double alpha : {1.0, 2.0}) {
    for (int n : {1, 2, 3}) {
      const LemmaCProfile p{alpha, n};
      CHECK(lemma_c_profile(0.0, p) == 0.0);
      CHECK(lemma_c_profile(1.0, p) == 0.0);
      CHECK(std::abs(lemma_c_profile(p.a0(), p) - 1.0) < 1e-14);
    }
  }
  const LemmaCProfile p11{1.0, 1};
  CHECK(lemma_c_profile(0.2, p11) ==
        doctest::Approx(0.49883063257983666).epsilon(1e-15));
  CHECK_THROWS_AS(lemma_c_profile(-0.1, p11), std::invalid_argument);
  CHECK_THROWS_AS(lemma_c_profile(1.1, p11), std::invalid_argument);
}

TEST_CASE("lemma-C monotonicity on both branches") {
  for (double alpha : {1.0, 2.0}) {
    for (int n : {1, 2, 3}) {
      const LemmaCProfile p{alpha, n};
      const double peak = p.a0();
      const int g = 10000;
      double prev = -1.0;
      for (int i = 0; i <= g; ++i) {
        const double v = lemma_c_profile(peak * i / g, p);
        CHECK(v > prev);
        prev = v;
      }
      prev = 2.0;
      for (int i = 1; i <= g; ++i) {
        const double v = lemma_c_profile(peak + (1.0 - peak) * i / g, p);
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("m_root against an independent bisection oracle") {
  const LemmaCProfile p{1.0, 1};
  // oracle: plain bisection on (3 sqrt(3)/2) x (1 - x^2) written out directly
  auto direct = [](double x) { return 1.5 * std::sqrt(3.0) * x * (1.0 - x * x); };
  double lo = 0.0, hi = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (direct(mid) < 0.5 ? lo : hi) = mid;
  }
  const double oracle = 0.5 * (lo + hi);
  CHECK(oracle == doctest::Approx(0.2005116442405804).epsilon(1e-12));
  CHECK(m_root(0.5, p) == doctest::Approx(oracle).epsilon(1e-12));

  CHECK(m_root(1.0, p) == doctest::Approx(p.a0()).epsilon(1e-13));
  CHECK(m_root(1e-9, p) < 1e-6);
  CHECK_THROWS_AS(m_root(0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(m_root(1.5, p), std::invalid_argument);

  // monotone in lambda
  for (int n : {1, 2, 3}) {
    const LemmaCProfile pn{1.0, n};
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double m = m_root(i / 20.0, pn);
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("lambda_of_m closed form and round trips") {
  // the branch top maps to one in every dimension
  for (int n : {1, 2, 3})
    CHECK(lambda_of_m(a0(1.0, n), n) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lambda_of_m(0.2, 1) ==
        doctest::Approx(0.49883063257983666).epsilon(1e-15));
  CHECK_THROWS_AS(lambda_of_m(0.9, 1), std::invalid_argument);
  CHECK_THROWS_AS(lambda_of_m(0.0, 1), std::invalid_argument);

  for (int n : {1, 2, 3}) {
    const LemmaCProfile p{1.0, n};
    for (int i = 1; i <= 10; ++i) {
      const double lambda = i / 10.0;
      CHECK(lambda_of_m(m_root(lambda, p), n) ==
            doctest::Approx(lambda).epsilon(1e-12));
    }
  }
}

TEST_CASE("theorem-D bounds") {
  const LemmaCProfile p{1.0, 2};
  SUBCASE("r = 0 collapses both bounds to lambda") {
    const auto b = theoremD_bounds(0.5, 0.0, p);
    CHECK(*b.lower == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(*b.upper == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("lambda = 1 admits the upper bound only at the origin") {
    const auto b = theoremD_bounds(1.0, 0.0, p);
    CHECK(b.r_high < 1e-10);
    const auto b2 = theoremD_bounds(1.0, 0.1, p);
    CHECK_FALSE(b2.upper.has_value());
    CHECK(b2.lower.has_value());
  }
  SUBCASE("extremal saturates the lower bound") {
    for (int n : {1, 2}) {
      const LemmaCProfile pn{1.0, n};
      const double lambda = 0.6;
      const double m = m_root(lambda, pn);
      const HoloMap f = holo::extremal_map(m, n);
      for (int j = 0; j <= 10; ++j) {
        const double t = m * j / 10.0;
        CVec z(n, cplx(0.0));
        z[0] = t;
        const auto b = theoremD_bounds(f.extremal_lambda(), t, pn);
        REQUIRE(b.lower.has_value());
        CHECK(f.jacobian_det(z).real() ==
              doctest::Approx(*b.lower).epsilon(1e-11));
      }
    }
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(theoremD_bounds(0.0, 0.1, p), std::invalid_argument);
    CHECK_THROWS_AS(theoremD_bounds(0.5, 1.0, p), std::invalid_argument);
  }
}

TEST_CASE("prenorm invariance under automorphisms") {
  Rng rng(31);
  PrenormBudget budget;
  const bloch::BlochParams p{2, 1.0};
  const HoloMap raw = holo::random_polynomial(2, 3, rng);
  double factor = 1.0;
  const HoloMap f = verify::normalized(raw, p, budget, 33, &factor);
  CHECK(factor > 0.0);
  const HoloMap phi = holo::mobius_auto(rand_point(rng, 2, 0.6));
  const auto pn_f = prenorm(f, p, budget, 35);
  const auto pn_cf = prenorm(holo::compose(f, phi), p, budget, 37);
  CHECK(std::abs(pn_f.value - pn_cf.value) < 2e-6);
}
