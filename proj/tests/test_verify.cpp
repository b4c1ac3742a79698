#include <doctest.h>

#include <cmath>

#include "blochball/report.hpp"
#include "blochball/rng.hpp"
#include "blochball/verify.hpp"

using namespace blochball;
using namespace blochball::verify;
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

CampaignOptions light_options() {
  CampaignOptions opt;
  opt.prenorm_budget.samples = 1500;
  opt.prenorm_budget.refine_starts = 6;
  opt.prenorm_budget.refine_max_evals = 500;
  return opt;
}

}  // namespace

TEST_CASE("lipschitz ratio examples") {
  // identity on the disk between 0 and 0.5: |1 - 0.75| / 0.5 = 0.5
  CHECK(lipschitz_ratio(HoloMap::identity(1), BallPoint::origin(1),
                        BallPoint({cplx(0.5)}), 1) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(lipschitz_ratio(HoloMap::identity(1), BallPoint::origin(1),
                                  BallPoint::origin(1), 1),
                  std::invalid_argument);

  // extremal family between the origin and (m, 0, ..., 0): the measured
  // ratio equals M(n) (1-m^2)^((n+1)/(2n)) = (lambda/m)^(1/n)
  for (int n : {1, 2, 3}) {
    const double m = 0.25;
    const HoloMap f = holo::extremal_map(m, n);
    CVec w2(n, cplx(0.0));
    w2[0] = m;
    const double ratio =
        lipschitz_ratio(f, BallPoint::origin(n), BallPoint(w2), n);
    const double expect = bloch::constant_M(n) *
                          std::pow(1.0 - m * m, (n + 1.0) / (2.0 * n));
    CHECK(ratio == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ratio ==
          doctest::Approx(std::pow(f.extremal_lambda() / m, 1.0 / n))
              .epsilon(1e-12));
  }
}

TEST_CASE("mobius reduction of the ratio to the origin") {
  Rng rng(3);
  const int n = 2;
  const HoloMap f = holo::random_polynomial(n, 4, rng);
  for (int i = 0; i < 30; ++i) {
    const BallPoint z1 = rand_point(rng, n, 0.9);
    const BallPoint z2 = rand_point(rng, n, 0.9);
    if (z1.same_coords(z2)) continue;
    const HoloMap phi = holo::mobius_auto(z1);
    const HoloMap g = holo::compose(f, phi);
    const BallPoint w(phi.eval(z2.coords()));
    const double direct = lipschitz_ratio(f, z1, z2, n);
    const double reduced = lipschitz_ratio(g, BallPoint::origin(n), w, n);
    CHECK(reduced == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("sharpness of the constant") {
  SUBCASE("n = 1, eps = 0.01 reproduces the exact endpoint values") {
    const auto res = sharpness_run(0.01, 1);
    CHECK(res.m == doctest::Approx(0.062040323940139973).epsilon(1e-12));
    CHECK(res.ratio ==
          doctest::Approx(2.5880762113533159).epsilon(1e-12));
    CHECK(std::abs(res.ratio - (bloch::constant_M(1) - 0.01)) < 1e-9);
  }
  SUBCASE("ratio >= M(n) - eps - 1e-9 across dimensions") {
    for (int n : {1, 2, 3})
      for (double eps : {0.5, 0.1, 0.01}) {
        const auto res = sharpness_run(eps, n);
        CHECK(res.ratio >= bloch::constant_M(n) - eps - 1e-9);
      }
  }
  SUBCASE("monotone: smaller eps lands closer to M(n)") {
    for (int n : {1, 2}) {
      double prev_gap = 1e9;
      for (double eps : {0.4, 0.2, 0.1, 0.05, 0.01}) {
        const double gap = bloch::constant_M(n) - sharpness_run(eps, n).ratio;
        CHECK(gap < prev_gap);
        prev_gap = gap;
      }
    }
  }
  SUBCASE("admissible interval") {
    CHECK_THROWS_AS(sharpness_run(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sharpness_run(sharpness_eps_max(2) + 1e-6, 2),
                    std::invalid_argument);
    CHECK(sharpness_eps_max(2) > 0.5);  // criterion needs eps = 0.5 at n = 2
    CHECK(sharpness_eps_max(3) > 0.5);
  }
}

TEST_CASE("disk density derivatives") {
  SUBCASE("identity: (dz, dzbar) = (-conj(z), -z)") {
    const cplx z{0.3, -0.2};
    const auto d = density_derivatives_disk(HoloMap::identity(1), z);
    CHECK(std::abs(d.dz - (-std::conj(z))) < 1e-15);
    CHECK(std::abs(d.dzbar - (-z)) < 1e-15);
  }
  SUBCASE("value at the origin involves only f'' and f'") {
    Rng rng(7);
    const HoloMap f = holo::random_polynomial(1, 4, rng);
    const auto [f1, f2] = f.derivatives_1d(cplx(0.0));
    if (std::abs(f1) > 1e-9) {
      const auto d = density_derivatives_disk(f, cplx(0.0));
      CHECK(std::abs(d.dz - f2 * std::conj(f1) / (2.0 * std::abs(f1))) < 1e-14);
    }
  }
  SUBCASE("finite-difference cross-check of the gradient") {
    const HoloMap f = HoloMap::polynomial(
        1, {{PolyTerm{cplx(0.75 * std::sqrt(3.0)), {2}}}});
    const bloch::BlochParams p{1, 1.0};
    for (cplx z : {cplx(0.1, 0.0), cplx(0.25, -0.3), cplx(-0.5, 0.2)}) {
      const auto d = density_derivatives_disk(f, z);
      const double h = 1e-6;
      auto dens = [&](cplx w) { return bloch::density(f, BallPoint({w}), p); };
      const double ddx = (dens(z + h) - dens(z - h)) / (2.0 * h);
      const double ddy =
          (dens(z + cplx(0, h)) - dens(z - cplx(0, h))) / (2.0 * h);
      // D real: d/dx = 2 Re dz, d/dy = -2 Im dz
      CHECK(ddx == doctest::Approx(2.0 * d.dz.real()).epsilon(1e-5));
      CHECK(ddy == doctest::Approx(-2.0 * d.dz.imag()).epsilon(1e-5));
      CHECK(std::abs(d.dzbar - std::conj(d.dz)) < 1e-14);
    }
  }
  SUBCASE("critical points signal") {
    const HoloMap f = HoloMap::polynomial(1, {{PolyTerm{1.0, {2}}}});
    CHECK_THROWS_AS(density_derivatives_disk(f, cplx(0.0)), std::domain_error);
  }
}

TEST_CASE("k constant and the r cap") {
  CHECK(k_constant(1, 0.1, 0.5) ==
        doctest::Approx(0.20669872981077807).epsilon(1e-14));
  CHECK(theorem3_r_cap(1) ==
        doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  // r -> 0 gives eps / 2
  CHECK(k_constant(2, 1e-12, 0.8) == doctest::Approx(0.4).epsilon(1e-9));
  // r at the cap is rejected, just below it k is tiny
  CHECK_THROWS_AS(k_constant(1, theorem3_r_cap(1), 0.5), std::invalid_argument);
  CHECK(k_constant(1, theorem3_r_cap(1) * (1 - 1e-12), 0.5) < 1e-10);
}

TEST_CASE("theorem 1 campaign") {
  const CampaignOptions opt = light_options();
  SUBCASE("identity battery passes with small ratio") {
    const auto rep = check_theorem1({HoloMap::identity(1)}, 1, 2000, 42, opt);
    CHECK(rep.pass);
    CHECK(rep.stats.max_ratio <= 1.0 + 1e-9);
    CHECK(rep.stats.max_ratio > 0.5);
    CHECK(rep.stats.margin > 0.0);
  }
  SUBCASE("extremal battery comes close to the sharp constant") {
    const auto res = sharpness_run(0.01, 1);
    const auto rep =
        check_theorem1({holo::extremal_map(res.m, 1)}, 1, 10000, 7, opt);
    CHECK(rep.pass);
    CHECK(rep.stats.max_ratio >= 2.58);
  }
  SUBCASE("non-normalized battery is rejected with the estimate") {
    Rng rng(11);
    const HoloMap raw = holo::random_polynomial(1, 3, rng);
    CHECK_THROWS_WITH_AS(check_theorem1({raw}, 1, 100, 1, opt),
                         doctest::Contains("not prenorm-normalized"),
                         std::invalid_argument);
  }
  SUBCASE("replay determinism, bit-identical statistics") {
    const auto battery = random_battery(3, 4, 2, 99, opt.prenorm_budget);
    const auto a = check_theorem1(battery, 2, 500, 13, opt);
    const auto b = check_theorem1(battery, 2, 500, 13, opt);
    CHECK(a.stats.max_ratio == b.stats.max_ratio);
    CHECK(a.stats.points == b.stats.points);
    CHECK(report_to_json(a, false) == report_to_json(b, false));
  }
  SUBCASE("scaled-down bound produces replayable violations") {
    CampaignOptions opt2 = light_options();
    opt2.bound_scale = 0.2;
    const auto battery = random_battery(2, 3, 1, 123, opt2.prenorm_budget);
    const auto rep = check_theorem1(battery, 1, 400, 17, opt2);
    CHECK_FALSE(rep.pass);
    REQUIRE_FALSE(rep.violations.empty());
    for (std::size_t i = 0; i + 1 < rep.violations.size(); ++i)
      CHECK(rep.violations[i].excess >= rep.violations[i + 1].excess);
    const auto& v = rep.violations.front();
    const double replay =
        lipschitz_ratio(battery[v.map_index], BallPoint(v.points[0]),
                        BallPoint(v.points[1]), 1);
    CHECK(replay == doctest::Approx(v.computed).epsilon(1e-12));
    CHECK(v.excess == doctest::Approx(v.computed - v.bound).epsilon(1e-12));
  }
}

TEST_CASE("theorem 2 campaign") {
  CampaignOptions opt = light_options();
  opt.collect_rows = true;
  const auto battery = random_battery(3, 4, 1, 55, opt.prenorm_budget);
  const auto rep = check_theorem2(battery, 800, 5, opt);
  CHECK(rep.pass);
  CHECK(rep.stats.max_ratio <= 1.0);
  CHECK_FALSE(rep.rows.empty());
  // extremal equality note is recorded
  bool found = false;
  for (const auto& note : rep.notes)
    if (note.find("extremal equality") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("theorem D campaign") {
  const CampaignOptions opt = light_options();
  const auto battery = random_battery(3, 4, 1, 77, opt.prenorm_budget);
  const auto rep =
      check_theoremD({0.25, 0.5, 0.75, 1.0}, 1.0, 1, 300, 3, battery, opt);
  CHECK(rep.pass);
  CHECK(rep.stats.max_ratio <= 0.0);  // worst excess stays nonpositive
  // alpha = 2 exercises the general-profile branch with random maps only
  const auto rep2 = check_theoremD({0.5}, 2.0, 1, 200, 3, battery, opt);
  CHECK(rep2.pass);
}

TEST_CASE("theorem 3 hypothesis scan and campaign") {
  CampaignOptions opt = light_options();
  opt.wgrid = 24;
  SUBCASE("automorphism certifies tau = 1 and tanh beta = 0") {
    for (double anorm : {0.0, 0.3, 0.7}) {
      const BallPoint a =
          anorm == 0.0 ? BallPoint::origin(1) : BallPoint({cplx(anorm)});
      const HoloMap phi = holo::mobius_auto(a);
      const auto hyp = hypothesis_scan(phi, 24, 200, 9);
      CHECK(hyp.satisfied);
      CHECK(hyp.r_empirical <= 1e-10);
      CHECK(std::abs(hyp.eps_empirical - 1.0) <= 1e-10);
    }
  }
  SUBCASE("identity map satisfies the hypothesis trivially") {
    const auto hyp = hypothesis_scan(HoloMap::identity(2), 16, 150, 21);
    CHECK(hyp.satisfied);
    CHECK(hyp.r_empirical <= 1e-10);
    CHECK(std::abs(hyp.eps_empirical - 1.0) <= 1e-10);
  }
  SUBCASE("contraction z/2 misses the outer annulus") {
    // the image is the disk of radius 1/2, so grid points beyond it push
    // the attained tanh beta above the cap and tau collapses near the rim
    std::vector<holo::PolyComponent> comps(1);
    comps[0].push_back({cplx(0.5), {1}});
    const HoloMap half = HoloMap::polynomial(1, comps);
    const auto hyp = hypothesis_scan(half, 16, 250, 23);
    CHECK_FALSE(hyp.satisfied);
    CHECK(hyp.r_empirical > theorem3_r_cap(1));
    CHECK(hyp.eps_empirical < 0.5);
  }
  SUBCASE("composition operator lower bound for an automorphism") {
    const HoloMap phi = holo::mobius_auto(BallPoint({cplx(0.3)}));
    const auto battery = random_battery(3, 3, 1, 31, opt.prenorm_budget);
    const auto rep = check_theorem3(phi, 0.1, 0.5, battery, 3, opt);
    CHECK(rep.applicable);
    CHECK(rep.pass);
    CHECK(rep.stats.bound ==
          doctest::Approx(0.20669872981077807).epsilon(1e-12));
    CHECK(rep.stats.max_ratio >= 1.0 - 1e-4);  // automorphism invariance
  }
  SUBCASE("unmet hypothesis marks the report inapplicable") {
    // phi(z) = z^2 + 0.61: misses a neighborhood of -1 side; with eps close
    // to 1 the tau condition fails on the grid.
    std::vector<holo::PolyComponent> comps(1);
    comps[0].push_back({cplx(0.3), {2}});
    comps[0].push_back({cplx(0.61), {0}});
    const HoloMap shifted = HoloMap::polynomial(1, comps);
    const auto battery = random_battery(1, 2, 1, 37, opt.prenorm_budget);
    const auto rep = check_theorem3(shifted, 0.2, 0.99, battery, 5, opt);
    CHECK_FALSE(rep.applicable);
    CHECK(rep.pass);  // inapplicable, not failed
  }
}

TEST_CASE("proof-internal inequalities on grids") {
  for (int n : {1, 2, 3}) {
    CHECK(inequality_subcase_margin(n, 10000) >= -1e-12);
    CHECK(validity_radius_margin(n, 10000) >= -1e-15);
  }
}

TEST_CASE("report serialization shape") {
  const CampaignOptions opt = light_options();
  const auto rep = check_theorem1({HoloMap::identity(2)}, 2, 200, 77, opt);
  const std::string json = report_to_json(rep);
  for (const char* key : {"\"command\"", "\"params\"", "\"seed\"", "\"version\"",
                          "\"statistics\"", "\"max_ratio\"", "\"bound\"",
                          "\"margin\"", "\"witness\"", "\"violations\"",
                          "\"pass\""})
    CHECK(json.find(key) != std::string::npos);

  CampaignOptions opt_rows = opt;
  opt_rows.collect_rows = true;
  const auto rep2 = check_theorem1({HoloMap::identity(1)}, 1, 50, 78, opt_rows);
  const std::string csv = report_to_csv(rep2);
  CHECK(csv.find("map,z1_0_re") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
}
