#include "blochball/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "blochball/geometry.hpp"
#include "blochball/optim.hpp"
#include "blochball/parallel.hpp"

namespace blochball::verify {

namespace {

using holo::HoloMap;

constexpr double kSampleRmax = 1.0 - 1e-6;

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

BallPoint random_ball_point(Rng& rng, int n, double rmin, double rmax) {
  CVec v(n);
  double s = 0.0;
  do {
    for (int k = 0; k < n; ++k) {
      v[k] = {rng.gaussian(), rng.gaussian()};
      s += std::norm(v[k]);
    }
  } while (s == 0.0);
  const double u = rng.uniform01();
  const double r = rmin + (rmax - rmin) * std::pow(u, 1.0 / (2.0 * n));
  const cplx scale = r / std::sqrt(s);
  for (cplx& c : v) c *= scale;
  return BallPoint(std::move(v));
}

void sort_violations(std::vector<Violation>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    if (a.excess != b.excess) return a.excess > b.excess;
    return a.map_index < b.map_index;
  });
}

void validate_normalized(const std::vector<HoloMap>& battery, int n,
                         double alpha, std::uint64_t seed,
                         const CampaignOptions& opt) {
  if (battery.empty()) throw std::invalid_argument("battery is empty");
  const bloch::BlochParams p{n, alpha};
  for (std::size_t i = 0; i < battery.size(); ++i) {
    if (battery[i].dim() != n)
      throw std::invalid_argument("battery map has wrong dimension");
    const auto est =
        bloch::prenorm(battery[i], p, opt.prenorm_budget, mix_seed(seed, 7000 + i));
    if (std::abs(est.value - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "battery map " << i << " is not prenorm-normalized: estimate "
         << est.value;
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace

double lipschitz_ratio(const HoloMap& f, const BallPoint& z1,
                       const BallPoint& z2, int n) {
  if (z1.same_coords(z2))
    throw std::invalid_argument("lipschitz_ratio: degenerate pair z1 == z2");
  const bloch::BlochParams p{n, 1.0};
  const double d1 = bloch::density(f, z1, p);
  const double d2 = bloch::density(f, z2, p);
  const double rho = geom::pseudo_hyperbolic(z1, z2);  // tanh beta
  return std::abs(d2 - d1) / std::pow(rho, 1.0 / n);
}

std::vector<std::pair<BallPoint, BallPoint>> sample_pairs(int n, int count,
                                                          double rmax,
                                                          Rng rng) {
  std::vector<std::pair<BallPoint, BallPoint>> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    const int bucket = static_cast<int>(out.size()) % 5;
    switch (bucket) {
      case 0:
      case 1: {  // uniform pairs
        BallPoint a = random_ball_point(rng, n, 0.0, rmax);
        BallPoint b = random_ball_point(rng, n, 0.0, rmax);
        if (a.same_coords(b)) continue;
        out.emplace_back(std::move(a), std::move(b));
        break;
      }
      case 2: {  // near-diagonal: |z1 - z2| ~ 1e-3
        BallPoint a = random_ball_point(rng, n, 0.0, rmax * 0.999);
        CVec d(n);
        for (int k = 0; k < n; ++k) d[k] = {rng.gaussian(), rng.gaussian()};
        const double dn = vec_norm(d);
        if (dn == 0.0) continue;
        const double delta = 1e-3 * rng.uniform(0.5, 1.5);
        CVec b = a.coords() + cplx(delta / dn) * d;
        if (vec_norm(b) >= rmax || b == a.coords()) continue;
        out.emplace_back(std::move(a), BallPoint(std::move(b)));
        break;
      }
      case 3: {  // near-boundary pair
        BallPoint a = random_ball_point(rng, n, 0.985 * rmax, rmax);
        BallPoint b = random_ball_point(rng, n, 0.985 * rmax, rmax);
        if (a.same_coords(b)) continue;
        out.emplace_back(std::move(a), std::move(b));
        break;
      }
      default: {  // radial pair on the first axis, half of them from 0
        const double t2 = rng.uniform(1e-4, rmax);
        CVec b(n, cplx(0.0));
        b[0] = t2;
        CVec a(n, cplx(0.0));
        if (rng.uniform01() < 0.5) {
          const double t1 = rng.uniform(0.0, rmax);
          a[0] = t1;
        }
        if (a == b) continue;
        out.emplace_back(BallPoint(std::move(a)), BallPoint(std::move(b)));
        break;
      }
    }
  }
  return out;
}

VerificationReport check_theorem1(const std::vector<HoloMap>& battery, int n,
                                  int pairs, std::uint64_t seed,
                                  const CampaignOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (pairs < 1) throw std::invalid_argument("check_theorem1: pairs >= 1");
  validate_normalized(battery, n, 1.0, seed, opt);

  const double m_n = bloch::constant_M(n);
  const double bound =
      opt.bound_scale * (m_n * (1.0 + opt.assert_tol) + m_n * opt.sup_tol);

  struct PerMap {
    double max_ratio = 0.0;
    std::vector<CVec> witness;
    std::vector<Violation> violations;
    std::vector<SampleRow> rows;
  };
  std::vector<PerMap> per(battery.size());

  parallel_for(battery.size(), [&](std::size_t i) {
    Rng rng = Rng(seed).substream(i);
    const auto pts = sample_pairs(n, pairs, kSampleRmax, rng);
    PerMap& acc = per[i];
    for (const auto& [z1, z2] : pts) {
      const double ratio = lipschitz_ratio(battery[i], z1, z2, n);
      if (ratio > acc.max_ratio) {
        acc.max_ratio = ratio;
        acc.witness = {z1.coords(), z2.coords()};
      }
      if (ratio > bound) {
        acc.violations.push_back({"lipschitz ratio exceeds M(n) bound",
                                  static_cast<int>(i),
                                  {z1.coords(), z2.coords()},
                                  ratio,
                                  bound,
                                  ratio - bound});
      }
      if (opt.collect_rows) {
        SampleRow row;
        row.map_index = static_cast<int>(i);
        for (const cplx& c : z1.coords()) {
          row.values.push_back(c.real());
          row.values.push_back(c.imag());
        }
        for (const cplx& c : z2.coords()) {
          row.values.push_back(c.real());
          row.values.push_back(c.imag());
        }
        row.values.push_back(ratio);
        row.values.push_back(bound);
        row.values.push_back(bound - ratio);
        acc.rows.push_back(std::move(row));
      }
    }
  });

  VerificationReport rep;
  rep.theorem = "thm1";
  rep.params = {{"n", static_cast<double>(n)},
                {"pairs", static_cast<double>(pairs)},
                {"maps", static_cast<double>(battery.size())},
                {"sup_tol", opt.sup_tol},
                {"assert_tol", opt.assert_tol},
                {"bound_scale", opt.bound_scale}};
  rep.seed = seed;
  rep.stats.bound = bound;
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (per[i].max_ratio > rep.stats.max_ratio) {
      rep.stats.max_ratio = per[i].max_ratio;
      rep.stats.map_index = static_cast<int>(i);
      rep.stats.points = per[i].witness;
    }
    for (auto& v : per[i].violations) rep.violations.push_back(std::move(v));
    for (auto& r : per[i].rows) rep.rows.push_back(std::move(r));
  }
  rep.stats.margin = bound - rep.stats.max_ratio;
  sort_violations(rep.violations);
  rep.pass = rep.violations.empty();
  if (opt.collect_rows) {
    rep.row_columns = {"map"};
    for (int k = 0; k < n; ++k) {
      rep.row_columns.push_back("z1_" + std::to_string(k) + "_re");
      rep.row_columns.push_back("z1_" + std::to_string(k) + "_im");
    }
    for (int k = 0; k < n; ++k) {
      rep.row_columns.push_back("z2_" + std::to_string(k) + "_re");
      rep.row_columns.push_back("z2_" + std::to_string(k) + "_im");
    }
    rep.row_columns.push_back("ratio");
    rep.row_columns.push_back("bound");
    rep.row_columns.push_back("margin");
  }
  rep.runtime_seconds = now_seconds(t0);
  return rep;
}

double sharpness_eps_max(int n) {
  const double m_n = bloch::constant_M(n);
  const double cap = holo::kExtremalMaxM;
  return m_n * (1.0 - std::pow(1.0 - cap * cap, (n + 1.0) / (2.0 * n)));
}

SharpnessResult sharpness_run(double eps, int n) {
  const double m_n = bloch::constant_M(n);
  const double emax = sharpness_eps_max(n);
  if (!(eps > 0.0 && eps <= emax)) {
    std::ostringstream os;
    os << "sharpness_run: eps must lie in (0, " << emax << "] for n = " << n;
    throw std::invalid_argument(os.str());
  }
  const double m =
      std::sqrt(1.0 - std::pow(1.0 - eps / m_n, 2.0 * n / (n + 1.0)));
  const HoloMap f = holo::extremal_map(m, n);
  const BallPoint w1 = BallPoint::origin(n);
  CVec w2c(n, cplx(0.0));
  w2c[0] = m;
  const BallPoint w2(std::move(w2c));
  const double ratio = lipschitz_ratio(f, w1, w2, n);
  return {ratio, m, f.extremal_lambda()};
}

DiskDerivatives density_derivatives_disk(const HoloMap& f, cplx z) {
  if (f.dim() != 1)
    throw std::invalid_argument("density_derivatives_disk: disk maps only");
  if (!(std::abs(z) < 1.0 - kBallMargin))
    throw std::domain_error("density_derivatives_disk: point near the boundary");
  const auto [f1, f2] = f.derivatives_1d(z);
  const double af = std::abs(f1);
  if (af <= 1e-12)
    throw std::domain_error(
        "density_derivatives_disk: critical point of f', formula singular");
  const double w = 1.0 - std::norm(z);
  DiskDerivatives d;
  d.dz = -std::conj(z) * af + f2 * std::conj(f1) * w / (2.0 * af);
  d.dzbar = -z * af + std::conj(f2) * f1 * w / (2.0 * af);
  return d;
}

VerificationReport check_theorem2(const std::vector<HoloMap>& battery,
                                  int grid, std::uint64_t seed,
                                  const CampaignOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (grid < 1) throw std::invalid_argument("check_theorem2: grid >= 1");
  validate_normalized(battery, 1, 1.0, seed, opt);

  const double c0 = 1.5 * std::sqrt(3.0);  // 3 sqrt(3) / 2
  const double tol_scale = 1.0 + opt.assert_tol + opt.sup_tol;

  // shared deterministic grid
  std::vector<BallPoint> pts;
  pts.reserve(grid);
  {
    BallSampler sampler(1, 0.999, mix_seed(seed, 31));
    for (int i = 0; i < grid; ++i) pts.push_back(sampler.next());
  }

  struct PerMap {
    double max_rel = 0.0;  // computed / bound, both inequalities
    std::vector<CVec> witness;
    std::vector<Violation> violations;
    std::vector<SampleRow> rows;
  };
  std::vector<PerMap> per(battery.size());

  parallel_for(battery.size(), [&](std::size_t i) {
    PerMap& acc = per[i];
    for (const BallPoint& z : pts) {
      const cplx zc = z[0];
      const auto [f1, f2] = battery[i].derivatives_1d(zc);
      if (std::abs(f1) <= 1e-12) continue;  // excluded critical point
      const double w = 1.0 - std::norm(zc);
      const auto d = density_derivatives_disk(battery[i], zc);
      const double lhs19 = w * (std::abs(d.dz) + std::abs(d.dzbar));
      const double bound19 = opt.bound_scale * c0 * tol_scale;
      const double lhs20 = std::abs(f2);
      const double bound20 =
          opt.bound_scale * (2.0 * std::abs(zc) + c0) * tol_scale / (w * w);
      for (int which = 0; which < 2; ++which) {
        const double lhs = which == 0 ? lhs19 : lhs20;
        const double bnd = which == 0 ? bound19 : bound20;
        const double rel = lhs / bnd;
        if (rel > acc.max_rel) {
          acc.max_rel = rel;
          acc.witness = {CVec{zc}};
        }
        if (lhs > bnd)
          acc.violations.push_back(
              {which == 0 ? "gradient bound (1.19)" : "second derivative bound (1.20)",
               static_cast<int>(i),
               {CVec{zc}},
               lhs,
               bnd,
               lhs - bnd});
      }
      if (opt.collect_rows)
        acc.rows.push_back({static_cast<int>(i),
                            {zc.real(), zc.imag(), lhs19, bound19, lhs20,
                             bound20}});
    }
  });

  VerificationReport rep;
  rep.theorem = "thm2";
  rep.params = {{"grid", static_cast<double>(grid)},
                {"maps", static_cast<double>(battery.size())},
                {"sup_tol", opt.sup_tol},
                {"assert_tol", opt.assert_tol},
                {"bound_scale", opt.bound_scale}};
  rep.seed = seed;
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (per[i].max_rel > rep.stats.max_ratio) {
      rep.stats.max_ratio = per[i].max_rel;
      rep.stats.map_index = static_cast<int>(i);
      rep.stats.points = per[i].witness;
    }
    for (auto& v : per[i].violations) rep.violations.push_back(std::move(v));
    for (auto& r : per[i].rows) rep.rows.push_back(std::move(r));
  }
  rep.stats.bound = 1.0;
  rep.stats.margin = 1.0 - rep.stats.max_ratio;

  // Extremal equality: f(z) = 3 sqrt(3) z^2 / 4 attains the second-derivative
  // bound at the origin.
  {
    const HoloMap fext = HoloMap::polynomial(
        1, {{holo::PolyTerm{cplx(0.75 * std::sqrt(3.0)), {2}}}});
    const auto pn =
        bloch::prenorm(fext, {1, 1.0}, opt.prenorm_budget, mix_seed(seed, 97));
    const auto [f1, f2] = fext.derivatives_1d(cplx(0.0));
    (void)f1;
    const double gap = std::abs(std::abs(f2) - c0 * pn.value);
    std::ostringstream os;
    os << "extremal equality gap at origin: " << gap;
    rep.notes.push_back(os.str());
    if (gap > 1e-12)
      rep.violations.push_back({"extremal second-derivative equality at 0",
                                -1,
                                {CVec{cplx(0.0)}},
                                std::abs(f2),
                                c0 * pn.value,
                                gap});
  }

  sort_violations(rep.violations);
  rep.pass = rep.violations.empty();
  if (opt.collect_rows)
    rep.row_columns = {"map",     "z_re",    "z_im",
                       "lhs19",   "bound19", "lhs20",
                       "bound20"};
  rep.runtime_seconds = now_seconds(t0);
  return rep;
}

VerificationReport check_theoremD(const std::vector<double>& lambda_grid,
                                  double alpha, int n, int samples,
                                  std::uint64_t seed,
                                  const std::vector<HoloMap>& battery,
                                  const CampaignOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (lambda_grid.empty())
    throw std::invalid_argument("check_theoremD: empty lambda grid");
  const bloch::LemmaCProfile profile{alpha, n};

  VerificationReport rep;
  rep.theorem = "thmD";
  rep.params = {{"alpha", alpha},
                {"n", static_cast<double>(n)},
                {"samples", static_cast<double>(samples)},
                {"lambdas", static_cast<double>(lambda_grid.size())},
                {"maps", static_cast<double>(battery.size())}};
  rep.seed = seed;

  double max_excess = -std::numeric_limits<double>::infinity();

  auto track = [&](double excess, int map_index, std::vector<CVec> points,
                   const char* what, double computed, double bound) {
    if (excess > max_excess) {
      max_excess = excess;
      rep.stats.max_ratio = excess;
      rep.stats.map_index = map_index;
      rep.stats.points = points;
    }
    if (excess > 0.0)
      rep.violations.push_back(
          {what, map_index, std::move(points), computed, bound, excess});
  };

  // (a) extremal saturation of the lower bound along the radius, alpha = 1
  if (alpha == 1.0) {
    for (double lam : lambda_grid) {
      const double m = bloch::m_root(lam, profile);
      const HoloMap f = holo::extremal_map(m, n);
      const double lam_f = f.extremal_lambda();
      if (std::abs(lam_f - lam) > 5e-13)
        rep.notes.push_back("extremal lambda drift " +
                            std::to_string(std::abs(lam_f - lam)));
      for (int j = 0; j <= 9; ++j) {
        const double t = m * j / 9.0;
        CVec z(n, cplx(0.0));
        z[0] = t;
        const cplx det = f.jacobian_det(z);
        const double rhs =
            lam_f * (m - t) / (m * std::pow(1.0 - m * t, n + 2.0));
        const double gap = std::abs(det.real() - rhs) + std::abs(det.imag());
        track(gap - 1e-12, -1, {z}, "extremal saturation of the lower bound",
              det.real(), rhs);
        if (opt.collect_rows)
          rep.rows.push_back({-1, {lam, t, det.real(), rhs, gap}});
      }
    }
  }

  // (b) random normalized maps at their intrinsic lambda; the bounds need
  // unit prenorm in this alpha, so renormalize against the campaign profile
  // (a near-one factor for batteries already normalized at alpha = 1)
  for (std::size_t i = 0; i < battery.size(); ++i) {
    if (battery[i].dim() != n)
      throw std::invalid_argument("check_theoremD: battery map has wrong dimension");
    double factor = 1.0;
    const HoloMap f = normalized(battery[i], {n, alpha}, opt.prenorm_budget,
                                 mix_seed(seed, 400 + i), &factor);
    if (std::abs(factor - 1.0) > 1e-3)
      rep.notes.push_back("map " + std::to_string(i) +
                          " renormalized for alpha, factor " +
                          std::to_string(factor));
    holo::RotationResult rot{f, 0.0, 0.0};
    try {
      rot = holo::rotate_to_positive_det(f);
    } catch (const holo::DegenerateDeterminant&) {
      rep.notes.push_back("map " + std::to_string(i) +
                          ": det f'(0) = 0, lower bound trivial, skipped");
      continue;
    }
    const double lam = std::min(rot.lambda, 1.0);
    if (lam > 0.999) {
      rep.notes.push_back("map " + std::to_string(i) +
                          ": lambda too close to 1, skipped");
      continue;
    }
    const auto bounds0 = bloch::theoremD_bounds(lam, 0.0, profile);
    // lower bound inside r_low
    {
      BallSampler sampler(n, bounds0.r_low * (1.0 - 1e-9),
                          mix_seed(seed, 300 + i));
      for (int s = 0; s < samples; ++s) {
        const BallPoint z = sampler.next();
        const auto b = bloch::theoremD_bounds(lam, z.norm(), profile);
        const cplx det = rot.map.jacobian_det(z);
        const double slack = opt.assert_tol + std::abs(*b.lower) * opt.sup_tol;
        const double excess = *b.lower - slack - det.real();
        track(excess, static_cast<int>(i), {z.coords()},
              "distortion lower bound (1.07)", det.real(), *b.lower);
      }
    }
    // upper bound inside r_high
    if (bounds0.r_high > 1e-12) {
      BallSampler sampler(n, bounds0.r_high * (1.0 - 1e-9),
                          mix_seed(seed, 600 + i));
      for (int s = 0; s < samples; ++s) {
        const BallPoint z = sampler.next();
        const auto b = bloch::theoremD_bounds(lam, z.norm(), profile);
        const double mod = std::abs(rot.map.jacobian_det(z));
        const double slack = opt.assert_tol + *b.upper * opt.sup_tol;
        const double excess = mod - (*b.upper + slack);
        track(excess, static_cast<int>(i), {z.coords()},
              "distortion upper bound (1.08)", mod, *b.upper);
      }
    }
  }

  rep.stats.bound = 0.0;
  rep.stats.margin = -rep.stats.max_ratio;
  sort_violations(rep.violations);
  rep.pass = rep.violations.empty();
  if (opt.collect_rows)
    rep.row_columns = {"map", "lambda", "t", "det_re", "rhs", "gap"};
  rep.runtime_seconds = now_seconds(t0);
  return rep;
}

double theorem3_r_cap(int n) {
  return std::pow((n + 2.0) / (n + 1.0), 1.0 / n) / bloch::constant_M(n);
}

double k_constant(int n, double r, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("k_constant: eps > 0");
  if (!(r > 0.0 && r < theorem3_r_cap(n)))
    throw std::invalid_argument("k_constant: r at or above the admissible cap");
  return (1.0 -
          r * bloch::constant_M(n) * std::pow((n + 1.0) / (n + 2.0), 1.0 / n)) *
         eps / 2.0;
}

double tau_of(const HoloMap& phi, const BallPoint& z) {
  const int n = phi.dim();
  const CVec img = phi.eval(z.coords());
  const double ratio = (1.0 - z.norm_sq()) / (1.0 - norm_sq(img));
  const double det = std::abs(phi.jacobian_det(z.coords()));
  return std::pow(ratio, (n + 1.0) / (2.0 * n)) * std::pow(det, 1.0 / n);
}

Theorem3Hypothesis hypothesis_scan(const HoloMap& phi, int wgrid,
                                   int zsearch_evals, std::uint64_t seed) {
  if (wgrid < 1) throw std::invalid_argument("hypothesis_scan: wgrid >= 1");
  const int n = phi.dim();

  Theorem3Hypothesis hyp;
  hyp.wgrid.reserve(wgrid);
  {
    BallSampler sampler(n, 0.995, mix_seed(seed, 11));
    for (int i = 0; i < wgrid; ++i) hyp.wgrid.push_back(sampler.next());
  }
  hyp.zw.resize(wgrid, BallPoint::origin(n));
  hyp.tanh_beta_pow.resize(wgrid);
  hyp.tau.resize(wgrid);

  parallel_for(static_cast<std::size_t>(wgrid), [&](std::size_t i) {
    const BallPoint& w = hyp.wgrid[i];
    auto objective = [&](const std::vector<double>& x) {
      CVec z(n);
      for (int k = 0; k < n; ++k) z[k] = {x[2 * k], x[2 * k + 1]};
      if (!(vec_norm(z) < 1.0 - kBallMargin))
        return std::numeric_limits<double>::infinity();
      try {
        const CVec img = phi.eval(z);
        if (!(vec_norm(img) < 1.0 - kBallMargin))
          return std::numeric_limits<double>::infinity();
        return geom::pseudo_hyperbolic(BallPoint(img), w);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    auto encode = [&](const CVec& z) {
      std::vector<double> x(2 * n);
      for (int k = 0; k < n; ++k) {
        x[2 * k] = z[k].real();
        x[2 * k + 1] = z[k].imag();
      }
      return x;
    };

    std::vector<CVec> starts = {w.coords()};
    if (phi.kind() == holo::MapKind::automorphism)
      starts.push_back(phi.eval(w.coords()));  // involutive pullback
    {
      Rng rng = Rng(seed).substream(100 + i);
      starts.push_back(random_ball_point(rng, n, 0.0, 0.9).coords());
    }

    NelderMeadOptions nm;
    nm.max_evals = zsearch_evals;
    nm.xtol = 1e-12;
    nm.initial_step = 0.05;

    CVec best_z = starts[0];
    double best = objective(encode(starts[0]));
    for (const CVec& s : starts) {
      const double direct = objective(encode(s));
      if (direct < best) {
        best = direct;
        best_z = s;
      }
      const auto res = nelder_mead_min(objective, encode(s), nm);
      if (res.value < best) {
        best = res.value;
        CVec z(n);
        for (int k = 0; k < n; ++k) z[k] = {res.x[2 * k], res.x[2 * k + 1]};
        best_z = z;
      }
    }
    hyp.zw[i] = BallPoint(best_z);
    hyp.tanh_beta_pow[i] = std::pow(best, 1.0 / n);
    hyp.tau[i] = tau_of(phi, hyp.zw[i]);
  });

  hyp.r_empirical = 0.0;
  hyp.eps_empirical = std::numeric_limits<double>::infinity();
  for (int i = 0; i < wgrid; ++i) {
    if (hyp.tanh_beta_pow[i] >= hyp.r_empirical) {
      hyp.r_empirical = hyp.tanh_beta_pow[i];
      hyp.worst_r_index = i;
    }
    if (hyp.tau[i] <= hyp.eps_empirical) {
      hyp.eps_empirical = hyp.tau[i];
      hyp.worst_tau_index = i;
    }
  }
  hyp.satisfied = hyp.r_empirical < theorem3_r_cap(n);
  return hyp;
}

VerificationReport check_theorem3(const HoloMap& phi, double r, double eps,
                                  const std::vector<HoloMap>& battery,
                                  std::uint64_t seed,
                                  const CampaignOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = phi.dim();
  const double k = k_constant(n, r, eps);  // validates r as well
  validate_normalized(battery, n, 1.0, seed, opt);

  VerificationReport rep;
  rep.theorem = "thm3";
  rep.params = {{"n", static_cast<double>(n)},
                {"r", r},
                {"eps", eps},
                {"k", k},
                {"maps", static_cast<double>(battery.size())},
                {"wgrid", static_cast<double>(opt.wgrid)}};
  rep.seed = seed;

  const auto hyp = hypothesis_scan(phi, opt.wgrid, opt.zsearch_evals,
                                   mix_seed(seed, 5));
  {
    std::ostringstream os;
    os << "hypothesis scan: empirical r = " << hyp.r_empirical
       << ", empirical eps = " << hyp.eps_empirical;
    rep.notes.push_back(os.str());
  }
  if (!(hyp.r_empirical < r && hyp.eps_empirical > eps)) {
    rep.applicable = false;
    rep.notes.push_back("hypothesis (r, eps) not certified on the scan grid");
    rep.pass = true;  // no violations; the check simply does not apply
    rep.runtime_seconds = now_seconds(t0);
    return rep;
  }

  double min_ratio = std::numeric_limits<double>::infinity();
  double max_invariance_gap = 0.0;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto pn_f = bloch::prenorm(battery[i], {n, 1.0}, opt.prenorm_budget,
                                     mix_seed(seed, 800 + i));
    const HoloMap cf = holo::compose(battery[i], phi, /*range_samples=*/0);
    const auto pn_cf = bloch::prenorm(cf, {n, 1.0}, opt.prenorm_budget,
                                      mix_seed(seed, 900 + i));
    const double ratio = pn_cf.value / pn_f.value;
    if (ratio < min_ratio) {
      min_ratio = ratio;
      rep.stats.map_index = static_cast<int>(i);
      rep.stats.points = {pn_cf.arg.coords()};
    }
    const double slack = k * 2.0 * opt.sup_tol + opt.assert_tol;
    if (pn_cf.value < opt.bound_scale * k * pn_f.value - slack)
      rep.violations.push_back({"composition operator lower bound",
                                static_cast<int>(i),
                                {pn_cf.arg.coords()},
                                pn_cf.value,
                                k * pn_f.value,
                                k * pn_f.value - pn_cf.value});
    if (phi.kind() == holo::MapKind::automorphism)
      max_invariance_gap =
          std::max(max_invariance_gap, std::abs(pn_cf.value - pn_f.value));
    if (opt.collect_rows)
      rep.rows.push_back(
          {static_cast<int>(i), {pn_f.value, pn_cf.value, k, ratio}});
  }
  if (phi.kind() == holo::MapKind::automorphism) {
    std::ostringstream os;
    os << "automorphism prenorm invariance gap: " << max_invariance_gap;
    rep.notes.push_back(os.str());
  }

  rep.stats.max_ratio = min_ratio;  // worst observed ||C_phi f|| / ||f||
  rep.stats.bound = k;
  rep.stats.margin = min_ratio - k;
  sort_violations(rep.violations);
  rep.pass = rep.violations.empty();
  if (opt.collect_rows)
    rep.row_columns = {"map", "prenorm_f", "prenorm_cf", "k", "ratio"};
  rep.runtime_seconds = now_seconds(t0);
  return rep;
}

HoloMap normalized(const HoloMap& f, const bloch::BlochParams& p,
                   const bloch::PrenormBudget& budget, std::uint64_t seed,
                   double* factor) {
  const auto est = bloch::prenorm(f, p, budget, seed);
  if (!(est.value > 0.0))
    throw std::invalid_argument("normalized: map has vanishing prenorm");
  if (factor) *factor = est.value;
  return holo::scaled(f, cplx(1.0 / est.value));
}

std::vector<HoloMap> random_battery(int count, int degree, int n,
                                    std::uint64_t seed,
                                    const bloch::PrenormBudget& budget,
                                    std::vector<double>* factors) {
  if (count < 1) throw std::invalid_argument("random_battery: count >= 1");
  std::vector<HoloMap> out;
  out.reserve(count);
  if (factors) factors->clear();
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, 40 + i));
    const HoloMap f = holo::random_polynomial(n, degree, rng);
    double factor = 1.0;
    out.push_back(normalized(f, {n, 1.0}, budget, mix_seed(seed, 5000 + i),
                             &factor));
    if (factors) factors->push_back(factor);
  }
  return out;
}

double inequality_subcase_margin(int n, int grid) {
  const int g = std::max(2, static_cast<int>(std::sqrt(grid)));
  const double top = bloch::a0(1.0, n);
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= g; ++i) {
    const double m = top * i / g;
    if (m == 0.0) continue;
    for (int j = 0; j <= g; ++j) {
      const double w = m * j / g;
      const double lhs =
          std::pow(m, 1.0 / n) -
          std::pow(1.0 - w * w, (n + 1.0) / (2.0 * n)) *
              std::pow(m - w, 1.0 / n) /
              std::pow(1.0 - m * w, (n + 2.0) / n);
      min_margin = std::min(min_margin, std::pow(w, 1.0 / n) - lhs);
    }
  }
  return min_margin;
}

double validity_radius_margin(int n, int grid) {
  const double top = bloch::a0(1.0, n);
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double m = top * i / grid;
    min_margin = std::min(min_margin, (top + m) / (1.0 + top * m) - m);
  }
  return min_margin;
}

}  // namespace blochball::verify
