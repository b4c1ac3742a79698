#include "blochball/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blochball/optim.hpp"
#include "blochball/parallel.hpp"

namespace blochball::bloch {

void validate(const BlochParams& p) {
  if (p.n < 1) throw std::invalid_argument("BlochParams: n >= 1");
  if (!(p.alpha > 0.0)) throw std::invalid_argument("BlochParams: alpha > 0");
}

double density(const holo::HoloMap& f, const BallPoint& z,
               const BlochParams& p) {
  validate(p);
  if (f.dim() != p.n || z.dim() != p.n)
    throw std::invalid_argument("density: dimension mismatch");
  const cplx det = f.jacobian_det(z);
  const double mod = std::abs(det);
  if (mod == 0.0) return 0.0;
  const double weight =
      std::pow(1.0 - z.norm_sq(), p.alpha * (p.n + 1) / (2.0 * p.n));
  return weight * std::pow(mod, 1.0 / p.n);
}

namespace {

double density_or_zero(const holo::HoloMap& f, const CVec& z,
                       const BlochParams& p) {
  if (!(vec_norm(z) < 1.0 - kBallMargin)) return 0.0;
  try {
    return density(f, BallPoint(z), p);
  } catch (const std::exception&) {
    return 0.0;
  }
}

}  // namespace

PrenormEstimate prenorm(const holo::HoloMap& f, const BlochParams& p,
                        const PrenormBudget& budget, std::uint64_t seed) {
  validate(p);
  if (budget.samples < 1 || budget.refine_starts < 0)
    throw std::invalid_argument("prenorm: budget must be positive");
  const int n = p.n;
  // higher dimensions need denser coverage to seed the refinement basins
  const int samples = budget.samples * (n >= 3 ? 3 : n);

  // Sample pool: quasi-random ball points plus the deterministic radial
  // grid along the coordinate axes (extremals concentrate on radii).
  std::vector<BallPoint> pool;
  pool.reserve(samples + 1);
  {
    const int per_axis = std::max(8, samples / (8 * n) / 4);
    auto grid = radial_axis_grid(n, per_axis, 1.0 - 1e-6);
    pool.insert(pool.end(), grid.begin(), grid.end());
    BallSampler sampler(n, 1.0 - 1e-6, mix_seed(seed, 1));
    while (static_cast<int>(pool.size()) < samples)
      pool.push_back(sampler.next());
  }

  std::vector<double> vals(pool.size());
  parallel_for(pool.size(),
               [&](std::size_t i) { vals[i] = density(f, pool[i], p); });

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });

  double best = vals[order[0]];
  CVec best_arg = pool[order[0]].coords();
  int refine_evals = 0;
  bool converged = budget.refine_starts == 0;

  NelderMeadOptions nm;
  nm.max_evals = budget.refine_max_evals;
  nm.xtol = budget.refine_xtol;
  nm.initial_step = 0.05;

  auto negdensity = [&](const std::vector<double>& x) {
    CVec z(n);
    for (int k = 0; k < n; ++k) z[k] = {x[2 * k], x[2 * k + 1]};
    const double d = density_or_zero(f, z, p);
    return -d;
  };
  auto encode = [&](const CVec& z) {
    std::vector<double> x(2 * n);
    for (int k = 0; k < n; ++k) {
      x[2 * k] = z[k].real();
      x[2 * k + 1] = z[k].imag();
    }
    return x;
  };

  // refinement starts: best pool points, deduplicated so distinct basins
  // each get a run
  std::vector<CVec> starts;
  for (std::size_t idx : order) {
    if (static_cast<int>(starts.size()) >= budget.refine_starts) break;
    const CVec& cand = pool[idx].coords();
    bool fresh = true;
    for (const CVec& s : starts)
      if (vec_norm(cand - s) < 0.15) fresh = false;
    if (fresh) starts.push_back(cand);
  }

  for (const CVec& z0 : starts) {
    const auto res = nelder_mead_min(negdensity, encode(z0), nm);
    refine_evals += res.evals;
    if (res.converged) converged = true;
    if (-res.value > best) {
      best = -res.value;
      CVec z(n);
      for (int k = 0; k < n; ++k) z[k] = {res.x[2 * k], res.x[2 * k + 1]};
      best_arg = z;
    }
  }

  // one tight polish from the winner
  if (budget.refine_starts > 0) {
    NelderMeadOptions polish = nm;
    polish.initial_step = 0.005;
    const auto res = nelder_mead_min(negdensity, encode(best_arg), polish);
    refine_evals += res.evals;
    if (-res.value > best) {
      best = -res.value;
      CVec z(n);
      for (int k = 0; k < n; ++k) z[k] = {res.x[2 * k], res.x[2 * k + 1]};
      best_arg = z;
    }
  }

  // Re-evaluate through the public path so the estimate replays exactly.
  BallPoint arg(best_arg);
  const double value = density(f, arg, p);
  return {value, arg, static_cast<int>(pool.size()), seed, refine_evals,
          converged};
}

double constant_M(int n) {
  if (n < 1) throw std::invalid_argument("constant_M: n >= 1");
  return std::pow(2.0 + n, 1.0 / (2.0 * n)) *
         std::pow((n + 2.0) / (n + 1.0), (n + 1.0) / (2.0 * n));
}

double a0(double alpha, int n) {
  if (!(alpha > 0.0)) throw std::invalid_argument("a0: alpha > 0");
  if (n < 1) throw std::invalid_argument("a0: n >= 1");
  return 1.0 / std::sqrt(alpha * (1.0 + n) + 1.0);
}

double LemmaCProfile::a0() const { return bloch::a0(alpha, n); }

double LemmaCProfile::operator()(double x) const {
  return lemma_c_profile(x, *this);
}

double lemma_c_profile(double x, const LemmaCProfile& p) {
  if (!(p.alpha > 0.0) || p.n < 1)
    throw std::invalid_argument("lemma_c_profile: bad parameters");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("lemma_c_profile: x must lie in [0,1]");
  const double an = p.alpha * (p.n + 1);
  return x * std::pow(1.0 - x * x, 0.5 * an) * std::sqrt(an + 1.0) *
         std::pow((an + 1.0) / an, 0.5 * an);
}

double m_root(double lambda, const LemmaCProfile& p) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("m_root: lambda must lie in (0,1]");
  const double hi = p.a0();
  // increasing branch of the profile; bisection needs no derivative
  return bisect_increasing([&](double x) { return lemma_c_profile(x, p); },
                           lambda, 0.0, hi, 1e-14, 1e-13);
}

double lambda_of_m(double m, int n) {
  const double branch_top = a0(1.0, n);
  if (!(m > 0.0 && m <= branch_top + 1e-15))
    throw std::invalid_argument("lambda_of_m: m off the monotone branch");
  return holo::extremal_lambda(std::min(m, branch_top), n);
}

DistortionBounds theoremD_bounds(double lambda, double r,
                                 const LemmaCProfile& p) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("theoremD_bounds: lambda must lie in (0,1]");
  if (!(r >= 0.0 && r < 1.0))
    throw std::invalid_argument("theoremD_bounds: r must lie in [0,1)");
  const double a = p.a0();
  const double m = m_root(lambda, p);
  DistortionBounds out;
  out.m = m;
  out.lambda = lambda;
  out.r_low = (a + m) / (1.0 + a * m);
  out.r_high = (a - m) / (1.0 - a * m);
  const double expo = p.alpha * (p.n + 1) + 1.0;
  if (r <= out.r_low)
    out.lower = lambda * (m - r) / (m * std::pow(1.0 - m * r, expo));
  if (r <= out.r_high)
    out.upper = lambda * (m + r) / (m * std::pow(1.0 + m * r, expo));
  return out;
}

}  // namespace blochball::bloch
