#include "blochball/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blochball {

NelderMeadResult nelder_mead_min(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const NelderMeadOptions& opt) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead_min: empty start");

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  std::vector<double> fx(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= dim; ++i) fx[i] = eval(simplex[i]);

  auto order = [&]() {
    std::vector<std::size_t> idx(dim + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> s2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = fx[idx[i]];
    }
    simplex.swap(s2);
    fx.swap(f2);
  };

  bool converged = false;
  while (evals < opt.max_evals) {
    order();
    // diameter of the simplex
    double diam = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k)
        diam = std::max(diam, std::abs(simplex[i][k] - simplex[0][k]));
    if (diam <= opt.xtol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / dim;

    auto blend = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t k = 0; k < dim; ++k)
        x[k] = centroid[k] + t * (simplex[dim][k] - centroid[k]);
      return x;
    };

    const auto xr = blend(-1.0);
    const double fr = eval(xr);
    if (fr < fx[0]) {
      const auto xe = blend(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[dim] = xe;
        fx[dim] = fe;
      } else {
        simplex[dim] = xr;
        fx[dim] = fr;
      }
      continue;
    }
    if (fr < fx[dim - 1]) {
      simplex[dim] = xr;
      fx[dim] = fr;
      continue;
    }
    const bool outside = fr < fx[dim];
    const auto xc = blend(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fx[dim])) {
      simplex[dim] = xc;
      fx[dim] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k)
        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
      fx[i] = eval(simplex[i]);
      if (evals >= opt.max_evals) break;
    }
  }
  order();
  return {simplex[0], fx[0], evals, converged};
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  const double inv_phi = 0.6180339887498948482;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bisect_increasing(const std::function<double(double)>& g, double target,
                         double lo, double hi, double xtol,
                         double residual_tol) {
  if (!(hi > lo)) throw std::invalid_argument("bisect_increasing: bad bracket");
  const double glo = g(lo);
  const double ghi = g(hi);
  if (target <= glo) return lo;
  if (target >= ghi) return hi;
  double a = lo, b = hi;
  while (b - a > xtol) {
    const double mid = 0.5 * (a + b);
    const double gm = g(mid);
    if (std::abs(gm - target) <= residual_tol) return mid;
    if (gm < target)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace blochball
