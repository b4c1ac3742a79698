#pragma once

#include <functional>
#include <vector>

namespace blochball {

struct NelderMeadOptions {
  int max_evals = 2000;
  double xtol = 1e-10;        // simplex diameter
  double initial_step = 0.1;  // first simplex edge length
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int evals;
  bool converged;
};

// Derivative-free minimization; infeasible points may return +inf.
NelderMeadResult nelder_mead_min(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const NelderMeadOptions& opt);

// Golden-section minimization of a unimodal function on [a,b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol);

// Bisection for an increasing g on [lo,hi]: returns m with bracket width
// <= xtol or |g(m)-target| <= residual_tol. The target is clamped to the
// bracket values, so flat ends behave.
double bisect_increasing(const std::function<double(double)>& g, double target,
                         double lo, double hi, double xtol,
                         double residual_tol);

}  // namespace blochball
