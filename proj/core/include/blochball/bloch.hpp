#pragma once

#include <cstdint>
#include <optional>

#include "blochball/complexvec.hpp"
#include "blochball/holo.hpp"

namespace blochball::bloch {

struct BlochParams {
  int n = 1;
  double alpha = 1.0;
};
void validate(const BlochParams& p);

// D_f(z) = (1-|z|^2)^(alpha(n+1)/(2n)) |det f'(z)|^(1/n); exactly zero at
// critical points of det f'.
double density(const holo::HoloMap& f, const BallPoint& z,
               const BlochParams& p);

struct PrenormBudget {
  int samples = 4096;
  int refine_starts = 10;
  int refine_max_evals = 800;
  double refine_xtol = 1e-9;
};

// Lower certificate of sup_z D_f(z) with the achieving point.
struct PrenormEstimate {
  double value;
  BallPoint arg;
  int samples;
  std::uint64_t seed;
  int refine_evals;
  bool converged;
};

PrenormEstimate prenorm(const holo::HoloMap& f, const BlochParams& p,
                        const PrenormBudget& budget, std::uint64_t seed);

// M(n) = (2+n)^(1/(2n)) ((n+2)/(n+1))^((n+1)/(2n)); M(1) = 3 sqrt(3) / 2.
double constant_M(int n);

// a0(alpha) = 1 / sqrt(alpha(1+n) + 1).
double a0(double alpha, int n);

struct LemmaCProfile {
  double alpha = 1.0;
  int n = 1;
  double a0() const;
  double operator()(double x) const;
};

// phi(x) = x (1-x^2)^(alpha(n+1)/2) sqrt(alpha(1+n)+1)
//          [(alpha(n+1)+1)/(alpha(n+1))]^(alpha(n+1)/2);
// increasing on [0, a0], decreasing on [a0, 1], phi(a0) = 1.
double lemma_c_profile(double x, const LemmaCProfile& p);

// Unique root of phi(x) = lambda in [0, a0]; monotone bisection.
double m_root(double lambda, const LemmaCProfile& p);

// Inverse of m_root on the alpha = 1 branch; equals the Lemma-C profile at
// alpha = 1 and round-trips with m_root.
double lambda_of_m(double m, int n);

struct DistortionBounds {
  std::optional<double> lower;  // engaged iff r <= r_low
  std::optional<double> upper;  // engaged iff r <= r_high
  double r_low;
  double r_high;
  double m;
  double lambda;
};

// Two-sided |det f'| bounds for unit-prenorm maps with det f'(0) = lambda:
//   lower(r) = lambda (m-r) / (m (1-mr)^(alpha(n+1)+1)),  r <= (a0+m)/(1+a0 m)
//   upper(r) = lambda (m+r) / (m (1+mr)^(alpha(n+1)+1)),  r <= (a0-m)/(1-a0 m)
DistortionBounds theoremD_bounds(double lambda, double r,
                                 const LemmaCProfile& p);

}  // namespace blochball::bloch
