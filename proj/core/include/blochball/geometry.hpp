#pragma once

#include <functional>
#include <vector>

#include "blochball/complexvec.hpp"
#include "blochball/matrix.hpp"
#include "blochball/quadrature.hpp"

namespace blochball::geom {

// B(z) = ((1-|z|^2) I + z z*) / (1-|z|^2)^2, Hermitian positive definite.
ComplexMatrix bergman_matrix(const BallPoint& z);

// <B(z)v, v> without forming the matrix:
// ((1-|z|^2)|v|^2 + |<v,z>|^2) / (1-|z|^2)^2.
double metric_form(const CVec& z, const CVec& v);
double metric_speed(const CVec& z, const CVec& v);

// Involutive automorphism of the ball exchanging 0 and the anchor a:
//   phi_a(z) = (a - P z - s Q z) / (1 - <z,a>),
// with P the projection onto span(a), Q = I - P, s = sqrt(1-|a|^2);
// phi_0 = -identity.
class Mobius {
 public:
  explicit Mobius(BallPoint anchor);

  const BallPoint& anchor() const { return a_; }
  int dim() const { return a_.dim(); }

  CVec apply(const CVec& z) const { return apply_generic<cplx>(z); }
  BallPoint apply(const BallPoint& z) const;

  ComplexMatrix jacobian(const CVec& z) const;
  // J(z) u in O(n), used by geodesic curves.
  CVec jacobian_apply(const CVec& z, const CVec& u) const;
  // (-1)^n (1-|a|^2)^((n+1)/2) / (1 - <z,a>)^(n+1), exact.
  cplx jacobian_det(const CVec& z) const;

  // The formula is a rational expression in z against the constants a, s;
  // scalar-generic so a dual pass can differentiate the evaluation tree.
  template <class S>
  std::vector<S> apply_generic(const std::vector<S>& z) const {
    const CVec& a = a_.coords();
    const std::size_t n = a.size();
    if (z.size() != n) throw std::invalid_argument("Mobius: dimension mismatch");
    S inner = S(0.0);  // <z,a>
    for (std::size_t k = 0; k < n; ++k) inner = inner + z[k] * std::conj(a[k]);
    std::vector<S> out(n);
    if (a_.norm_sq() == 0.0) {
      for (std::size_t k = 0; k < n; ++k) out[k] = cplx(-1.0) * z[k];
      return out;
    }
    const S proj_scale = inner * (1.0 / a_.norm_sq());  // P z = proj_scale * a
    const S denom = cplx(1.0) - inner;
    for (std::size_t k = 0; k < n; ++k) {
      const S pz = proj_scale * a[k];
      const S qz = z[k] - pz;
      out[k] = (cplx(a[k]) - pz - cplx(s_) * qz) / denom;
    }
    return out;
  }

 private:
  BallPoint a_;
  double s_;  // sqrt(1-|a|^2)
};

// |det phi_a'(z)| through the distortion identity
// ((1-|phi_a(z)|^2)/(1-|z|^2))^((n+1)/2).
double mobius_jacobian_det_modulus(const BallPoint& a, const BallPoint& z);

// rho(z,w) = |phi_z(w)|; symmetric, zero iff z == w.
double pseudo_hyperbolic(const BallPoint& z, const BallPoint& w);

// beta(z,w) = artanh(rho(z,w)).
double bergman_distance(const BallPoint& z, const BallPoint& w);

// Parametrized piecewise-smooth path in the ball, t in [0,1].
struct Curve {
  std::function<CVec(double)> eval;
  std::function<CVec(double)> deriv;     // d/dt per unit parameter
  std::vector<double> breakpoints;       // interior smoothness breaks
};

Curve constant_curve(const BallPoint& z);
Curve segment_curve(const BallPoint& z, const BallPoint& w);
// Mobius image of the radius 0 -> phi_z(w): the geodesic from z to w.
Curve pulled_radius_curve(const BallPoint& z, const BallPoint& w);
// Catmull-Rom spline through pts (first/last are the endpoints).
Curve spline_curve(const std::vector<CVec>& pts);

// max relative gap between deriv and a central difference of eval over
// interior smooth samples; test helper for the Curve contract.
double curve_derivative_defect(const Curve& c, int samples);

// ell(gamma) = int_0^1 <B(gamma)gamma', gamma'>^(1/2) dt. Splits at the
// breakpoints; domain error if the curve leaves the interior margin.
double curve_length(const Curve& c, const QuadratureSpec& q);

struct CurveFamily {
  int control_points = 8;  // interior spline control points
};

struct OptimizerBudget {
  int max_evals = 1500;  // per start
  double xtol = 1e-6;
};

struct GeodesicResult {
  double length;
  bool converged;
  int evals;
};

// Minimized curve_length over the spline family with endpoints pinned;
// multi-start from the straight chord and the pulled radius.
GeodesicResult geodesic_infimum(const BallPoint& z, const BallPoint& w,
                                const CurveFamily& family,
                                const OptimizerBudget& budget,
                                const QuadratureSpec& q);

}  // namespace blochball::geom
