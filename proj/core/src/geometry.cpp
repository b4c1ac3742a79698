#include "blochball/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blochball/optim.hpp"

namespace blochball::geom {

ComplexMatrix bergman_matrix(const BallPoint& z) {
  require_interior(z);
  const int n = z.dim();
  const double one_minus = 1.0 - z.norm_sq();
  const double denom = one_minus * one_minus;
  ComplexMatrix b(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cplx v = z[j] * std::conj(z[k]);
      if (j == k) v += one_minus;
      b.at(j, k) = v / denom;
    }
  }
  return b;
}

double metric_form(const CVec& z, const CVec& v) {
  if (z.size() != v.size())
    throw std::invalid_argument("metric_form: dimension mismatch");
  const double zz = norm_sq(z);
  const double one_minus = 1.0 - zz;
  const double vz = std::norm(herm_inner(v, z));
  return (one_minus * norm_sq(v) + vz) / (one_minus * one_minus);
}

double metric_speed(const CVec& z, const CVec& v) {
  return std::sqrt(metric_form(z, v));
}

Mobius::Mobius(BallPoint anchor)
    : a_(std::move(anchor)), s_(std::sqrt(1.0 - a_.norm_sq())) {}

BallPoint Mobius::apply(const BallPoint& z) const {
  return BallPoint(apply(z.coords()));
}

ComplexMatrix Mobius::jacobian(const CVec& z) const {
  const CVec& a = a_.coords();
  const int n = dim();
  if (static_cast<int>(z.size()) != n)
    throw std::invalid_argument("Mobius::jacobian: dimension mismatch");
  const cplx d = cplx(1.0) - herm_inner(z, a);
  const CVec img = apply(z);
  ComplexMatrix jac(n);
  const double na2 = a_.norm_sq();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // M = P + s Q with P = a a*/|a|^2; phi = (a - M z)/d, so
      // J = (phi(z) a* - M) / d.
      cplx m_ij = 0.0;
      if (na2 > 0.0) {
        const cplx p_ij = a[i] * std::conj(a[j]) / na2;
        m_ij = p_ij + s_ * ((i == j ? cplx(1.0) : cplx(0.0)) - p_ij);
      } else {
        m_ij = (i == j) ? cplx(1.0) : cplx(0.0);
      }
      jac.at(i, j) = (img[i] * std::conj(a[j]) - m_ij) / d;
    }
  }
  return jac;
}

CVec Mobius::jacobian_apply(const CVec& z, const CVec& u) const {
  const CVec& a = a_.coords();
  const int n = dim();
  if (static_cast<int>(z.size()) != n || static_cast<int>(u.size()) != n)
    throw std::invalid_argument("Mobius::jacobian_apply: dimension mismatch");
  const cplx d = cplx(1.0) - herm_inner(z, a);
  const CVec img = apply(z);
  const cplx ua = herm_inner(u, a);
  const double na2 = a_.norm_sq();
  CVec out(n);
  for (int i = 0; i < n; ++i) {
    cplx mu;
    if (na2 > 0.0) {
      const cplx pu = ua / na2 * a[i];
      mu = pu + s_ * (u[i] - pu);
    } else {
      mu = u[i];
    }
    out[i] = (img[i] * ua - mu) / d;
  }
  return out;
}

cplx Mobius::jacobian_det(const CVec& z) const {
  const int n = dim();
  const cplx d = cplx(1.0) - herm_inner(z, a_.coords());
  cplx dpow = 1.0;
  for (int k = 0; k <= n; ++k) dpow *= d;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(s_, n + 1) / dpow;
}

double mobius_jacobian_det_modulus(const BallPoint& a, const BallPoint& z) {
  require_interior(a);
  require_interior(z);
  const Mobius phi(a);
  const double img_nsq = norm_sq(phi.apply(z.coords()));
  const double ratio = (1.0 - img_nsq) / (1.0 - z.norm_sq());
  return std::pow(ratio, 0.5 * (z.dim() + 1));
}

double pseudo_hyperbolic(const BallPoint& z, const BallPoint& w) {
  if (z.dim() != w.dim())
    throw std::invalid_argument("pseudo_hyperbolic: dimension mismatch");
  require_interior(z);
  require_interior(w);
  if (z.same_coords(w)) return 0.0;
  const Mobius phi(z);
  return vec_norm(phi.apply(w.coords()));
}

double bergman_distance(const BallPoint& z, const BallPoint& w) {
  return std::atanh(pseudo_hyperbolic(z, w));
}

Curve constant_curve(const BallPoint& z) {
  const CVec c = z.coords();
  const CVec zero(c.size(), cplx(0.0));
  return {[c](double) { return c; }, [zero](double) { return zero; }, {}};
}

Curve segment_curve(const BallPoint& z, const BallPoint& w) {
  const CVec a = z.coords();
  const CVec d = w.coords() - z.coords();
  return {[a, d](double t) { return a + cplx(t) * d; },
          [d](double) { return d; },
          {}};
}

Curve pulled_radius_curve(const BallPoint& z, const BallPoint& w) {
  if (z.same_coords(w)) return constant_curve(z);
  const Mobius phi(z);
  const CVec u = phi.apply(w.coords());
  return {[phi, u](double t) { return phi.apply(cplx(t) * u); },
          [phi, u](double t) { return phi.jacobian_apply(cplx(t) * u, u); },
          {}};
}

namespace {

struct Spline {
  std::vector<CVec> pts;  // K+2 points including endpoints
  int segments() const { return static_cast<int>(pts.size()) - 1; }

  CVec tangent(int i) const {
    const int last = static_cast<int>(pts.size()) - 1;
    if (i == 0) return cplx(0.5) * (cplx(4.0) * pts[1] - cplx(3.0) * pts[0] - pts[2]);
    if (i == last)
      return cplx(0.5) *
             (cplx(3.0) * pts[last] - cplx(4.0) * pts[last - 1] + pts[last - 2]);
    return cplx(0.5) * (pts[i + 1] - pts[i - 1]);
  }

  // cubic Hermite on segment i, local parameter s in [0,1]
  CVec eval_local(int i, double s) const {
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    const CVec t0 = tangent(i), t1 = tangent(i + 1);
    CVec out(pts[i].size());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = h00 * pts[i][k] + h10 * t0[k] + h01 * pts[i + 1][k] + h11 * t1[k];
    return out;
  }

  CVec deriv_local(int i, double s) const {
    const double s2 = s * s;
    const double d00 = 6 * s2 - 6 * s;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = -6 * s2 + 6 * s;
    const double d11 = 3 * s2 - 2 * s;
    const CVec t0 = tangent(i), t1 = tangent(i + 1);
    CVec out(pts[i].size());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = d00 * pts[i][k] + d10 * t0[k] + d01 * pts[i + 1][k] + d11 * t1[k];
    return out;
  }
};

}  // namespace

Curve spline_curve(const std::vector<CVec>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("spline_curve: need >= 2 points");
  Spline sp{pts};
  const int segs = sp.segments();
  std::vector<double> breaks;
  for (int i = 1; i < segs; ++i) breaks.push_back(static_cast<double>(i) / segs);
  auto locate = [segs](double t) {
    int i = static_cast<int>(std::floor(t * segs));
    i = std::clamp(i, 0, segs - 1);
    return std::pair<int, double>(i, t * segs - i);
  };
  return {[sp, locate](double t) {
            auto [i, s] = locate(t);
            return sp.eval_local(i, s);
          },
          [sp, locate, segs](double t) {
            auto [i, s] = locate(t);
            CVec d = sp.deriv_local(i, s);
            for (cplx& c : d) c *= segs;  // chain rule to global parameter
            return d;
          },
          breaks};
}

double curve_derivative_defect(const Curve& c, int samples) {
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) / samples;
    bool near_break = false;
    for (double b : c.breakpoints)
      if (std::abs(t - b) < 2 * h) near_break = true;
    if (near_break || t < h || t > 1 - h) continue;
    const CVec fd = cplx(1.0 / (2 * h)) * (c.eval(t + h) - c.eval(t - h));
    const CVec an = c.deriv(t);
    const double scale = std::max(1.0, vec_norm(an));
    worst = std::max(worst, vec_norm(fd - an) / scale);
  }
  return worst;
}

double curve_length(const Curve& c, const QuadratureSpec& q) {
  validate(q);
  auto integrand = [&c](double t) {
    const CVec z = c.eval(t);
    if (vec_norm(z) > 1.0 - kBallMargin)
      throw std::domain_error("curve_length: curve leaves the interior margin");
    return metric_speed(z, c.deriv(t));
  };
  return integrate_split(integrand, 0.0, 1.0, c.breakpoints, q);
}

namespace {

std::vector<CVec> sample_curve_points(const Curve& c, int interior) {
  std::vector<CVec> pts;
  pts.reserve(interior + 2);
  for (int i = 0; i <= interior + 1; ++i)
    pts.push_back(c.eval(static_cast<double>(i) / (interior + 1)));
  return pts;
}

// samples of the geodesic equally spaced in the metric itself; uniform
// spline parameters then match arc length, which keeps the interpolation
// excess far below the optimizer tolerance
std::vector<CVec> geodesic_arc_points(const BallPoint& z, const BallPoint& w,
                                      int interior) {
  const Mobius phi(z);
  const CVec u = phi.apply(w.coords());
  const double unorm = vec_norm(u);
  const double beta = std::atanh(unorm);
  std::vector<CVec> pts;
  pts.reserve(interior + 2);
  for (int i = 0; i <= interior + 1; ++i) {
    const double s = beta * i / (interior + 1);
    const double t = std::tanh(s) / unorm;
    pts.push_back(phi.apply(cplx(t) * u));
  }
  return pts;
}

}  // namespace

GeodesicResult geodesic_infimum(const BallPoint& z, const BallPoint& w,
                                const CurveFamily& family,
                                const OptimizerBudget& budget,
                                const QuadratureSpec& q) {
  if (z.dim() != w.dim())
    throw std::invalid_argument("geodesic_infimum: dimension mismatch");
  if (family.control_points < 1)
    throw std::invalid_argument("geodesic_infimum: need >= 1 control point");
  if (z.same_coords(w)) return {0.0, true, 0};

  const int n = z.dim();
  const int k = family.control_points;
  const CVec zc = z.coords(), wc = w.coords();

  auto decode = [&](const std::vector<double>& x) {
    std::vector<CVec> pts(k + 2, CVec(n));
    pts.front() = zc;
    pts.back() = wc;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j)
        pts[i + 1][j] = {x[2 * (i * n + j)], x[2 * (i * n + j) + 1]};
    return pts;
  };
  auto encode = [&](const std::vector<CVec>& pts) {
    std::vector<double> x(2 * k * n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) {
        x[2 * (i * n + j)] = pts[i + 1][j].real();
        x[2 * (i * n + j) + 1] = pts[i + 1][j].imag();
      }
    return x;
  };

  // Coarse fixed-rule objective during the search; tight adaptive evaluation
  // afterwards.
  QuadratureSpec coarse;
  coarse.method = QuadratureSpec::Method::fixed_panels;
  coarse.max_panels = 2 * (k + 1);
  auto objective = [&](const std::vector<double>& x) {
    const auto pts = decode(x);
    for (const CVec& p : pts)
      if (vec_norm(p) > 1.0 - 1e-9)
        return std::numeric_limits<double>::infinity();
    try {
      return curve_length(spline_curve(pts), coarse);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const std::vector<std::vector<CVec>> starts = {
      sample_curve_points(segment_curve(z, w), k),
      geodesic_arc_points(z, w, k)};

  NelderMeadOptions nm;
  nm.max_evals = budget.max_evals;
  nm.xtol = budget.xtol;
  nm.initial_step = 0.02;

  double best = std::numeric_limits<double>::infinity();
  bool converged = false;
  int evals = 0;
  std::vector<double> best_x;
  for (const auto& s : starts) {
    const auto res = nelder_mead_min(objective, encode(s), nm);
    evals += res.evals;
    if (res.value < best) {
      best = res.value;
      best_x = res.x;
      converged = res.converged;
    }
  }
  if (!std::isfinite(best)) return {best, false, evals};
  const double tight = curve_length(spline_curve(decode(best_x)), q);
  return {tight, converged, evals};
}

}  // namespace blochball::geom
