#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace blochball {

using cplx = std::complex<double>;

// Unconstrained point of C^n; image points of holomorphic maps live here.
using CVec = std::vector<cplx>;

// Hermitian inner product <z,w> = sum_k z_k * conj(w_k).
inline cplx herm_inner(const CVec& z, const CVec& w) {
  if (z.size() != w.size())
    throw std::invalid_argument("herm_inner: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += z[k] * std::conj(w[k]);
  return s;
}

inline double norm_sq(const CVec& z) {
  double s = 0.0;
  for (const cplx& c : z) s += std::norm(c);
  return s;
}

inline double vec_norm(const CVec& z) { return std::sqrt(norm_sq(z)); }

inline CVec operator+(const CVec& a, const CVec& b) {
  CVec r(a);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

inline CVec operator-(const CVec& a, const CVec& b) {
  CVec r(a);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

inline CVec operator*(cplx c, const CVec& a) {
  CVec r(a);
  for (cplx& x : r) x *= c;
  return r;
}

// Interior margin used by the metric routines: artanh and the length
// integrand are kept finite by rejecting points with |z| > 1 - kBallMargin.
inline constexpr double kBallMargin = 1e-12;

// Point of the open unit ball of C^n with its norm cached.
class BallPoint {
 public:
  explicit BallPoint(CVec coords) : coords_(std::move(coords)) {
    if (coords_.empty())
      throw std::invalid_argument("BallPoint: dimension must be >= 1");
    norm_ = vec_norm(coords_);
    if (!(norm_ < 1.0))
      throw std::domain_error("BallPoint: |z| >= 1, not in the open ball");
  }
  BallPoint(std::initializer_list<cplx> coords) : BallPoint(CVec(coords)) {}

  static BallPoint origin(int n) { return BallPoint(CVec(n, cplx(0.0))); }

  const CVec& coords() const { return coords_; }
  double norm() const { return norm_; }
  double norm_sq() const { return norm_ * norm_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const cplx& operator[](std::size_t k) const { return coords_[k]; }

  bool same_coords(const BallPoint& o) const { return coords_ == o.coords_; }

 private:
  CVec coords_;
  double norm_;
};

// Guard for routines that blow up at the boundary.
inline void require_interior(const BallPoint& z) {
  if (z.norm() > 1.0 - kBallMargin)
    throw std::domain_error("point too close to the unit sphere");
}

}  // namespace blochball
