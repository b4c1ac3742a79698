#include "blochball/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace blochball {

CVec ComplexMatrix::apply(const CVec& v) const {
  if (static_cast<int>(v.size()) != n_)
    throw std::invalid_argument("ComplexMatrix::apply: dimension mismatch");
  CVec out(n_, cplx(0.0));
  for (int i = 0; i < n_; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < n_; ++j) s += at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

ComplexMatrix ComplexMatrix::mul(const ComplexMatrix& rhs) const {
  if (rhs.n_ != n_)
    throw std::invalid_argument("ComplexMatrix::mul: dimension mismatch");
  ComplexMatrix out(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const cplx aik = at(i, k);
      if (aik == cplx(0.0)) continue;
      for (int j = 0; j < n_; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

cplx ComplexMatrix::determinant() const {
  ComplexMatrix lu(*this);
  cplx det = 1.0;
  for (int col = 0; col < n_; ++col) {
    int pivot = col;
    double best = std::abs(lu.at(col, col));
    for (int r = col + 1; r < n_; ++r) {
      double v = std::abs(lu.at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = col; j < n_; ++j) std::swap(lu.at(col, j), lu.at(pivot, j));
      det = -det;
    }
    det *= lu.at(col, col);
    const cplx inv = 1.0 / lu.at(col, col);
    for (int r = col + 1; r < n_; ++r) {
      const cplx factor = lu.at(r, col) * inv;
      if (factor == cplx(0.0)) continue;
      for (int j = col; j < n_; ++j) lu.at(r, j) -= factor * lu.at(col, j);
    }
  }
  return det;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& c : a_) m = std::max(m, std::abs(c));
  return m;
}

double ComplexMatrix::hermitian_defect() const {
  double d = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      d = std::max(d, std::abs(at(i, j) - std::conj(at(j, i))));
  return d;
}

bool ComplexMatrix::positive_definite() const {
  // In-place complex Cholesky; fails on a nonpositive pivot.
  ComplexMatrix l(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j <= i; ++j) {
      cplx s = at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * std::conj(l.at(j, k));
      if (i == j) {
        if (s.real() <= 0.0 || std::abs(s.imag()) > 1e-12 * std::abs(s.real()) + 1e-300)
          return false;
        l.at(i, i) = std::sqrt(s.real());
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return true;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      d = std::max(d, std::abs(a.at(i, j) - b.at(i, j)));
  return d;
}

}  // namespace blochball
