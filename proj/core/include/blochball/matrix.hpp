#pragma once

#include "blochball/complexvec.hpp"

namespace blochball {

// Dense square complex matrix, row-major. Dimensions here are the ambient
// complex dimension n (small), so direct O(n^3) algorithms are used
// throughout.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {
    if (n < 1) throw std::invalid_argument("ComplexMatrix: n must be >= 1");
  }

  static ComplexMatrix identity(int n) {
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int dim() const { return n_; }

  cplx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  CVec apply(const CVec& v) const;
  ComplexMatrix mul(const ComplexMatrix& rhs) const;

  // LU with partial pivoting.
  cplx determinant() const;

  double max_abs() const;
  // max_ij |a_ij - conj(a_ji)|
  double hermitian_defect() const;
  // Cholesky attempt on the matrix treated as Hermitian; true iff all pivots
  // stay positive.
  bool positive_definite() const;

 private:
  int n_;
  CVec a_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace blochball
