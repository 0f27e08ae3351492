#include "monoflow/linalg.hpp"

#include <Eigen/QR>

#include "monoflow/errors.hpp"

namespace monoflow {

Mat orthonormal_basis(const Mat& A, double tol) {
  if (A.cols() == 0) return Mat(A.rows(), 0);
  Eigen::ColPivHouseholderQR<Mat> qr(A);
  qr.setThreshold(tol);
  long rank = qr.rank();
  Mat Q = qr.householderQ() * Mat::Identity(A.rows(), rank);
  return Q;
}

Mat orthonormal_complement(const Mat& B, int n, double tol) {
  if (B.cols() == 0) return Mat::Identity(n, n);
  Eigen::ColPivHouseholderQR<Mat> qr(B);
  qr.setThreshold(tol);
  long rank = qr.rank();
  Mat Qfull = qr.householderQ() * Mat::Identity(n, n);
  return Qfull.rightCols(n - rank);
}

Vec solve_tridiag(const Vec& lower, const Vec& diag, const Vec& upper, Vec rhs) {
  long n = diag.size();
  if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
    throw ConfigError("solve_tridiag: inconsistent band sizes");
  Vec c(n - 1), d = diag;
  // forward sweep
  for (long i = 0; i < n - 1; ++i) {
    c[i] = upper[i] / d[i];
    rhs[i] /= d[i];
    d[i + 1] -= lower[i] * c[i];
    rhs[i + 1] -= lower[i] * rhs[i];
  }
  rhs[n - 1] /= d[n - 1];
  for (long i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace monoflow
