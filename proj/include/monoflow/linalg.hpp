#pragma once

#include "monoflow/types.hpp"

namespace monoflow {

// Orthonormal basis of the column space of A (n x rank result; rank may be 0).
Mat orthonormal_basis(const Mat& A, double tol = 1e-10);

// Orthonormal basis of the orthogonal complement of span(B) in R^n,
// where B has n rows (and orthonormal or general columns).
Mat orthonormal_complement(const Mat& B, int n, double tol = 1e-10);

// Thomas algorithm for a tridiagonal system; diag has n entries, lower/upper
// have n-1.  No pivoting: intended for (strictly) diagonally dominant or SPD
// systems such as I + lambda*K.
Vec solve_tridiag(const Vec& lower, const Vec& diag, const Vec& upper, Vec rhs);

}  // namespace monoflow
