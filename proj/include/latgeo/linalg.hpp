#pragma once

// Exact dense linear algebra over Scalar (rationals and number-field
// elements).  Dimensions here are tiny (ambient dimension of a lattice), so
// classical Gaussian elimination with exact division is the right tool.
// Pivot selection uses the structural zero test, which is exact for reduced
// field elements.

#include <vector>

#include "latgeo/interval.hpp"
#include "latgeo/scalar.hpp"

namespace latgeo {

using VecS = std::vector<Scalar>;
using MatS = std::vector<VecS>;

MatS mat_zero(int rows, int cols);
MatS mat_identity(int n);
int mat_rows(const MatS& a);
int mat_cols(const MatS& a);

MatS mat_add(const MatS& a, const MatS& b);
MatS mat_sub(const MatS& a, const MatS& b);
MatS mat_mul(const MatS& a, const MatS& b);
MatS mat_scale(const MatS& a, const Scalar& s);
MatS mat_transpose(const MatS& a);
VecS mat_vec(const MatS& a, const VecS& x);   // A x, x a column
VecS vec_mat(const VecS& x, const MatS& a);   // x^T A, result a row

VecS vec_add(const VecS& a, const VecS& b);
VecS vec_sub(const VecS& a, const VecS& b);
VecS vec_scale(const VecS& a, const Scalar& s);
Scalar dot(const VecS& a, const VecS& b);
// x^T Phi y; identity-ambient callers pass an empty Phi.
Scalar dot_phi(const VecS& a, const MatS& phi, const VecS& b);

Scalar det(MatS a);
MatS inverse(const MatS& a);                  // throws SingularBasis
int rank(MatS a);
// Rows spanning the right kernel {x : A x = 0}.
MatS nullspace(const MatS& a);
// Solves A x = b; throws SingularBasis if A is singular (square only).
VecS solve(const MatS& a, const VecS& b);
// Least-structure solve for consistent rectangular systems: returns any x
// with A x = b, or reports inconsistency.
bool solve_consistent(MatS a, VecS b, VecS& x);

// Exact LDL^T of a symmetric positive definite matrix: A = L D L^T with L
// unit lower triangular.  Positive-definiteness is certified as a byproduct
// (all pivots must have positive certified sign).
void ldlt(const MatS& a, MatS& l, VecS& d);

std::vector<std::vector<DInterval>> mat_to_interval(const MatS& a);
std::vector<std::vector<double>> mat_to_double(const MatS& a);
std::vector<DInterval> vec_to_interval(const VecS& a);
std::vector<double> vec_to_double(const VecS& a);

}  // namespace latgeo
