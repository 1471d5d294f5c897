#pragma once

// Exact integer matrix algebra: column-style Hermite reduction with a
// tracked unimodular transform, integer kernels (automatically saturated:
// the kernel of a linear map is a pure subgroup), and integer linear solve.
// Everything runs on arbitrary-precision integers, so no overflow anywhere.

#include <vector>

#include "latgeo/rational.hpp"

namespace latgeo {

using MatZ = std::vector<std::vector<Int>>;

struct ColHNF {
  MatZ h;                       // m x n, column echelon, zero columns last
  MatZ u;                       // n x n unimodular with input * u == h
  std::vector<int> pivot_rows;  // pivot row of column k, ascending
  int rank = 0;
};

ColHNF hnf_cols(MatZ m);

// Rows generate {x in Z^n : m x = 0}; the result is a basis of the full
// (saturated) kernel lattice.
MatZ kernel_basis(const MatZ& m);

// Finds x in Z^n with a x = b if one exists.
bool solve_integer(const MatZ& a, const std::vector<Int>& b, std::vector<Int>& x);

}  // namespace latgeo
