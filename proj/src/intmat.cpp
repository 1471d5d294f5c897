#include "latgeo/intmat.hpp"

#include <algorithm>

#include "latgeo/error.hpp"

namespace latgeo {

namespace {

void swap_cols(MatZ& m, int a, int b) {
  for (auto& row : m) std::swap(row[a], row[b]);
}

// col_dst -= q * col_src
void axpy_col(MatZ& m, int dst, int src, const Int& q) {
  if (q == 0) return;
  for (auto& row : m) row[dst] -= q * row[src];
}

void negate_col(MatZ& m, int c) {
  for (auto& row : m) row[c] = -row[c];
}

}  // namespace

ColHNF hnf_cols(MatZ m) {
  int rows = static_cast<int>(m.size());
  int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
  ColHNF out;
  out.u.assign(cols, std::vector<Int>(cols, 0));
  for (int i = 0; i < cols; i++) out.u[i][i] = 1;
  int frontier = 0;
  for (int row = 0; row < rows && frontier < cols; row++) {
    // is there anything to clear in this row?
    bool any = false;
    for (int c = frontier; c < cols; c++)
      if (m[row][c] != 0) {
        any = true;
        break;
      }
    if (!any) continue;
    // gcd chain: repeatedly reduce by the smallest nonzero entry
    while (true) {
      int best = -1;
      for (int c = frontier; c < cols; c++) {
        if (m[row][c] == 0) continue;
        if (best < 0 || abs(m[row][c]) < abs(m[row][best])) best = c;
      }
      if (best != frontier) {
        swap_cols(m, frontier, best);
        swap_cols(out.u, frontier, best);
      }
      bool cleared = true;
      for (int c = frontier + 1; c < cols; c++) {
        if (m[row][c] == 0) continue;
        Int q;
        // truncated quotient keeps remainders strictly smaller in magnitude
        mpz_tdiv_q(q.get_mpz_t(), m[row][c].get_mpz_t(), m[row][frontier].get_mpz_t());
        axpy_col(m, c, frontier, q);
        axpy_col(out.u, c, frontier, q);
        if (m[row][c] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (m[row][frontier] < 0) {
      negate_col(m, frontier);
      negate_col(out.u, frontier);
    }
    out.pivot_rows.push_back(row);
    frontier++;
  }
  out.rank = frontier;
  out.h = std::move(m);
  return out;
}

MatZ kernel_basis(const MatZ& m) {
  int cols = m.empty() ? 0 : static_cast<int>(m[0].size());
  if (m.empty()) {
    // no constraints: kernel is all of Z^cols -- but cols is unknown from an
    // empty matrix, so callers pass an explicit zero row instead
    return {};
  }
  ColHNF h = hnf_cols(m);
  MatZ basis;
  for (int c = h.rank; c < cols; c++) {
    std::vector<Int> v(cols);
    for (int i = 0; i < cols; i++) v[i] = h.u[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

bool solve_integer(const MatZ& a, const std::vector<Int>& b, std::vector<Int>& x) {
  int rows = static_cast<int>(a.size());
  int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
  if (static_cast<int>(b.size()) != rows)
    fail(ErrorCode::InvalidDims, "integer solve shape mismatch");
  ColHNF h = hnf_cols(a);
  std::vector<Int> residual = b;
  std::vector<Int> y(h.rank, 0);
  for (int k = 0; k < h.rank; k++) {
    int pr = h.pivot_rows[k];
    const Int& piv = h.h[pr][k];
    if (residual[pr] % piv != 0) return false;
    y[k] = residual[pr] / piv;
    if (y[k] != 0)
      for (int i = 0; i < rows; i++) residual[i] -= y[k] * h.h[i][k];
  }
  for (const Int& r : residual)
    if (r != 0) return false;
  x.assign(cols, Int(0));
  for (int k = 0; k < h.rank; k++)
    if (y[k] != 0)
      for (int i = 0; i < cols; i++) x[i] += h.u[i][k] * y[k];
  return true;
}

}  // namespace latgeo
