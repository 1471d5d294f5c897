#include "latgeo/linalg.hpp"

#include "latgeo/error.hpp"

namespace latgeo {

MatS mat_zero(int rows, int cols) { return MatS(rows, VecS(cols, Scalar(0))); }

MatS mat_identity(int n) {
  MatS a = mat_zero(n, n);
  for (int i = 0; i < n; i++) a[i][i] = Scalar(1);
  return a;
}

int mat_rows(const MatS& a) { return static_cast<int>(a.size()); }
int mat_cols(const MatS& a) { return a.empty() ? 0 : static_cast<int>(a[0].size()); }

MatS mat_add(const MatS& a, const MatS& b) {
  MatS r = a;
  for (size_t i = 0; i < r.size(); i++)
    for (size_t j = 0; j < r[i].size(); j++) r[i][j] += b[i][j];
  return r;
}

MatS mat_sub(const MatS& a, const MatS& b) {
  MatS r = a;
  for (size_t i = 0; i < r.size(); i++)
    for (size_t j = 0; j < r[i].size(); j++) r[i][j] -= b[i][j];
  return r;
}

MatS mat_mul(const MatS& a, const MatS& b) {
  int n = mat_rows(a), k = mat_cols(a), m = mat_cols(b);
  if (k != mat_rows(b)) fail(ErrorCode::InvalidDims, "matrix product shape mismatch");
  MatS r = mat_zero(n, m);
  for (int i = 0; i < n; i++)
    for (int l = 0; l < k; l++) {
      if (a[i][l].is_zero()) continue;
      for (int j = 0; j < m; j++) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

MatS mat_scale(const MatS& a, const Scalar& s) {
  MatS r = a;
  for (auto& row : r)
    for (auto& x : row) x *= s;
  return r;
}

MatS mat_transpose(const MatS& a) {
  int n = mat_rows(a), m = mat_cols(a);
  MatS r = mat_zero(m, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < m; j++) r[j][i] = a[i][j];
  return r;
}

VecS mat_vec(const MatS& a, const VecS& x) {
  int n = mat_rows(a), m = mat_cols(a);
  if (static_cast<int>(x.size()) != m)
    fail(ErrorCode::InvalidDims, "matrix-vector shape mismatch");
  VecS r(n, Scalar(0));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < m; j++)
      if (!a[i][j].is_zero() && !x[j].is_zero()) r[i] += a[i][j] * x[j];
  return r;
}

VecS vec_mat(const VecS& x, const MatS& a) {
  int n = mat_rows(a), m = mat_cols(a);
  if (static_cast<int>(x.size()) != n)
    fail(ErrorCode::InvalidDims, "vector-matrix shape mismatch");
  VecS r(m, Scalar(0));
  for (int i = 0; i < n; i++) {
    if (x[i].is_zero()) continue;
    for (int j = 0; j < m; j++)
      if (!a[i][j].is_zero()) r[j] += x[i] * a[i][j];
  }
  return r;
}

VecS vec_add(const VecS& a, const VecS& b) {
  VecS r = a;
  for (size_t i = 0; i < r.size(); i++) r[i] += b[i];
  return r;
}

VecS vec_sub(const VecS& a, const VecS& b) {
  VecS r = a;
  for (size_t i = 0; i < r.size(); i++) r[i] -= b[i];
  return r;
}

VecS vec_scale(const VecS& a, const Scalar& s) {
  VecS r = a;
  for (auto& x : r) x *= s;
  return r;
}

Scalar dot(const VecS& a, const VecS& b) {
  if (a.size() != b.size()) fail(ErrorCode::InvalidDims, "dot of unequal lengths");
  Scalar r(0);
  for (size_t i = 0; i < a.size(); i++)
    if (!a[i].is_zero() && !b[i].is_zero()) r += a[i] * b[i];
  return r;
}

Scalar dot_phi(const VecS& a, const MatS& phi, const VecS& b) {
  if (phi.empty()) return dot(a, b);
  return dot(a, mat_vec(phi, b));
}

Scalar det(MatS a) {
  int n = mat_rows(a);
  if (n != mat_cols(a)) fail(ErrorCode::InvalidDims, "determinant of non-square matrix");
  Scalar result(1);
  for (int col = 0; col < n; col++) {
    int pivot = -1;
    for (int row = col; row < n; row++)
      if (!a[row][col].is_zero()) {
        pivot = row;
        break;
      }
    if (pivot < 0) return Scalar(0);
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      result = -result;
    }
    result *= a[col][col];
    Scalar inv_piv = Scalar(1) / a[col][col];
    for (int row = col + 1; row < n; row++) {
      if (a[row][col].is_zero()) continue;
      Scalar f = a[row][col] * inv_piv;
      for (int j = col; j < n; j++) a[row][j] -= f * a[col][j];
    }
  }
  return result;
}

MatS inverse(const MatS& a) {
  int n = mat_rows(a);
  if (n != mat_cols(a)) fail(ErrorCode::InvalidDims, "inverse of non-square matrix");
  MatS work = a, inv = mat_identity(n);
  for (int col = 0; col < n; col++) {
    int pivot = -1;
    for (int row = col; row < n; row++)
      if (!work[row][col].is_zero()) {
        pivot = row;
        break;
      }
    if (pivot < 0) fail(ErrorCode::SingularBasis, "matrix is singular");
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    Scalar ip = Scalar(1) / work[col][col];
    for (int j = 0; j < n; j++) {
      work[col][j] *= ip;
      inv[col][j] *= ip;
    }
    for (int row = 0; row < n; row++) {
      if (row == col || work[row][col].is_zero()) continue;
      Scalar f = work[row][col];
      for (int j = 0; j < n; j++) {
        work[row][j] -= f * work[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

namespace {

// Reduced row echelon form; returns pivot column per pivot row.
std::vector<int> rref_inplace(MatS& a) {
  int n = mat_rows(a), m = mat_cols(a);
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m && row < n; col++) {
    int p = -1;
    for (int r = row; r < n; r++)
      if (!a[r][col].is_zero()) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(a[p], a[row]);
    Scalar ip = Scalar(1) / a[row][col];
    for (int j = col; j < m; j++) a[row][j] *= ip;
    for (int r = 0; r < n; r++) {
      if (r == row || a[r][col].is_zero()) continue;
      Scalar f = a[r][col];
      for (int j = col; j < m; j++) a[r][j] -= f * a[row][j];
    }
    pivots.push_back(col);
    row++;
  }
  return pivots;
}

}  // namespace

int rank(MatS a) { return static_cast<int>(rref_inplace(a).size()); }

MatS nullspace(const MatS& a) {
  int m = mat_cols(a);
  MatS work = a;
  std::vector<int> pivots = rref_inplace(work);
  std::vector<bool> is_pivot(m, false);
  for (int c : pivots) is_pivot[c] = true;
  MatS basis;
  for (int free_col = 0; free_col < m; free_col++) {
    if (is_pivot[free_col]) continue;
    VecS v(m, Scalar(0));
    v[free_col] = Scalar(1);
    for (size_t pr = 0; pr < pivots.size(); pr++)
      v[pivots[pr]] = -work[pr][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

VecS solve(const MatS& a, const VecS& b) {
  int n = mat_rows(a);
  if (n != mat_cols(a) || static_cast<int>(b.size()) != n)
    fail(ErrorCode::InvalidDims, "solve expects square system");
  MatS inv = inverse(a);
  return mat_vec(inv, b);
}

bool solve_consistent(MatS a, VecS b, VecS& x) {
  int n = mat_rows(a), m = mat_cols(a);
  // eliminate on the augmented system
  MatS aug = a;
  for (int i = 0; i < n; i++) aug[i].push_back(b[i]);
  std::vector<int> pivots = rref_inplace(aug);
  for (int c : pivots)
    if (c == m) return false;  // pivot in the constant column: inconsistent
  // also detect zero-row = nonzero-constant rows beyond the pivots
  for (int i = static_cast<int>(pivots.size()); i < n; i++)
    if (!aug[i][m].is_zero()) return false;
  x.assign(m, Scalar(0));
  for (size_t pr = 0; pr < pivots.size(); pr++) x[pivots[pr]] = aug[pr][m];
  return true;
}

void ldlt(const MatS& a, MatS& l, VecS& d) {
  int n = mat_rows(a);
  if (n != mat_cols(a)) fail(ErrorCode::InvalidDims, "ldlt of non-square matrix");
  l = mat_identity(n);
  d.assign(n, Scalar(0));
  for (int j = 0; j < n; j++) {
    Scalar dj = a[j][j];
    for (int k = 0; k < j; k++) dj -= l[j][k] * l[j][k] * d[k];
    if (dj.is_zero() || dj.sign() <= 0)
      fail(ErrorCode::InvariantViolation, "ldlt pivot not positive: matrix not PD");
    d[j] = dj;
    for (int i = j + 1; i < n; i++) {
      Scalar v = a[i][j];
      for (int k = 0; k < j; k++) v -= l[i][k] * l[j][k] * d[k];
      l[i][j] = v / dj;
    }
  }
}

std::vector<std::vector<DInterval>> mat_to_interval(const MatS& a) {
  std::vector<std::vector<DInterval>> r(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    r[i].reserve(a[i].size());
    for (const Scalar& s : a[i]) r[i].push_back(s.to_interval());
  }
  return r;
}

std::vector<std::vector<double>> mat_to_double(const MatS& a) {
  std::vector<std::vector<double>> r(a.size());
  for (size_t i = 0; i < a.size(); i++) {
    r[i].reserve(a[i].size());
    for (const Scalar& s : a[i]) r[i].push_back(s.to_float());
  }
  return r;
}

std::vector<DInterval> vec_to_interval(const VecS& a) {
  std::vector<DInterval> r;
  r.reserve(a.size());
  for (const Scalar& s : a) r.push_back(s.to_interval());
  return r;
}

std::vector<double> vec_to_double(const VecS& a) {
  std::vector<double> r;
  r.reserve(a.size());
  for (const Scalar& s : a) r.push_back(s.to_float());
  return r;
}

}  // namespace latgeo
