#include "latgeo/splitter.hpp"

#include <cmath>
#include <limits>

#include "latgeo/error.hpp"

namespace latgeo {

namespace {

MatZ identity_z(int n) {
  MatZ m(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; i++) m[i][i] = 1;
  return m;
}

MatS matz_to_mats(const MatZ& a) {
  MatS out;
  out.reserve(a.size());
  for (const auto& row : a) {
    VecS r;
    r.reserve(row.size());
    for (const Int& v : row) r.emplace_back(Rat(v));
    out.push_back(std::move(r));
  }
  return out;
}

// integer coordinate rows applied to a basis; empty coords give no vectors
MatS coords_to_vecs(const MatZ& coords, const MatS& basis) {
  if (coords.empty()) return {};
  return mat_mul(matz_to_mats(coords), basis);
}

// rows_a * phi * rows_b^T (empty phi = standard inner product)
MatS pairing_matrix(const MatS& rows_a, const MatS& phi, const MatS& rows_b) {
  MatS bt = mat_transpose(rows_b);
  if (phi.empty()) return mat_mul(rows_a, bt);
  return mat_mul(rows_a, mat_mul(phi, bt));
}

void normalize_row_signs(MatZ& m) {
  for (auto& row : m)
    for (const Int& v : row) {
      if (v == 0) continue;
      if (v < 0)
        for (Int& x : row) x = -x;
      break;
    }
}

// Power-basis coordinates of a scalar, padded to the field degree (degree 1
// when everything is rational).
std::vector<Rat> scalar_coords(const Scalar& s, int degree) {
  std::vector<Rat> out(degree, Rat(0));
  Rat r;
  if (s.try_rational(r)) {
    out[0] = r;
    return out;
  }
  const auto& c = s.field_elem().coords();
  for (int i = 0; i < degree && i < static_cast<int>(c.size()); i++) out[i] = c[i];
  return out;
}

int matrix_field_degree(const MatS& m) {
  for (const auto& row : m)
    for (const Scalar& s : row)
      if (!s.is_rational() && !s.field_elem().is_rational_value())
        return s.field_elem().field()->degree;
  return 1;
}

}  // namespace

SubspaceSpec SubspaceSpec::make(int ambient_dim, MatS rows) {
  if (ambient_dim < 1) fail(ErrorCode::InvalidDims, "ambient dimension must be positive");
  int p = mat_rows(rows);
  if (p > 0 && mat_cols(rows) != ambient_dim)
    fail(ErrorCode::InvalidDims, "subspace row length does not match ambient dimension");
  if (p > ambient_dim)
    fail(ErrorCode::DependentGenerators, "more spanning rows than the ambient dimension");
  if (p > 0 && rank(rows) != p)
    fail(ErrorCode::DependentGenerators, "subspace spanning rows are linearly dependent");
  SubspaceSpec s;
  s.ambient_dim = ambient_dim;
  s.rows = std::move(rows);
  return s;
}

MatZ dual_coords_in_subspace(const Lattice& lat, const SubspaceSpec& f) {
  int n = lat.dim();
  int p = f.dim();
  if (f.ambient_dim != n)
    fail(ErrorCode::InvalidDims, "subspace ambient dimension does not match the lattice");
  if (p == n) return identity_z(n);  // the whole dual lattice lies in F = E
  if (p == 0) return {};             // only the origin lies in F = {0}

  // Membership of z * dual_basis in F means orthogonality (standard pairing)
  // to every row of the plain kernel of F's spanning rows.
  MatS plain_kernel = nullspace(f.rows);  // (n-p) x n
  MatS cond = mat_mul(lat.dual_basis(), mat_transpose(plain_kernel));  // n x (n-p)

  // Expand each scalar condition into rational coordinate conditions, then
  // clear denominators to reach an integer kernel problem.
  int degree = matrix_field_degree(cond);
  MatZ constraints;  // rows indexed by condition, columns by z-coordinate
  int ncond = mat_cols(cond);
  for (int j = 0; j < ncond; j++) {
    for (int a = 0; a < degree; a++) {
      std::vector<Rat> col(n);
      bool all_zero = true;
      for (int i = 0; i < n; i++) {
        col[i] = scalar_coords(cond[i][j], degree)[a];
        if (col[i] != 0) all_zero = false;
      }
      if (all_zero) continue;
      Int lcm = 1;
      for (const Rat& v : col) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den().get_mpz_t());
      std::vector<Int> irow(n);
      for (int i = 0; i < n; i++) irow[i] = Int(col[i].get_num() * (lcm / col[i].get_den()));
      constraints.push_back(std::move(irow));
    }
  }
  MatZ out = constraints.empty() ? identity_z(n) : kernel_basis(constraints);
  normalize_row_signs(out);
  return out;
}

MatS dual_vectors_in_subspace(const Lattice& lat, const SubspaceSpec& f) {
  return coords_to_vecs(dual_coords_in_subspace(lat, f), lat.dual_basis());
}

SubspaceSplit split_by_subspace(const Lattice& lat, const SubspaceSpec& f) {
  SubspaceSplit sd;
  sd.lattice = lat;
  sd.fixed = f;
  sd.n = lat.dim();
  sd.p = f.dim();
  sd.q = sd.n - sd.p;

  if (sd.p == sd.n)
    sd.expanded_rows = {};
  else if (sd.p == 0)
    sd.expanded_rows = mat_identity(sd.n);
  else if (lat.standard_inner_product())
    sd.expanded_rows = nullspace(f.rows);
  else
    sd.expanded_rows = nullspace(mat_mul(f.rows, lat.phi()));

  sd.dual_in_f_coords = dual_coords_in_subspace(lat, f);
  sd.r = static_cast<int>(sd.dual_in_f_coords.size());
  sd.dual_in_f_vecs = coords_to_vecs(sd.dual_in_f_coords, lat.dual_basis());

  sd.slice_lattice_coords =
      sd.r == 0 ? identity_z(sd.n) : kernel_basis(sd.dual_in_f_coords);
  normalize_row_signs(sd.slice_lattice_coords);
  if (static_cast<int>(sd.slice_lattice_coords.size()) != sd.n - sd.r)
    fail(ErrorCode::InvariantViolation, "slice lattice rank mismatch");
  sd.slice_lattice_vecs = coords_to_vecs(sd.slice_lattice_coords, lat.basis());

  // Gram matrices (exact) of both factors
  MatS gram_f, gram_perp;
  if (sd.r > 0) {
    gram_f = pairing_matrix(sd.dual_in_f_vecs, lat.phi(), sd.dual_in_f_vecs);
    sd.covol_sq_dual_in_f = det(gram_f);
    sd.slice_index_vecs = mat_mul(inverse(gram_f), sd.dual_in_f_vecs);
  } else {
    sd.covol_sq_dual_in_f = Scalar(1);
  }
  if (sd.n - sd.r > 0) {
    gram_perp = pairing_matrix(sd.slice_lattice_vecs, lat.phi(), sd.slice_lattice_vecs);
    sd.covol_sq_slices = det(gram_perp);
  } else {
    sd.covol_sq_slices = Scalar(1);
  }

  // One lattice point per slice-index generator, found by integer solve and
  // then size-reduced modulo the slice lattice (any representative is valid).
  for (int m = 0; m < sd.r; m++) {
    std::vector<Int> e(sd.r, 0);
    e[m] = 1;
    std::vector<Int> c;
    if (!solve_integer(sd.dual_in_f_coords, e, c))
      fail(ErrorCode::InvariantViolation,
           "slice representative system unsolvable; dual sublattice not saturated");
    if (sd.n - sd.r > 0) {
      const MatS& g = lat.gram();
      VecS rhs(sd.n - sd.r, Scalar(0));
      for (int j = 0; j < sd.n - sd.r; j++)
        for (int i = 0; i < sd.n; i++) {
          if (c[i] == 0) continue;
          for (int k = 0; k < sd.n; k++) {
            if (sd.slice_lattice_coords[j][k] == 0) continue;
            rhs[j] += Scalar(Rat(c[i] * sd.slice_lattice_coords[j][k])) * g[i][k];
          }
        }
      VecS x = solve(gram_perp, rhs);
      for (int j = 0; j < sd.n - sd.r; j++) {
        long rd = std::lround(x[j].to_float());
        if (rd == 0) continue;
        for (int k = 0; k < sd.n; k++) c[k] -= Int(rd) * sd.slice_lattice_coords[j][k];
      }
    }
    sd.rep_table.push_back(std::move(c));
  }

  // --- internal identities, verified on every construction ---

  // each basis vector pairs with each dual_in_f generator to the stored integer
  for (int m = 0; m < sd.r; m++)
    for (int i = 0; i < sd.n; i++) {
      Scalar pr = dot_phi(lat.basis()[i], lat.phi(), sd.dual_in_f_vecs[m]);
      if (compare(pr, Scalar(Rat(sd.dual_in_f_coords[m][i]))) != 0)
        fail(ErrorCode::InvariantViolation, "non-integral pairing in the decomposition");
    }

  // representatives project exactly onto their slice labels
  for (int m = 0; m < sd.r; m++)
    for (int j = 0; j < sd.r; j++) {
      Int acc = 0;
      for (int i = 0; i < sd.n; i++) acc += sd.dual_in_f_coords[j][i] * sd.rep_table[m][i];
      if (acc != (j == m ? 1 : 0))
        fail(ErrorCode::InvariantViolation, "slice representative projects incorrectly");
    }

  // covolume identity: vol(V^⊥/slices)^2 = vol(E/lattice)^2 * vol(V/dual_in_f)^2
  Scalar rhs = lat.covolume_sq() * sd.covol_sq_dual_in_f;
  if (compare(sd.covol_sq_slices, rhs) != 0)
    fail(ErrorCode::InvariantViolation, "covolume identity failed");

  return sd;
}

std::vector<Int> slice_representative_by_index(const SubspaceSplit& sd,
                                               const std::vector<Int>& index) {
  if (static_cast<int>(index.size()) != sd.r)
    fail(ErrorCode::InvalidDims, "slice index length mismatch");
  std::vector<Int> c(sd.n, 0);
  for (int m = 0; m < sd.r; m++) {
    if (index[m] == 0) continue;
    for (int i = 0; i < sd.n; i++) c[i] += index[m] * sd.rep_table[m][i];
  }
  return c;
}

std::vector<Int> slice_representative(const SubspaceSplit& sd, const VecS& point) {
  if (static_cast<int>(point.size()) != sd.n)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  std::vector<Int> index(sd.r);
  for (int m = 0; m < sd.r; m++) {
    Scalar w = dot_phi(point, sd.lattice.phi(), sd.dual_in_f_vecs[m]);
    Rat wr;
    if (!w.try_rational(wr) || !is_integer(wr))
      fail(ErrorCode::NotInDualSliceLattice,
           "point does not pair integrally with the dual sublattice");
    index[m] = Int(wr.get_num());
  }
  // the pairing fixes the only candidate label; the point must equal it
  VecS recon(sd.n, Scalar(0));
  for (int m = 0; m < sd.r; m++)
    for (int j = 0; j < sd.n; j++)
      recon[j] += Scalar(Rat(index[m])) * sd.slice_index_vecs[m][j];
  for (int j = 0; j < sd.n; j++)
    if (compare(recon[j], point[j]) != 0)
      fail(ErrorCode::NotInDualSliceLattice, "point is not a slice label");
  return slice_representative_by_index(sd, index);
}

TrivialIntersectionCert verify_trivial_intersection(const SubspaceSplit& sd,
                                                    const Rat& radius, int64_t budget) {
  if (radius <= 0) fail(ErrorCode::NonPositiveParameter, "search radius must be positive");
  TrivialIntersectionCert cert;
  cert.min_distance = std::numeric_limits<double>::infinity();
  cert.min_ratio = std::numeric_limits<double>::infinity();

  // W = F ∩ V^⊥ as ambient rows
  MatS w_rows;
  if (sd.n == sd.r || sd.p == 0) {
    w_rows = {};  // V^⊥ = {0} or F = {0}
  } else if (sd.r == 0) {
    w_rows = sd.fixed.rows;  // V^⊥ = E, so the intersection is F itself
  } else {
    MatS m(sd.r, VecS(sd.p, Scalar(0)));
    for (int a = 0; a < sd.r; a++)
      for (int i = 0; i < sd.p; i++)
        m[a][i] = dot_phi(sd.fixed.rows[i], sd.lattice.phi(), sd.dual_in_f_vecs[a]);
    MatS combos = nullspace(m);  // rows of F-coefficients
    if (!combos.empty()) w_rows = mat_mul(combos, sd.fixed.rows);
  }
  if (w_rows.empty()) {
    cert.vacuous = true;
    return cert;
  }

  // dual basis of the slice lattice inside V^⊥
  MatS gram_perp = pairing_matrix(sd.slice_lattice_vecs, sd.lattice.phi(), sd.slice_lattice_vecs);
  MatS dual_gram = inverse(gram_perp);
  MatS dual_rows = mat_mul(dual_gram, sd.slice_lattice_vecs);

  auto phi_d = sd.lattice.standard_inner_product()
                   ? std::vector<std::vector<double>>()
                   : mat_to_double(sd.lattice.phi());
  auto ip = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    if (phi_d.empty()) {
      for (size_t i = 0; i < x.size(); i++) s += x[i] * y[i];
    } else {
      for (size_t i = 0; i < x.size(); i++)
        for (size_t j = 0; j < y.size(); j++) s += x[i] * phi_d[i][j] * y[j];
    }
    return s;
  };

  // orthonormal frame for W (floating point suffices: we only measure
  // well-separated distances, never decide exact membership here)
  std::vector<std::vector<double>> frame;
  for (const auto& row : w_rows) {
    std::vector<double> v = vec_to_double(row);
    for (const auto& u : frame) {
      double c = ip(v, u);
      for (size_t i = 0; i < v.size(); i++) v[i] -= c * u[i];
    }
    double nn = std::sqrt(ip(v, v));
    if (nn < 1e-300) fail(ErrorCode::DegenerateFrame, "intersection frame degenerated");
    for (double& x : v) x /= nn;
    frame.push_back(std::move(v));
  }

  auto dual_rows_d = mat_to_double(dual_rows);
  int k = static_cast<int>(dual_rows_d.size());
  try {
    enumerate_ellipsoid(
        {dual_gram, {}, radius * radius, budget}, [&](const std::vector<int64_t>& z) {
          bool zero = true;
          for (int64_t v : z)
            if (v != 0) {
              zero = false;
              break;
            }
          if (zero) return;
          std::vector<double> y(sd.n, 0.0);
          for (int j = 0; j < k; j++)
            if (z[j] != 0)
              for (int i = 0; i < sd.n; i++)
                y[i] += static_cast<double>(z[j]) * dual_rows_d[j][i];
          double yn2 = ip(y, y);
          if (yn2 <= 0) return;
          double proj2 = 0;
          for (const auto& u : frame) {
            double c = ip(y, u);
            proj2 += c * c;
          }
          double d2 = yn2 - proj2;
          double dist = d2 > 0 ? std::sqrt(d2) : 0.0;
          double ratio = dist / std::sqrt(yn2);
          cert.points_checked++;
          if (dist < cert.min_distance) cert.min_distance = dist;
          if (ratio < cert.min_ratio) cert.min_ratio = ratio;
        });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BudgetExceeded)
      fail(ErrorCode::RadiusTooLargeForBudget, e.what());
    throw;
  }
  cert.holds = cert.points_checked == 0 || cert.min_ratio >= 1e-10;
  return cert;
}

}  // namespace latgeo
