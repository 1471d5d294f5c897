#pragma once

// Structural decomposition of a lattice relative to a fixed linear subspace
// F.  The dual vectors lying inside F form a finitely generated subgroup
// whose real span V is the "rationally visible" part of F; the lattice then
// splits into parallel slices indexed by the dual basis of that subgroup,
// each slice being a translate of the sublattice orthogonal to V.  All parts
// are computed exactly: memberships become integer kernels after expanding
// number-field coordinates to rational ones.
//
// Terminology used throughout:
//   dual_in_f       basis of (dual lattice) ∩ F, spanning V           (rank r)
//   slice_lattice   basis of lattice ∩ V^⊥, the per-slice translate   (rank n−r)
//   slice_index     dual basis of dual_in_f inside V; lattice points project
//                   onto V exactly into the integer span of these vectors,
//                   so each integer combination labels one nonempty slice
//   rep             a lattice point whose orthogonal projection onto V hits a
//                   prescribed slice label exactly

#include <cstdint>
#include <vector>

#include "latgeo/intmat.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/linalg.hpp"

namespace latgeo {

struct SubspaceSpec {
  int ambient_dim = 0;
  MatS rows;  // p x n, linearly independent, exact scalars

  // Validates shape and exact linear independence of the rows.
  static SubspaceSpec make(int ambient_dim, MatS rows);
  int dim() const { return static_cast<int>(rows.size()); }
};

struct SubspaceSplit {
  Lattice lattice;
  SubspaceSpec fixed;     // F: the subspace left unscaled by the anisotropy
  MatS expanded_rows;     // H = F^⊥ under the ambient form, (n-p) x n
  int n = 0, p = 0, q = 0, r = 0;

  MatZ dual_in_f_coords;  // r x n integer coordinates in the dual basis
  MatS dual_in_f_vecs;    // ambient rows; spans V
  MatZ slice_lattice_coords;  // (n-r) x n integer coordinates in the primal basis
  MatS slice_lattice_vecs;    // ambient rows; spans V^⊥
  MatS slice_index_vecs;      // r x n ambient rows: dual basis of dual_in_f in V
  MatZ rep_table;             // r x n: lattice coords of one point per index generator

  Scalar covol_sq_slices{1};     // det Gram of slice_lattice_vecs
  Scalar covol_sq_dual_in_f{1};  // det Gram of dual_in_f_vecs

  const MatS& v_rows() const { return dual_in_f_vecs; }
  const MatS& vperp_rows() const { return slice_lattice_vecs; }
};

struct TrivialIntersectionCert {
  bool holds = true;    // no enumerated dual point hugs F ∩ V^⊥
  bool vacuous = false; // F ∩ V^⊥ = {0}: nothing to check
  double min_distance = 0;  // smallest absolute distance observed
  double min_ratio = 0;     // smallest distance / point-norm ratio observed
  int64_t points_checked = 0;
};

// Integer coordinate rows (in the dual basis) of a basis of the group of
// dual-lattice vectors contained in span(f.rows).  The result is a basis of
// the full group: kernels of exact linear conditions are automatically
// saturated.
MatZ dual_coords_in_subspace(const Lattice& lat, const SubspaceSpec& f);

// Same basis as ambient vectors (rows).
MatS dual_vectors_in_subspace(const Lattice& lat, const SubspaceSpec& f);

// Computes the full decomposition and verifies its internal identities
// (integral pairings, exact projection of the stored representatives, and
// the covolume identity  vol(V^⊥/slice lattice) = vol(E/lattice) · vol(V/dual_in_f)).
SubspaceSplit split_by_subspace(const Lattice& lat, const SubspaceSpec& f);

// Lattice coordinates of a point whose projection onto V equals the given
// slice label.  `index` are integer coefficients over slice_index_vecs.
std::vector<Int> slice_representative_by_index(const SubspaceSplit& sd,
                                               const std::vector<Int>& index);

// Ambient-point version: validates that the point really is an integer
// combination of slice_index_vecs (else NotInDualSliceLattice).
std::vector<Int> slice_representative(const SubspaceSplit& sd, const VecS& point);

// Enumerates the dual of the slice lattice out to |y| <= radius and measures
// how close any nonzero point comes to the subspace F ∩ V^⊥ (relative to its
// norm).  A point at relative distance < 1e-10 refutes the certificate.
TrivialIntersectionCert verify_trivial_intersection(const SubspaceSplit& sd,
                                                    const Rat& radius,
                                                    int64_t budget = 0);

}  // namespace latgeo
