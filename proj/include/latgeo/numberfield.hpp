#pragma once

// Algebraic module lattices: rank-d modules over a degree-d number field,
// embedded into R^d through the field's real and complex embeddings, with
// exact field norms, the coordinate norm form, and good-position checks
// (does any nonzero lattice point annihilate the norm form?).
//
// Embedded row layout for a generator g: the designated real embedding of
// the generators first, the remaining real embeddings in ascending root
// order, then one (Re, Im) coordinate pair per complex-conjugate embedding
// in the field's pair order.  Real quadratic fields and the two bundled
// cubic rings get exact algebraic rows; all other fields fall back to
// certified rational approximations (root enclosures of width <= 2^-64),
// which is recorded in `embedding_exact`.

#include <cstdint>
#include <vector>

#include "latgeo/lattice.hpp"
#include "latgeo/numfield.hpp"
#include "latgeo/scalar.hpp"

namespace latgeo {

struct ModuleLattice {
  FieldPtr field;
  std::vector<FieldElement> generators;  // Z-basis of the module, d elements
  Lattice embedded;                      // embedding image in R^d
  bool embedding_exact = false;  // rows exact algebraic values, not rational
                                 // approximations of them
};

// Builds the embedded lattice whose row i is generator i under all
// embeddings, in the layout described above.  Generators must all live in
// `field` under one shared designated embedding and be Z-linearly
// independent (checked via the exact determinant of their coordinate
// matrix); otherwise DependentGenerators / FieldMismatch is thrown.
ModuleLattice canonical_embedding(const FieldPtr& field,
                                  const std::vector<FieldElement>& generators);

// Exact rational field norm: the determinant of the multiplication-by-xi
// matrix on the power basis, which equals the resultant of the minimal
// polynomial and the coordinate polynomial of xi.
Rat field_norm(const FieldElement& xi);

// Product of the inner products of x with the rows of an orthonormal frame.
// Throws NonOrthonormalFrame if the frame is not orthonormal within 1e-12,
// InvalidDims on shape mismatch.
double nm_e(const std::vector<double>& x,
            const std::vector<std::vector<double>>& frame);
// Exact-scalar variant; sign decisions (in particular "exactly zero") are
// certified rather than rounded.
Scalar nm_e_exact(const VecS& x, const MatS& frame);

// Norm form of the embedding's own coordinate blocks: the product of the
// real-embedding coordinates times, for each complex pair, the squared
// modulus Re^2 + Im^2.  On sigma(xi) this equals the field norm up to sign.
double nm_canonical(const FieldPtr& field, const std::vector<double>& x);

enum class GoodPositionMode { Certified, Search };

struct GoodPositionResult {
  bool certified = false;  // a positive lower bound on |norm form| was proven
  bool refuted = false;    // a nonzero point with norm form exactly 0 exists
  Rat bound_exact{0};      // certified lower bound (Certified mode only)
  double bound = 0.0;      // bound_exact as a double
  double min_abs = 0.0;    // smallest |norm form| seen (Search mode)
  std::vector<std::int64_t> witness;  // coefficients of the extremal point
  std::int64_t points_checked = 0;
};

// Certified mode (module lattices, frame must be exactly the identity):
// clearing the common denominator D of the generator coordinates moves the
// module into the order generated by the field's power basis, whose nonzero
// elements have integer norm; hence |norm| >= 1/D^d for every nonzero
// module element, and that bound is returned.  Search mode: evaluates the
// frame form nm_e exactly on every nonzero lattice point within `radius`
// and reports the minimum |value|; an exact zero refutes good position
// (witness coefficients included), anything else is inconclusive.
GoodPositionResult good_position_check(const ModuleLattice& ml,
                                       const MatS& frame, GoodPositionMode mode,
                                       const Rat& radius = Rat(0),
                                       std::int64_t budget = 0);
// Plain-lattice overload: Search only — there is no algebraic structure to
// certify with, so Certified mode throws UnsupportedKind.
GoodPositionResult good_position_check(const Lattice& lat, const MatS& frame,
                                       GoodPositionMode mode,
                                       const Rat& radius = Rat(0),
                                       std::int64_t budget = 0);

// True when every embedding's coordinate block (one axis per real
// embedding, the (Re, Im) axis pair of each complex embedding) lies inside
// a single block of the given orthogonal decomposition of R^d.  Blocks are
// lists of row vectors; together they must form an orthonormal system
// spanning R^d within 1e-9, else BlocksNotSpanning is thrown.
bool decomposition_compatibility(const FieldPtr& field,
                                 const std::vector<MatS>& blocks);

// Bundled module lattices over their power bases.
ModuleLattice module_zsqrt2();    // {1, sqrt2} in x^2 - 2
ModuleLattice module_zcbrt2();    // {1, cbrt2, cbrt4} in x^3 - 2
ModuleLattice module_zcyclic3();  // {1, theta, theta^2} in x^3 - 3x - 1

}  // namespace latgeo
