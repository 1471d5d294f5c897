#pragma once

// Exact lattice point counting in anisotropically scaled (or multiplicatively
// stretched) domains.  Three methods share one contract:
//
//   * count_naive        enumerates a coefficient box around the image domain
//                        and classifies every candidate exactly (the oracle);
//   * count_sliced       decomposes the count over the parallel slices of a
//                        subspace split and runs one small ellipsoid
//                        enumeration per slice (the production path);
//   * count_multiplicative  counts inside T*S for a coordinatewise multiplier
//                        (real slots scale, complex slots rotate-and-scale).
//
// Counts of open domains are reported as an interval: `certain` points are
// classified strictly inside, `boundary_hits` fall within the tolerance band
// of the boundary without being exactly on it, and the true count always lies
// in [certain, certain + boundary_hits].  Points exactly on the boundary are
// decidable for the analytic domain kinds (the classification escalates to
// exact arithmetic); an open set excludes them, so they are reported
// separately in `boundary_exact` rather than widening the interval.  For
// oracle-backed domains exactness is unavailable and every banded point
// counts as a boundary hit.

#include <cstdint>
#include <utility>
#include <vector>

#include "latgeo/domains.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/splitter.hpp"

namespace latgeo {

enum class CountMethod { Naive, Sliced, Multiplicative };

inline constexpr int kCountSampleCap = 32;

struct CountResult {
  std::int64_t certain = 0;
  std::int64_t boundary_hits = 0;   // in the tol band, membership unresolved
  std::int64_t boundary_exact = 0;  // exactly on the boundary, hence excluded
  CountMethod method = CountMethod::Naive;
  Rat eps{1};                      // anisotropy parameter (1 for multiplicative)
  std::vector<double> multiplier;  // flattened multiplier descriptor, if any
  std::int64_t slices_used = 0;    // slices whose span met the circumball
  std::int64_t points_examined = 0;  // candidates classified
  // first few counted points as lattice coefficient vectors, for debugging
  std::vector<std::vector<std::int64_t>> sample_points;
};

// Default classification tolerance on the domain's defining quantity (1e-9).
Rat default_count_tol();

// Coordinatewise multiplier on R^s x C^t; complex slots occupy consecutive
// coordinate pairs after the real slots.
struct Multiplier {
  std::vector<Scalar> real_parts;
  std::vector<std::pair<Scalar, Scalar>> complex_parts;  // (re, im)
  int dim() const {
    return static_cast<int>(real_parts.size() + 2 * complex_parts.size());
  }
};

// Product of the real slots times |z|^2 per complex slot; equals the
// determinant of multiplier_matrix.
Scalar multiplier_norm(const Multiplier& t);
// Block-diagonal matrix acting as the multiplier on coordinates.
MatS multiplier_matrix(const Multiplier& t);

// Count of lattice points in T_eps(S) + v by coefficient-box enumeration.
// Throws BudgetExceeded (message includes the estimate) when the coefficient
// box holds more candidates than the budget (0 = default_budget()).
CountResult count_naive(const Lattice& lat, const Domain& s, const AnisoMap& m,
                        const VecS& v = {}, const Rat& tol = default_count_tol(),
                        std::int64_t budget = 0);

// Count via the slice decomposition; requires v = 0 (shifted counting routes
// through count_naive).  Agrees with count_naive on certain and
// boundary_hits.  Throws WindowIncomplete if a slice with nonempty
// intersection evaded the enumeration window.
CountResult count_sliced(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                         const VecS& v = {}, const Rat& tol = default_count_tol(),
                         std::int64_t budget = 0);

// Count of lattice points in T*S + v.  Throws ZeroNorm when the multiplier
// norm vanishes.
CountResult count_multiplicative(const Lattice& lat, const Multiplier& t,
                                 const Domain& s, const VecS& v = {},
                                 const Rat& tol = default_count_tol(),
                                 std::int64_t budget = 0);

// Public entry point: sliced for v = 0, naive otherwise.
CountResult count(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                  const VecS& v = {}, const Rat& tol = default_count_tol(),
                  std::int64_t budget = 0);

// Integer labels of every slice of the split whose affine span passes within
// the circumscribed ball of S (labels are coefficients on the slice index
// basis; for r = 0 the single empty label denotes the whole space).  The
// result is sorted; a bounding-box cross-check raises WindowIncomplete if a
// slice meeting the ball could have escaped.  Shared by the sliced counter
// and the leading-term evaluation.
std::vector<std::vector<std::int64_t>> slice_window(const SubspaceSplit& sd,
                                                    const Domain& s,
                                                    std::int64_t budget = 0);

}  // namespace latgeo
