#pragma once

// Leading-term asymptotics and remainder analysis for anisotropic lattice
// point counts.  As the expansion parameter eps shrinks, the count of lattice
// points in T_eps(S) grows like
//
//   n_eps(S)  ~  eps^{-q} * (sum of slice section volumes) / slice covolume,
//
// the sum running over the finitely many lattice slices that meet S.  This
// header evaluates that leading term, forms the remainder interval of a
// count against it, predicts the remainder decay exponent for the supported
// geometry regimes, and fits an empirical exponent to a scan over a
// decreasing sequence of eps values.

#include <cstdint>
#include <string>
#include <vector>

#include "latgeo/counting.hpp"

namespace latgeo {

// Geometry regime of a (split, domain) pair, carrying the parameters that
// enter the predicted remainder exponent.
enum class RegimeKind {
  SmoothSlices,         // slice sections with smooth boundary, no convexity
  FiberStrictlyConvex,  // sections along the expanded directions strictly convex
  SliceStrictlyConvex,  // full slice sections strictly convex
  BoxAdmissible,        // box with edges aligned to the split, Diophantine lattice
  AlgebraicProduct,     // norm-form product domain over an algebraic lattice
};

struct RegimeClass {
  RegimeKind kind = RegimeKind::SmoothSlices;
  int n = 0;  // ambient dimension
  int p = 0;  // fixed-subspace dimension
  int q = 0;  // expanded dimension (n = p + q)
  int r = 0;  // rank of the slice label lattice
  // AlgebraicProduct only: number of degenerate product factors and the real /
  // complex embedding counts of the underlying field.
  int ell = 0;
  int places_real = 0;
  int places_complex = 0;
};

// Predicted remainder envelope |R(eps)| <= C * eps^power * (1+|log2 eps|)^d
// with d = log_degree + log_margin.  Pure-power regimes have d = 0; the
// box regime has power = 0; the algebraic product regime carries the fixed
// fractional margin 0.1 on its log degree.
struct PredictedBound {
  double power = 0.0;
  int log_degree = 0;
  double log_margin = 0.0;
  bool log_form() const { return power == 0.0; }
  double total_log_degree() const { return log_degree + log_margin; }
};

// Exponent / log-class predicted for the regime:
//   SmoothSlices          power 1/(p-r+1) - q
//   FiberStrictlyConvex   power 2q/(q+1+2(p-r)) - q
//   SliceStrictlyConvex   power 2q/(n-r+1) - q
//   BoxAdmissible         log degree n-r-1
//   AlgebraicProduct      power -q(n-r-ell)/(n-r-ell+2), log degree
//                         places_real + places_complex + 0.1
// Throws InconsistentParameters on out-of-range or regime-foreign parameters.
PredictedBound predicted_exponent(const RegimeClass& rc);

// Leading term of the count asymptotics:
//   eps^{-q} / sqrt(det Gram of the slice lattice) * sum of slice volumes,
// the sum over the labels of slice_window(sd, s).  With r = 0 this collapses
// to eps^{-q} * vol(S) / covol(lattice).  Section volumes of oracle-backed or
// obliquely sliced domains fall back to quasi-Monte Carlo internally.
double leading_term(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                    std::int64_t budget = 0);

// Remainder interval of a count against the leading term:
//   [certain - LT, certain + boundary_hits - LT].
// The count must have been produced for the same (sd, s, eps).
DInterval remainder(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                    const CountResult& count, std::int64_t budget = 0);

// One scan row: exact count bracket and leading term at a single eps.
struct ScanRow {
  Rat eps{1};
  std::int64_t certain = 0;
  std::int64_t boundary_hits = 0;
  double leading = 0.0;
  double rem_lo = 0.0;
  double rem_hi = 0.0;
  bool used_in_fit = false;  // false when |R| may be below 0.5 (count noise)
};

// Fitted remainder model.  The power slope is always fitted (ordinary least
// squares of log|R| on log(1/eps)); log-class regimes additionally fit the
// envelope constant for their fixed log degree.
struct FitModel {
  bool log_form = false;
  double beta = 0.0;      // fitted exponent on eps: |R| ~ constant * eps^beta
  double constant = 0.0;  // multiplier C (power form) or c (log form)
  double log_degree = 0.0;  // degree on (1+|log2 eps|) used for the constant
  double r2 = 0.0;          // coefficient of determination of the slope fit
};

struct RemainderScan {
  std::vector<ScanRow> rows;  // sorted by strictly decreasing eps
  RegimeClass regime;
  PredictedBound predicted;
  FitModel fit;
  bool verdict = false;       // fitted growth within slack of the prediction
  std::string verdict_note;   // human-readable comparison
};

// Fit and verdict over precomputed scan rows, without recounting.  Rows may
// arrive in any order (they are canonicalized to strictly decreasing eps) and
// the fit-usability flag is recomputed from each remainder interval, so a
// scan table loaded back from disk refits identically.  Exclusion, slack and
// verdict rules are those of scan_and_fit below.
RemainderScan fit_scan_rows(std::vector<ScanRow> rows, const RegimeClass& regime);

// Counts, leading terms, and remainder fit over a set of distinct eps values
// (any order; rows are canonically sorted by decreasing eps, so the fit does
// not depend on the input order).  Rows whose remainder interval reaches into
// (-0.5, 0.5) are excluded from the fit; fewer than 4 usable rows raise
// TooFewUsableRows.  The verdict is one-sided with slack 0.15 on the
// exponent: decaying faster than predicted passes, growing faster fails.
// Log-class regimes instead require the fitted power slope to be within 0.15
// of zero.
RemainderScan scan_and_fit(const SubspaceSplit& sd, const Domain& s,
                           std::vector<Rat> eps_list, const RegimeClass& regime,
                           const Rat& tol = default_count_tol(),
                           std::int64_t budget = 0);

}  // namespace latgeo
