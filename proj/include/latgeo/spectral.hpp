#pragma once

// Adiabatic eigenvalue counting on flat tori.  A torus R^n / Lambda with an
// exact metric g carries Laplace eigenvalues 4 pi^2 |k|^2 under the inverse
// metric, one per dual lattice point k.  Shrinking the torus transversally
// to a foliation subspace F by a factor eps rescales the transverse dual
// component by eps, so the spectrum below a threshold is a lattice count
// over an expanding ellipsoid on the dual side — which is exactly the sliced
// counting machinery applied to the dual data.  Eigenvalue thresholds are
// passed as exact rationals mu = lambda / (4 pi^2), so on/off-boundary
// decisions are certified.

#include <cstdint>
#include <vector>

#include "latgeo/counting.hpp"
#include "latgeo/domains.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/splitter.hpp"

namespace latgeo {

class FlatTorus {
 public:
  // basis rows generate the torus lattice; metric is an exact symmetric
  // positive definite matrix (empty = standard); f spans the foliation
  // direction in the torus coordinates.
  static FlatTorus make(MatS basis, MatS metric, const SubspaceSpec& f);

  int dim() const { return torus_.dim(); }
  const Lattice& torus() const { return torus_; }
  const Lattice& dual() const { return dual_; }  // inverse metric attached
  const MatS& metric() const { return metric_; }
  const MatS& metric_inv() const { return metric_inv_; }
  // Counting data on the dual side: dual lattice split along the image of
  // the foliation subspace under the metric.
  const SubspaceSplit& dual_split() const { return split_; }

  // lambda / (4 pi^2) of the dual point with coefficients k at adiabatic
  // parameter eps: |P k|^2 + eps^2 |k - P k|^2 under the inverse metric,
  // where P projects onto the fixed dual subspace along its orthogonal
  // complement.  Exact.
  Scalar eigenvalue_factor(const std::vector<std::int64_t>& k,
                           const Rat& eps) const;
  // The eigenvalue itself, 4 pi^2 * eigenvalue_factor, as a double.
  double eigenvalue(const std::vector<std::int64_t>& k, const Rat& eps) const;

  // The dual-side threshold region {x : |x|^2 under the inverse metric < mu}
  // as an exact ellipsoid domain.
  Domain threshold_domain(const Rat& mu) const;

 private:
  Lattice torus_, dual_;
  MatS metric_, metric_inv_;  // identity stored explicitly
  SubspaceSplit split_;
  MatS proj_f_;  // projector onto the fixed dual subspace, exact
};

// Number of eigenvalues strictly below lambda = 4 pi^2 * mu at adiabatic
// parameter eps, as a certified count: `certain` eigenvalues are strictly
// below, `boundary_exact` sit exactly at the threshold (excluded), and any
// unresolved near-threshold cases appear in `boundary_hits`.
CountResult counting_function(const FlatTorus& t, const Rat& mu, const Rat& eps,
                              const Rat& tol = default_count_tol(),
                              std::int64_t budget = 0);

// Closed-form leading term of the eigenvalue count: eps^{-q} times the unit
// ball volume in the slice dimension, the ratio of torus to sub-torus
// volumes, and a sum of (mu - |k|^2)^{(n-r)/2} over the dual sub-lattice
// points inside the threshold.  Agrees with the slice-decomposition leading
// term evaluated on the dual data.
double leading_term_spectral(const FlatTorus& t, const Rat& mu, const Rat& eps,
                             std::int64_t budget = 0);

// Partial density of states: omega_{d-k} * sum over gamma in Z^k with
// |gamma - kpoint| < rho of (rho^2 - |gamma - kpoint|^2)^{(d-k)/2}.
// Requires 0 < k < d and kpoint of length k.
double partial_density_of_states(double rho, const std::vector<double>& kpoint,
                                 int d, int k);

}  // namespace latgeo
