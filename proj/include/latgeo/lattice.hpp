#pragma once

// Full-rank lattices with exact scalar bases, optionally under a non-standard
// ambient inner product (an exact symmetric positive definite Gram matrix).
// Rows of `basis` are the lattice vectors.  The dual basis, Gram matrix and
// covolume are computed exactly and cached at construction.
//
// The ellipsoid enumerator is the shared engine behind point counting, theta
// sums and shortest-vector searches: an exact LDL^T factorization drives a
// Fincke-Pohst recursion whose bounds are evaluated in rigorous outward
// interval arithmetic, so no candidate inside the ellipsoid is ever missed;
// callers make the final exact membership decision per candidate.

#include <cstdint>
#include <functional>
#include <vector>

#include "latgeo/linalg.hpp"

namespace latgeo {

// Default work budget for enumerations (candidate visits); the environment
// variable LATGEO_BUDGET overrides it.
int64_t default_budget();

struct ThetaCheckResult {
  double lhs = 0;         // sum over the lattice of exp(-pi t |x|^2)
  double rhs = 0;         // covol^-1 t^(-n/2) sum over the dual of exp(-pi |y|^2 / t)
  double rel_gap = 0;     // |lhs-rhs| / max(lhs, rhs)
  double tail_bound = 0;  // certified bound on the truncated mass (both sides)
  int64_t terms_lhs = 0;
  int64_t terms_rhs = 0;
};

class Lattice {
 public:
  // phi empty means the standard inner product; otherwise it must be an
  // exact symmetric positive definite n x n matrix.
  static Lattice make(MatS basis, MatS phi = {});

  int dim() const { return n_; }
  const MatS& basis() const { return basis_; }
  const MatS& phi() const { return phi_; }
  bool standard_inner_product() const { return phi_.empty(); }

  const MatS& dual_basis() const { return dual_; }
  Lattice dual() const;
  const MatS& gram() const { return gram_; }

  // covolume^2 = det(Gram), exact; covolume as a double via one sqrt.
  const Scalar& covolume_sq() const { return gram_det_; }
  double covolume() const { return covol_; }

  // inner product of two ambient vectors under phi
  Scalar inner(const VecS& x, const VecS& y) const { return dot_phi(x, phi_, y); }

  VecS embed(const std::vector<int64_t>& coeffs) const;
  std::vector<double> embed_f(const std::vector<int64_t>& coeffs) const;

  // Exact |embed(coeffs)|^2 under phi via the cached Gram matrix.
  Scalar norm_sq(const std::vector<int64_t>& coeffs) const;

  // Poisson-summation self-test at inverse temperature t > 0.  Both sides are
  // truncated where terms drop below 1e-18, with a certified Gaussian tail
  // bound folded into tail_bound.
  ThetaCheckResult theta_check(const Rat& t, int64_t budget = 0) const;

  // All nonzero lattice vectors with |v|_phi <= radius (closed ball), sorted
  // by coefficient vector.  Throws RadiusTooLargeForBudget when the search
  // exceeds the budget.
  std::vector<std::vector<int64_t>> minimal_vectors(const Rat& radius,
                                                    int64_t budget = 0) const;

 private:
  int n_ = 0;
  MatS basis_, phi_, dual_, gram_;
  Scalar gram_det_;
  double covol_ = 0;
};

// Enumerates all integer vectors c with (c-center)^T gram (c-center) <=
// radius2 and feeds them to the callback in deterministic order (last
// coordinate outermost, each range ascending).  Over-inclusion is possible
// (interval slack); under-inclusion is not.  Throws BudgetExceeded when more
// than `budget` candidate visits occur.
struct EllipsoidEnum {
  MatS gram;       // exact SPD quadratic form on coefficient space
  VecS center;     // exact center
  Rat radius2;     // squared radius
  int64_t budget = 0;  // 0: use default_budget()
};

void enumerate_ellipsoid(const EllipsoidEnum& spec,
                         const std::function<void(const std::vector<int64_t>&)>& emit);

}  // namespace latgeo
