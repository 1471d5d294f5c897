#pragma once

// Bounded open domains with exact membership classification, anisotropic
// scaling maps, rigorous bounding boxes, and lower-dimensional slice volumes.
//
// All analytic domains are open: membership uses strict inequalities, and
// points exactly on the boundary are reported as their own category rather
// than silently assigned to either side.  Classification of exact points is
// an exact decision (an interval prefilter handles the easy bulk, escalating
// to certified scalar comparisons only near the boundary).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "latgeo/interval.hpp"
#include "latgeo/linalg.hpp"
#include "latgeo/splitter.hpp"

namespace latgeo {

enum class Region { Inside, Boundary, Outside };

enum class DomainKind { Ball, Ellipsoid, Box, Product, OracleConvex };

struct Domain {
  DomainKind kind = DomainKind::Ball;
  int dim = 0;

  VecS center;       // ball / ellipsoid / box
  Scalar radius{0};  // ball
  MatS shape;        // ellipsoid: membership (x-c)^T Q (x-c) < 1, Q exact SPD
  VecS half_widths;  // box
  MatS frame;        // box: exactly orthonormal rows (n of them)

  std::vector<MatS> factor_frames;  // product: orthonormal rows per factor
  std::vector<Domain> factors;      // factor domains in their own coordinates

  // signed membership: negative inside, positive outside, magnitudes roughly
  // proportional to distance (scaled by lipschitz)
  std::function<double(const std::vector<double>&)> oracle_signed;
  // support function, positively homogeneous: max over the domain of <x, u>
  std::function<double(const std::vector<double>&)> oracle_support;
  double oracle_lipschitz = 1.0;
  bool oracle_strictly_convex = false;

  static Domain ball(VecS center, Scalar radius);
  static Domain ellipsoid(VecS center, MatS shape);
  // empty frame = axis-aligned
  static Domain box(VecS center, VecS half_widths, MatS frame = {});
  static Domain product(std::vector<MatS> factor_frames, std::vector<Domain> factors);
  static Domain oracle(int dim, std::function<double(const std::vector<double>&)> signed_fn,
                       std::function<double(const std::vector<double>&)> support_fn,
                       double lipschitz, bool strictly_convex);

  bool strictly_convex() const;
};

// Exact-point classification with a symmetric tolerance band on the defining
// quantity (squared radius for balls, quadratic form for ellipsoids, largest
// coordinate excess for boxes).  tol = 0 makes Boundary mean "exactly on".
Region classify(const Domain& s, const VecS& x, const Rat& tol = Rat(0));
// Floating-point variant for sampled points.
Region classify_f(const Domain& s, const std::vector<double>& x, double tol);
// Certified interval classification: returns a region only when the interval
// box proves it, std::nullopt when undecided (callers then escalate to the
// exact path).  Oracle-backed domains are never decided here.  The class form
// precomputes interval images of the domain data once, so enumeration loops
// can query millions of points without repeated exact-to-float conversion.
class IntervalClassifier {
 public:
  explicit IntervalClassifier(const Domain& s);
  std::optional<Region> classify(const std::vector<DInterval>& x,
                                 const Rat& tol) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

std::optional<Region> classify_interval(const Domain& s,
                                        const std::vector<DInterval>& x,
                                        const Rat& tol);

// The anisotropic scaling fixing F and stretching its orthogonal complement
// by 1/eps (forward) or eps (inverse).  Matrices are exact.
struct AnisoMap {
  SubspaceSpec fixed;  // F
  MatS expanded_rows;  // H = F^perp under the ambient form
  Rat eps{1};
  MatS phi;  // ambient Gram (empty = standard)
  int n = 0, p = 0, q = 0;
  MatS fwd, inv;

  static AnisoMap make(SubspaceSpec f, const Rat& eps, MatS phi = {});
};

VecS apply_aniso(const AnisoMap& m, const VecS& x, bool forward);

// Outward-rounded circumradius bound around the domain's own center point.
DInterval circumradius_bound(const Domain& s);
// The domain's center point (origin of the bound above) as exact scalars.
VecS domain_center(const Domain& s);

// Axis-aligned interval box containing the domain (resp. its image under the
// map).  Rigorous: outward rounding only ever enlarges the box.
std::vector<DInterval> bounding_box(const Domain& s);
std::vector<DInterval> bounding_box(const Domain& s, const AnisoMap& m);

struct SliceResult {
  double value = 0;
  double stderr_est = 0;  // 0 for analytic cases
};

// Volume of the intersection with the affine subspace base + span(frame
// rows); the frame must be orthonormal (within 1e-9).  Analytic for balls,
// ellipsoids, adapted boxes and adapted products; quasi-Monte Carlo with a
// reported standard error otherwise.
SliceResult slice_volume(const Domain& s, const VecS& base, const MatS& frame);

// Inner and outer parallel bodies at distance delta (products handled
// factorwise, which brackets conservatively in both directions).
std::pair<Domain, Domain> erode_dilate(const Domain& s, const Rat& delta);

// Volume of the k-dimensional unit ball.
double unit_ball_volume(int k);

}  // namespace latgeo
