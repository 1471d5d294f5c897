#include "latgeo/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "latgeo/error.hpp"
#include "latgeo/qmc.hpp"

namespace latgeo {

namespace {

void check_center(const VecS& c, int expected) {
  if (static_cast<int>(c.size()) != expected || expected < 1)
    fail(ErrorCode::InvalidDims, "domain center has the wrong dimension");
}

// box frame rows for index i (identity when the frame is empty)
VecS box_frame_row(const Domain& s, int i) {
  if (!s.frame.empty()) return s.frame[i];
  VecS row(s.dim, Scalar(0));
  row[i] = Scalar(1);
  return row;
}

bool scalar_is_zero(const Scalar& a) { return compare(a, Scalar(0)) == 0; }

void check_orthonormal_exact(const MatS& rows, int n, ErrorCode code) {
  for (size_t i = 0; i < rows.size(); i++) {
    if (static_cast<int>(rows[i].size()) != n)
      fail(ErrorCode::InvalidDims, "frame row has the wrong dimension");
    for (size_t j = i; j < rows.size(); j++) {
      Scalar d = dot(rows[i], rows[j]);
      if (compare(d, Scalar(i == j ? 1 : 0)) != 0)
        fail(code, "frame rows are not exactly orthonormal");
    }
  }
}

double dot_d(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
  return s;
}

}  // namespace

Domain Domain::ball(VecS center, Scalar radius) {
  Domain d;
  d.kind = DomainKind::Ball;
  d.dim = static_cast<int>(center.size());
  check_center(center, d.dim);
  if (radius.sign() < 0) fail(ErrorCode::NonPositiveParameter, "ball radius must be >= 0");
  d.center = std::move(center);
  d.radius = std::move(radius);
  return d;
}

Domain Domain::ellipsoid(VecS center, MatS shape) {
  Domain d;
  d.kind = DomainKind::Ellipsoid;
  d.dim = static_cast<int>(center.size());
  check_center(center, d.dim);
  if (mat_rows(shape) != d.dim || mat_cols(shape) != d.dim)
    fail(ErrorCode::InvalidDims, "ellipsoid shape matrix has the wrong dimensions");
  for (int i = 0; i < d.dim; i++)
    for (int j = i + 1; j < d.dim; j++)
      if (compare(shape[i][j], shape[j][i]) != 0)
        fail(ErrorCode::InconsistentParameters, "ellipsoid shape matrix not symmetric");
  try {
    MatS l;
    VecS diag;
    ldlt(shape, l, diag);
  } catch (const Error&) {
    fail(ErrorCode::InconsistentParameters, "ellipsoid shape matrix not positive definite");
  }
  d.center = std::move(center);
  d.shape = std::move(shape);
  return d;
}

Domain Domain::box(VecS center, VecS half_widths, MatS frame) {
  Domain d;
  d.kind = DomainKind::Box;
  d.dim = static_cast<int>(center.size());
  check_center(center, d.dim);
  if (static_cast<int>(half_widths.size()) != d.dim)
    fail(ErrorCode::InvalidDims, "box half-width count mismatch");
  for (const Scalar& w : half_widths)
    if (w.sign() < 0) fail(ErrorCode::NonPositiveParameter, "box half-widths must be >= 0");
  if (!frame.empty()) {
    if (mat_rows(frame) != d.dim)
      fail(ErrorCode::InvalidDims, "box frame must have one row per dimension");
    check_orthonormal_exact(frame, d.dim, ErrorCode::NonOrthonormalFrame);
  }
  d.center = std::move(center);
  d.half_widths = std::move(half_widths);
  d.frame = std::move(frame);
  return d;
}

Domain Domain::product(std::vector<MatS> factor_frames, std::vector<Domain> factors) {
  Domain d;
  d.kind = DomainKind::Product;
  if (factor_frames.size() != factors.size() || factors.empty())
    fail(ErrorCode::InconsistentParameters, "product needs one frame per factor");
  if (factor_frames[0].empty() || factor_frames[0][0].empty())
    fail(ErrorCode::InvalidDims, "empty product frame");
  d.dim = static_cast<int>(factor_frames[0][0].size());
  int total = 0;
  for (size_t j = 0; j < factors.size(); j++) {
    int kj = static_cast<int>(factor_frames[j].size());
    if (kj == 0 || factors[j].dim != kj)
      fail(ErrorCode::FrameMismatch, "factor dimension does not match its frame");
    check_orthonormal_exact(factor_frames[j], d.dim, ErrorCode::NonOrthonormalFrame);
    total += kj;
  }
  // pairwise orthogonality across factors
  for (size_t a = 0; a < factors.size(); a++)
    for (size_t b = a + 1; b < factors.size(); b++)
      for (const auto& ra : factor_frames[a])
        for (const auto& rb : factor_frames[b])
          if (!scalar_is_zero(dot(ra, rb)))
            fail(ErrorCode::FrameMismatch, "factor subspaces are not orthogonal");
  if (total != d.dim)
    fail(ErrorCode::BlocksNotSpanning, "factor subspaces do not span the ambient space");
  d.factor_frames = std::move(factor_frames);
  d.factors = std::move(factors);
  return d;
}

Domain Domain::oracle(int dim, std::function<double(const std::vector<double>&)> signed_fn,
                      std::function<double(const std::vector<double>&)> support_fn,
                      double lipschitz, bool strictly_convex) {
  Domain d;
  d.kind = DomainKind::OracleConvex;
  if (dim < 1) fail(ErrorCode::InvalidDims, "oracle domain dimension must be positive");
  if (!signed_fn || !support_fn)
    fail(ErrorCode::InconsistentParameters, "oracle domain needs both oracles");
  if (!(lipschitz > 0))
    fail(ErrorCode::NonPositiveParameter, "oracle Lipschitz bound must be positive");
  d.dim = dim;
  d.oracle_signed = std::move(signed_fn);
  d.oracle_support = std::move(support_fn);
  d.oracle_lipschitz = lipschitz;
  d.oracle_strictly_convex = strictly_convex;
  return d;
}

bool Domain::strictly_convex() const {
  switch (kind) {
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      return true;
    case DomainKind::Box:
      return false;
    case DomainKind::Product:
      return factors.size() == 1 && factors[0].strictly_convex();
    case DomainKind::OracleConvex:
      return oracle_strictly_convex;
  }
  return false;
}

// ---------------------------------------------------------------------------
// classification

namespace {

Region from_exact_excess(const Scalar& diff, const Rat& tol) {
  if (compare(scalar_abs(diff), Scalar(tol)) <= 0) return Region::Boundary;
  return diff.sign() < 0 ? Region::Inside : Region::Outside;
}

Region from_float_excess(double diff, double tol) {
  if (std::abs(diff) <= tol) return Region::Boundary;
  return diff < 0 ? Region::Inside : Region::Outside;
}

// quadratic-form domains share the pattern: interval prefilter, exact fallback
Region classify_quadratic(const Domain& s, const VecS& x, const Rat& tol) {
  DInterval g(0.0);
  int n = s.dim;
  std::vector<DInterval> dx(n);
  for (int i = 0; i < n; i++) dx[i] = x[i].to_interval() - s.center[i].to_interval();
  Scalar tau(1);
  if (s.kind == DomainKind::Ball) {
    for (int i = 0; i < n; i++) g = g + sqr(dx[i]);
    tau = s.radius * s.radius;
  } else {
    auto q = mat_to_interval(s.shape);
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) g = g + dx[i] * q[i][j] * dx[j];
  }
  DInterval tau_i = tau.to_interval();
  DInterval tol_i = to_interval(tol);
  if (g.lo > (tau_i + tol_i).hi) return Region::Outside;
  if (g.hi < (tau_i - tol_i).lo) return Region::Inside;
  // exact escalation
  VecS d(n);
  for (int i = 0; i < n; i++) d[i] = x[i] - s.center[i];
  Scalar ge(0);
  if (s.kind == DomainKind::Ball) {
    for (int i = 0; i < n; i++) ge += d[i] * d[i];
  } else {
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) ge += d[i] * s.shape[i][j] * d[j];
  }
  return from_exact_excess(ge - tau, tol);
}

Region classify_box(const Domain& s, const VecS& x, const Rat& tol) {
  int n = s.dim;
  bool boundary = false;
  for (int i = 0; i < n; i++) {
    VecS row = box_frame_row(s, i);
    Scalar y(0);
    for (int j = 0; j < n; j++) y += row[j] * (x[j] - s.center[j]);
    Scalar diff = scalar_abs(y) - s.half_widths[i];
    Region r = from_exact_excess(diff, tol);
    if (r == Region::Outside) return Region::Outside;
    if (r == Region::Boundary) boundary = true;
  }
  return boundary ? Region::Boundary : Region::Inside;
}

}  // namespace

Region classify(const Domain& s, const VecS& x, const Rat& tol) {
  if (static_cast<int>(x.size()) != s.dim)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  if (tol < 0) fail(ErrorCode::NonPositiveParameter, "tolerance must be >= 0");
  switch (s.kind) {
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      return classify_quadratic(s, x, tol);
    case DomainKind::Box:
      return classify_box(s, x, tol);
    case DomainKind::Product: {
      bool boundary = false;
      for (size_t j = 0; j < s.factors.size(); j++) {
        VecS t(s.factors[j].dim, Scalar(0));
        for (int a = 0; a < s.factors[j].dim; a++) t[a] = dot(s.factor_frames[j][a], x);
        Region r = classify(s.factors[j], t, tol);
        if (r == Region::Outside) return Region::Outside;
        if (r == Region::Boundary) boundary = true;
      }
      return boundary ? Region::Boundary : Region::Inside;
    }
    case DomainKind::OracleConvex:
      return classify_f(s, vec_to_double(x), to_double(tol));
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

Region classify_f(const Domain& s, const std::vector<double>& x, double tol) {
  if (static_cast<int>(x.size()) != s.dim)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  switch (s.kind) {
    case DomainKind::Ball: {
      double g = 0;
      for (int i = 0; i < s.dim; i++) {
        double d = x[i] - s.center[i].to_float();
        g += d * d;
      }
      double r = s.radius.to_float();
      return from_float_excess(g - r * r, tol);
    }
    case DomainKind::Ellipsoid: {
      auto q = mat_to_double(s.shape);
      std::vector<double> d(s.dim);
      for (int i = 0; i < s.dim; i++) d[i] = x[i] - s.center[i].to_float();
      double g = 0;
      for (int i = 0; i < s.dim; i++)
        for (int j = 0; j < s.dim; j++) g += d[i] * q[i][j] * d[j];
      return from_float_excess(g - 1.0, tol);
    }
    case DomainKind::Box: {
      bool boundary = false;
      for (int i = 0; i < s.dim; i++) {
        auto row = vec_to_double(box_frame_row(s, i));
        double y = 0;
        for (int j = 0; j < s.dim; j++) y += row[j] * (x[j] - s.center[j].to_float());
        Region r = from_float_excess(std::abs(y) - s.half_widths[i].to_float(), tol);
        if (r == Region::Outside) return Region::Outside;
        if (r == Region::Boundary) boundary = true;
      }
      return boundary ? Region::Boundary : Region::Inside;
    }
    case DomainKind::Product: {
      bool boundary = false;
      for (size_t j = 0; j < s.factors.size(); j++) {
        std::vector<double> t(s.factors[j].dim, 0.0);
        for (int a = 0; a < s.factors[j].dim; a++)
          t[a] = dot_d(vec_to_double(s.factor_frames[j][a]), x);
        Region r = classify_f(s.factors[j], t, tol);
        if (r == Region::Outside) return Region::Outside;
        if (r == Region::Boundary) boundary = true;
      }
      return boundary ? Region::Boundary : Region::Inside;
    }
    case DomainKind::OracleConvex: {
      double g = s.oracle_signed(x);
      if (!std::isfinite(g)) fail(ErrorCode::OracleFailure, "signed oracle returned non-finite");
      return from_float_excess(g, tol * s.oracle_lipschitz);
    }
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

namespace {

// Certified region of one excess quantity: Outside needs diff > tol surely,
// Inside needs diff < -tol surely, Boundary needs |diff| <= tol surely.
std::optional<Region> excess_region_iv(const DInterval& diff, const DInterval& tol_i) {
  if (diff.lo > tol_i.hi) return Region::Outside;
  if (diff.hi < -tol_i.hi) return Region::Inside;
  if (diff.hi <= tol_i.lo && diff.lo >= -tol_i.lo) return Region::Boundary;
  return std::nullopt;
}

// Conjunction of per-constraint regions: one certain Outside decides, any
// undecided constraint otherwise blocks a definite answer.
std::optional<Region> combine_iv(bool boundary, bool unknown) {
  if (unknown) return std::nullopt;
  return boundary ? Region::Boundary : Region::Inside;
}

}  // namespace

struct IntervalClassifier::Impl {
  DomainKind kind = DomainKind::Ball;
  int dim = 0;
  std::vector<DInterval> center;
  DInterval tau;                                // squared radius (quadratic kinds)
  std::vector<std::vector<DInterval>> shape;    // ellipsoid form
  std::vector<std::vector<DInterval>> rows;     // box frame rows
  std::vector<DInterval> widths;                // box half widths
  std::vector<std::vector<std::vector<DInterval>>> frames;  // product factor frames
  std::vector<Impl> factors;

  static Impl build(const Domain& s) {
    Impl im;
    im.kind = s.kind;
    im.dim = s.dim;
    switch (s.kind) {
      case DomainKind::Ball:
        im.center = vec_to_interval(s.center);
        im.tau = (s.radius * s.radius).to_interval();
        break;
      case DomainKind::Ellipsoid:
        im.center = vec_to_interval(s.center);
        im.tau = DInterval(1.0);
        im.shape = mat_to_interval(s.shape);
        break;
      case DomainKind::Box:
        im.center = vec_to_interval(s.center);
        for (int i = 0; i < s.dim; i++) im.rows.push_back(vec_to_interval(box_frame_row(s, i)));
        im.widths = vec_to_interval(s.half_widths);
        break;
      case DomainKind::Product:
        for (size_t j = 0; j < s.factors.size(); j++) {
          im.frames.push_back(mat_to_interval(s.factor_frames[j]));
          im.factors.push_back(build(s.factors[j]));
        }
        break;
      case DomainKind::OracleConvex:
        break;
    }
    return im;
  }

  std::optional<Region> run(const std::vector<DInterval>& x, const DInterval& tol_i) const {
    switch (kind) {
      case DomainKind::Ball: {
        DInterval g(0.0);
        for (int i = 0; i < dim; i++) g = g + sqr(x[i] - center[i]);
        return excess_region_iv(g - tau, tol_i);
      }
      case DomainKind::Ellipsoid: {
        DInterval g(0.0);
        for (int i = 0; i < dim; i++) {
          DInterval dxi = x[i] - center[i];
          for (int j = 0; j < dim; j++) g = g + dxi * shape[i][j] * (x[j] - center[j]);
        }
        return excess_region_iv(g - tau, tol_i);
      }
      case DomainKind::Box: {
        bool boundary = false, unknown = false;
        for (int i = 0; i < dim; i++) {
          DInterval y(0.0);
          for (int j = 0; j < dim; j++) y = y + rows[i][j] * (x[j] - center[j]);
          auto r = excess_region_iv(abs_iv(y) - widths[i], tol_i);
          if (r && *r == Region::Outside) return Region::Outside;
          if (!r)
            unknown = true;
          else if (*r == Region::Boundary)
            boundary = true;
        }
        return combine_iv(boundary, unknown);
      }
      case DomainKind::Product: {
        bool boundary = false, unknown = false;
        int amb = static_cast<int>(x.size());
        for (size_t j = 0; j < factors.size(); j++) {
          std::vector<DInterval> t(factors[j].dim, DInterval(0.0));
          for (int a = 0; a < factors[j].dim; a++) {
            DInterval acc(0.0);
            for (int b = 0; b < amb; b++) acc = acc + frames[j][a][b] * x[b];
            t[a] = acc;
          }
          auto r = factors[j].run(t, tol_i);
          if (r && *r == Region::Outside) return Region::Outside;
          if (!r)
            unknown = true;
          else if (*r == Region::Boundary)
            boundary = true;
        }
        return combine_iv(boundary, unknown);
      }
      case DomainKind::OracleConvex:
        return std::nullopt;
    }
    return std::nullopt;
  }
};

IntervalClassifier::IntervalClassifier(const Domain& s)
    : impl_(std::make_shared<const Impl>(Impl::build(s))) {}

std::optional<Region> IntervalClassifier::classify(const std::vector<DInterval>& x,
                                                   const Rat& tol) const {
  if (static_cast<int>(x.size()) != impl_->dim)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  if (tol < 0) fail(ErrorCode::NonPositiveParameter, "tolerance must be >= 0");
  return impl_->run(x, to_interval(tol));
}

std::optional<Region> classify_interval(const Domain& s,
                                        const std::vector<DInterval>& x,
                                        const Rat& tol) {
  if (static_cast<int>(x.size()) != s.dim)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  return IntervalClassifier(s).classify(x, tol);
}

// ---------------------------------------------------------------------------
// anisotropic scaling

AnisoMap AnisoMap::make(SubspaceSpec f, const Rat& eps, MatS phi) {
  if (eps <= 0) fail(ErrorCode::NonPositiveParameter, "anisotropy parameter must be positive");
  AnisoMap m;
  m.n = f.ambient_dim;
  m.p = f.dim();
  m.q = m.n - m.p;
  m.eps = eps;
  if (!phi.empty() && (mat_rows(phi) != m.n || mat_cols(phi) != m.n))
    fail(ErrorCode::InvalidDims, "ambient Gram shape mismatch");

  MatS proj;  // orthogonal projector onto F under phi
  if (m.p == 0) {
    proj = mat_zero(m.n, m.n);
  } else {
    const MatS& fr = f.rows;
    MatS frt = mat_transpose(fr);
    MatS fphi = phi.empty() ? fr : mat_mul(fr, phi);
    MatS gram = mat_mul(fphi, frt);
    proj = mat_mul(mat_mul(frt, inverse(gram)), fphi);
  }
  MatS id = mat_identity(m.n);
  MatS comp = mat_sub(id, proj);
  Scalar inv_eps(Rat(1) / eps);
  Scalar eps_s{Rat(eps)};
  m.fwd = mat_add(proj, mat_scale(comp, inv_eps));
  m.inv = mat_add(proj, mat_scale(comp, eps_s));

  if (m.p == m.n)
    m.expanded_rows = {};
  else if (m.p == 0)
    m.expanded_rows = mat_identity(m.n);
  else
    m.expanded_rows = nullspace(phi.empty() ? f.rows : mat_mul(f.rows, phi));
  m.fixed = std::move(f);
  m.phi = std::move(phi);
  return m;
}

VecS apply_aniso(const AnisoMap& m, const VecS& x, bool forward) {
  if (static_cast<int>(x.size()) != m.n)
    fail(ErrorCode::InvalidDims, "point dimension mismatch");
  return mat_vec(forward ? m.fwd : m.inv, x);
}

// ---------------------------------------------------------------------------
// centers, circumradii, bounding boxes

VecS domain_center(const Domain& s) {
  switch (s.kind) {
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
    case DomainKind::Box:
      return s.center;
    case DomainKind::Product: {
      VecS c(s.dim, Scalar(0));
      for (size_t j = 0; j < s.factors.size(); j++) {
        VecS fc = domain_center(s.factors[j]);
        for (int a = 0; a < s.factors[j].dim; a++)
          for (int i = 0; i < s.dim; i++) c[i] += s.factor_frames[j][a][i] * fc[a];
      }
      return c;
    }
    case DomainKind::OracleConvex:
      return VecS(s.dim, Scalar(0));
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

DInterval circumradius_bound(const Domain& s) {
  switch (s.kind) {
    case DomainKind::Ball:
      return s.radius.to_interval();
    case DomainKind::Ellipsoid: {
      MatS qi = inverse(s.shape);
      Scalar trace(0);
      for (int i = 0; i < s.dim; i++) trace += qi[i][i];
      return isqrt(trace.to_interval());
    }
    case DomainKind::Box: {
      Scalar acc(0);
      for (const Scalar& w : s.half_widths) acc += w * w;
      return isqrt(acc.to_interval());
    }
    case DomainKind::Product: {
      DInterval acc(0.0);
      for (const auto& f : s.factors) acc = acc + sqr(circumradius_bound(f));
      return isqrt(acc);
    }
    case DomainKind::OracleConvex: {
      double acc = 0;
      std::vector<double> u(s.dim, 0.0);
      for (int i = 0; i < s.dim; i++) {
        u[i] = 1;
        double hi = s.oracle_support(u);
        u[i] = -1;
        double lo = s.oracle_support(u);
        u[i] = 0;
        if (!std::isfinite(hi) || !std::isfinite(lo))
          fail(ErrorCode::OracleFailure, "support oracle returned non-finite");
        double b = std::max(std::abs(hi), std::abs(lo));
        acc += b * b;
      }
      DInterval out(std::sqrt(acc));
      out.hi = std::nextafter(out.hi * (1 + 1e-12), std::numeric_limits<double>::infinity());
      return out;
    }
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

std::vector<DInterval> bounding_box(const Domain& s) {
  int n = s.dim;
  std::vector<DInterval> out(n, DInterval(0.0));
  switch (s.kind) {
    case DomainKind::Ball: {
      DInterval r = s.radius.to_interval();
      for (int i = 0; i < n; i++) {
        DInterval c = s.center[i].to_interval();
        out[i] = DInterval((c - r).lo, (c + r).hi);
      }
      return out;
    }
    case DomainKind::Ellipsoid: {
      MatS qi = inverse(s.shape);
      for (int i = 0; i < n; i++) {
        DInterval h = isqrt(qi[i][i].to_interval());
        DInterval c = s.center[i].to_interval();
        out[i] = DInterval((c - h).lo, (c + h).hi);
      }
      return out;
    }
    case DomainKind::Box: {
      for (int i = 0; i < n; i++) {
        DInterval acc(0.0);
        for (int j = 0; j < n; j++) {
          VecS row = box_frame_row(s, j);
          acc = acc + s.half_widths[j].to_interval() * abs_iv(row[i].to_interval());
        }
        DInterval c = s.center[i].to_interval();
        out[i] = DInterval((c - acc).lo, (c + acc).hi);
      }
      return out;
    }
    case DomainKind::Product: {
      for (size_t j = 0; j < s.factors.size(); j++) {
        auto fb = bounding_box(s.factors[j]);
        for (int a = 0; a < s.factors[j].dim; a++)
          for (int i = 0; i < n; i++) {
            DInterval w = s.factor_frames[j][a][i].to_interval() * fb[a];
            out[i] = out[i] + w;
          }
      }
      return out;
    }
    case DomainKind::OracleConvex: {
      std::vector<double> u(n, 0.0);
      for (int i = 0; i < n; i++) {
        u[i] = 1;
        double hi = s.oracle_support(u);
        u[i] = -1;
        double lo = -s.oracle_support(u);
        u[i] = 0;
        if (!std::isfinite(hi) || !std::isfinite(lo))
          fail(ErrorCode::OracleFailure, "support oracle returned non-finite");
        out[i] = DInterval::outward(lo, hi);
      }
      return out;
    }
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

std::vector<DInterval> bounding_box(const Domain& s, const AnisoMap& m) {
  if (m.n != s.dim) fail(ErrorCode::InvalidDims, "map dimension mismatch");
  int n = s.dim;
  std::vector<DInterval> out(n, DInterval(0.0));
  switch (s.kind) {
    case DomainKind::Ball: {
      VecS tc = mat_vec(m.fwd, s.center);
      DInterval r = s.radius.to_interval();
      for (int i = 0; i < n; i++) {
        Scalar row_norm_sq(0);
        for (int j = 0; j < n; j++) row_norm_sq += m.fwd[i][j] * m.fwd[i][j];
        DInterval h = r * isqrt(row_norm_sq.to_interval());
        DInterval c = tc[i].to_interval();
        out[i] = DInterval((c - h).lo, (c + h).hi);
      }
      return out;
    }
    case DomainKind::Ellipsoid: {
      VecS tc = mat_vec(m.fwd, s.center);
      MatS qi = inverse(s.shape);
      MatS outer = mat_mul(mat_mul(m.fwd, qi), mat_transpose(m.fwd));
      for (int i = 0; i < n; i++) {
        DInterval h = isqrt(outer[i][i].to_interval());
        DInterval c = tc[i].to_interval();
        out[i] = DInterval((c - h).lo, (c + h).hi);
      }
      return out;
    }
    case DomainKind::Box: {
      VecS tc = mat_vec(m.fwd, s.center);
      std::vector<VecS> edges;
      for (int j = 0; j < n; j++) edges.push_back(mat_vec(m.fwd, box_frame_row(s, j)));
      for (int i = 0; i < n; i++) {
        DInterval acc(0.0);
        for (int j = 0; j < n; j++)
          acc = acc + s.half_widths[j].to_interval() * abs_iv(edges[j][i].to_interval());
        DInterval c = tc[i].to_interval();
        out[i] = DInterval((c - acc).lo, (c + acc).hi);
      }
      return out;
    }
    case DomainKind::Product: {
      auto base = bounding_box(s);
      auto t = mat_to_interval(m.fwd);
      for (int i = 0; i < n; i++) {
        DInterval acc(0.0);
        for (int j = 0; j < n; j++) acc = acc + t[i][j] * base[j];
        out[i] = acc;
      }
      return out;
    }
    case DomainKind::OracleConvex: {
      auto t = mat_to_double(m.fwd);
      for (int i = 0; i < n; i++) {
        std::vector<double> u(n), nu(n);
        for (int j = 0; j < n; j++) {
          u[j] = t[i][j];
          nu[j] = -t[i][j];
        }
        double hi = s.oracle_support(u);
        double lo = -s.oracle_support(nu);
        if (!std::isfinite(hi) || !std::isfinite(lo))
          fail(ErrorCode::OracleFailure, "support oracle returned non-finite");
        DInterval iv = DInterval::outward(lo, hi);
        double pad = 1e-9 * (1 + std::abs(hi) + std::abs(lo));
        iv.lo -= pad;
        iv.hi += pad;
        out[i] = iv;
      }
      return out;
    }
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

// ---------------------------------------------------------------------------
// slice volumes

double unit_ball_volume(int k) {
  if (k < 0) fail(ErrorCode::InvalidDims, "negative dimension");
  double w0 = 1, w1 = 2;
  if (k == 0) return w0;
  if (k == 1) return w1;
  double pi = 3.14159265358979323846;
  for (int j = 2; j <= k; j++) {
    double next = (j % 2 == 0 ? w0 : w1) * 2 * pi / j;
    if (j % 2 == 0)
      w0 = next;
    else
      w1 = next;
  }
  return k % 2 == 0 ? w0 : w1;
}

namespace {

void check_frame_approx(const MatS& frame, int n) {
  for (size_t i = 0; i < frame.size(); i++) {
    if (static_cast<int>(frame[i].size()) != n)
      fail(ErrorCode::InvalidDims, "slice frame row dimension mismatch");
    auto fi = vec_to_double(frame[i]);
    for (size_t j = i; j < frame.size(); j++) {
      double d = dot_d(fi, vec_to_double(frame[j]));
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(d - want) > 1e-9)
        fail(ErrorCode::DegenerateFrame, "slice frame is not orthonormal");
    }
  }
}

// dense symmetric solve + determinant in doubles (k <= 20)
bool solve_sym_d(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x, double& det_out) {
  int k = static_cast<int>(a.size());
  det_out = 1;
  x.assign(k, 0.0);
  std::vector<int> perm(k);
  for (int i = 0; i < k; i++) perm[i] = i;
  for (int col = 0; col < k; col++) {
    int piv = col;
    for (int r = col + 1; r < k; r++)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(b[piv], b[col]);
      det_out = -det_out;
    }
    det_out *= a[col][col];
    for (int r = col + 1; r < k; r++) {
      double f = a[r][col] / a[col][col];
      if (f == 0) continue;
      for (int c = col; c < k; c++) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = k - 1; r >= 0; r--) {
    double s = b[r];
    for (int c = r + 1; c < k; c++) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

SliceResult slice_by_qmc(const Domain& s, const VecS& base, const MatS& frame) {
  int n = s.dim;
  int k = static_cast<int>(frame.size());
  auto bb = bounding_box(s);
  auto base_d = vec_to_double(base);
  std::vector<std::vector<double>> fr;
  for (const auto& row : frame) fr.push_back(vec_to_double(row));
  std::vector<std::pair<double, double>> tbox(k);
  for (int d = 0; d < k; d++) {
    DInterval acc(0.0);
    for (int i = 0; i < n; i++) acc = acc + DInterval(fr[d][i]) * bb[i];
    double off = dot_d(fr[d], base_d);
    tbox[d] = {acc.lo - off, acc.hi - off};
    if (tbox[d].second < tbox[d].first) return {0.0, 0.0};
  }
  auto est = qmc_integrate(tbox, [&](const std::vector<double>& t) {
    std::vector<double> x = base_d;
    for (int d = 0; d < k; d++)
      for (int i = 0; i < n; i++) x[i] += t[d] * fr[d][i];
    return classify_f(s, x, 0.0) == Region::Inside ? 1.0 : 0.0;
  });
  return {est.value, est.stderr_est};
}

SliceResult slice_ball_like(const Domain& s, const VecS& base, const MatS& frame) {
  // works for balls (Q = I / R^2 conceptually) and ellipsoids
  int n = s.dim;
  int k = static_cast<int>(frame.size());
  std::vector<double> d(n);
  for (int i = 0; i < n; i++) d[i] = (base[i] - s.center[i]).to_float();
  if (s.kind == DomainKind::Ball) {
    double r = s.radius.to_float();
    double d2 = dot_d(d, d);
    double proj2 = 0;
    for (const auto& row : frame) {
      double c = dot_d(vec_to_double(row), d);
      proj2 += c * c;
    }
    double delta2 = d2 - proj2;
    double rem = r * r - delta2;
    if (rem <= 0) return {0.0, 0.0};
    return {unit_ball_volume(k) * std::pow(rem, k / 2.0), 0.0};
  }
  auto q = mat_to_double(s.shape);
  std::vector<std::vector<double>> fr;
  for (const auto& row : frame) fr.push_back(vec_to_double(row));
  // restrict the quadratic form to base + span(frame)
  std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k, 0.0);
  double c0 = 0;
  std::vector<double> qd(n, 0.0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) qd[i] += q[i][j] * d[j];
  for (int i = 0; i < n; i++) c0 += d[i] * qd[i];
  for (int u = 0; u < k; u++) {
    b[u] = dot_d(fr[u], qd);
    for (int v = 0; v < k; v++) {
      double acc = 0;
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) acc += fr[u][i] * q[i][j] * fr[v][j];
      a[u][v] = acc;
    }
  }
  std::vector<double> z;
  double det_a = 0;
  if (!solve_sym_d(a, b, z, det_a) || det_a <= 0)
    fail(ErrorCode::DegenerateFrame, "restricted ellipsoid form degenerate");
  double reff2 = 1 - c0 + dot_d(b, z);
  if (reff2 <= 0) return {0.0, 0.0};
  return {unit_ball_volume(k) * std::pow(reff2, k / 2.0) / std::sqrt(det_a), 0.0};
}

SliceResult slice_box(const Domain& s, const VecS& base, const MatS& frame) {
  int n = s.dim;
  int k = static_cast<int>(frame.size());
  if (k == n) {
    double v = 1;
    for (const Scalar& w : s.half_widths) v *= 2 * w.to_float();
    return {v, 0.0};
  }
  // adapted case: every slice row is exactly +- a box frame row
  std::vector<int> matched(n, 0);
  std::vector<int> row_of(k, -1);
  bool adapted = true;
  for (int u = 0; u < k && adapted; u++) {
    bool found = false;
    for (int j = 0; j < n && !found; j++) {
      if (matched[j]) continue;
      VecS bj = box_frame_row(s, j);
      bool eq = true, neq = true;
      for (int i = 0; i < n; i++) {
        if (compare(frame[u][i], bj[i]) != 0) eq = false;
        if (compare(frame[u][i] + bj[i], Scalar(0)) != 0) neq = false;
        if (!eq && !neq) break;
      }
      if (eq || neq) {
        matched[j] = 1;
        row_of[u] = j;
        found = true;
      }
    }
    if (!found) adapted = false;
  }
  if (adapted) {
    // fixed coordinates must sit strictly inside their slabs
    for (int j = 0; j < n; j++) {
      if (matched[j]) continue;
      VecS bj = box_frame_row(s, j);
      Scalar y(0);
      for (int i = 0; i < n; i++) y += bj[i] * (base[i] - s.center[i]);
      if (compare(scalar_abs(y), s.half_widths[j]) >= 0) return {0.0, 0.0};
    }
    double v = 1;
    for (int u = 0; u < k; u++) v *= 2 * s.half_widths[row_of[u]].to_float();
    return {v, 0.0};
  }
  if (k == 1) {
    // clip the line against every slab
    auto u = vec_to_double(frame[0]);
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; j++) {
      auto bj = vec_to_double(box_frame_row(s, j));
      double off = 0;
      for (int i = 0; i < n; i++) off += bj[i] * (base[i].to_float() - s.center[i].to_float());
      double slope = dot_d(bj, u);
      double w = s.half_widths[j].to_float();
      if (std::abs(slope) < 1e-14) {
        if (std::abs(off) >= w) return {0.0, 0.0};
        continue;
      }
      double t1 = (-w - off) / slope, t2 = (w - off) / slope;
      if (t1 > t2) std::swap(t1, t2);
      tlo = std::max(tlo, t1);
      thi = std::min(thi, t2);
    }
    return {std::max(0.0, thi - tlo), 0.0};
  }
  return slice_by_qmc(s, base, frame);
}

SliceResult slice_product(const Domain& s, const VecS& base, const MatS& frame) {
  int k = static_cast<int>(frame.size());
  int nf = static_cast<int>(s.factors.size());
  // try to assign every slice row to exactly one factor
  std::vector<std::vector<int>> rows_of(nf);
  for (int u = 0; u < k; u++) {
    int owner = -1;
    bool clean = true;
    for (int j = 0; j < nf && clean; j++) {
      double mass = 0;
      for (const auto& fr : s.factor_frames[j]) {
        double c = dot_d(vec_to_double(fr), vec_to_double(frame[u]));
        mass += c * c;
      }
      if (mass > 1e-18) {
        if (mass < 1 - 1e-9)
          clean = false;  // row straddles factors
        else if (owner >= 0)
          clean = false;
        else
          owner = j;
      }
    }
    if (!clean || owner < 0) return slice_by_qmc(s, base, frame);
    rows_of[owner].push_back(u);
  }
  double value = 1, rel_var = 0;
  for (int j = 0; j < nf; j++) {
    const Domain& fac = s.factors[j];
    VecS sub_base(fac.dim, Scalar(0));
    for (int a = 0; a < fac.dim; a++) sub_base[a] = dot(s.factor_frames[j][a], base);
    MatS sub_frame;
    for (int u : rows_of[j]) {
      VecS row(fac.dim, Scalar(0));
      for (int a = 0; a < fac.dim; a++) row[a] = dot(s.factor_frames[j][a], frame[u]);
      sub_frame.push_back(std::move(row));
    }
    SliceResult r;
    if (sub_frame.empty()) {
      r.value = classify(fac, sub_base, Rat(0)) == Region::Inside ? 1.0 : 0.0;
      r.stderr_est = 0;
    } else {
      r = slice_volume(fac, sub_base, sub_frame);
    }
    if (r.value == 0) return {0.0, 0.0};
    rel_var += (r.stderr_est / r.value) * (r.stderr_est / r.value);
    value *= r.value;
  }
  return {value, value * std::sqrt(rel_var)};
}

}  // namespace

SliceResult slice_volume(const Domain& s, const VecS& base, const MatS& frame) {
  if (static_cast<int>(base.size()) != s.dim)
    fail(ErrorCode::InvalidDims, "slice base dimension mismatch");
  check_frame_approx(frame, s.dim);
  int k = static_cast<int>(frame.size());
  if (k == 0) return {classify(s, base, Rat(0)) == Region::Inside ? 1.0 : 0.0, 0.0};
  switch (s.kind) {
    case DomainKind::Ball:
    case DomainKind::Ellipsoid:
      return slice_ball_like(s, base, frame);
    case DomainKind::Box:
      return slice_box(s, base, frame);
    case DomainKind::Product:
      return slice_product(s, base, frame);
    case DomainKind::OracleConvex:
      return slice_by_qmc(s, base, frame);
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

// ---------------------------------------------------------------------------
// parallel bodies

std::pair<Domain, Domain> erode_dilate(const Domain& s, const Rat& delta) {
  if (delta < 0) fail(ErrorCode::NonPositiveParameter, "erosion distance must be >= 0");
  switch (s.kind) {
    case DomainKind::Ball: {
      Scalar inner = s.radius - Scalar(delta);
      if (inner.sign() < 0) inner = Scalar(0);
      return {Domain::ball(s.center, inner), Domain::ball(s.center, s.radius + Scalar(delta))};
    }
    case DomainKind::Box: {
      VecS win = s.half_widths, wout = s.half_widths;
      for (size_t i = 0; i < win.size(); i++) {
        win[i] = win[i] - Scalar(delta);
        if (win[i].sign() < 0) win[i] = Scalar(0);
        wout[i] = wout[i] + Scalar(delta);
      }
      return {Domain::box(s.center, win, s.frame), Domain::box(s.center, wout, s.frame)};
    }
    case DomainKind::Product: {
      std::vector<Domain> inner, outer;
      for (const auto& f : s.factors) {
        auto [in_f, out_f] = erode_dilate(f, delta);
        inner.push_back(std::move(in_f));
        outer.push_back(std::move(out_f));
      }
      return {Domain::product(s.factor_frames, inner), Domain::product(s.factor_frames, outer)};
    }
    case DomainKind::Ellipsoid:
    case DomainKind::OracleConvex:
      fail(ErrorCode::UnsupportedKind, "parallel bodies only for balls, boxes and products");
  }
  fail(ErrorCode::InvariantViolation, "unreachable domain kind");
}

}  // namespace latgeo
