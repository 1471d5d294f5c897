#include "latgeo/counting.hpp"

#include <cmath>
#include <set>
#include <string>

#include "latgeo/error.hpp"

namespace latgeo {

Rat default_count_tol() { return Rat(1) / 1000000000; }

Scalar multiplier_norm(const Multiplier& t) {
  Scalar nm(1);
  for (const Scalar& a : t.real_parts) nm *= a;
  for (const auto& [re, im] : t.complex_parts) nm *= re * re + im * im;
  return nm;
}

MatS multiplier_matrix(const Multiplier& t) {
  int n = t.dim();
  MatS m = mat_zero(n, n);
  int at = 0;
  for (const Scalar& a : t.real_parts) {
    m[at][at] = a;
    at++;
  }
  for (const auto& [re, im] : t.complex_parts) {
    m[at][at] = re;
    m[at][at + 1] = -im;
    m[at + 1][at] = im;
    m[at + 1][at + 1] = re;
    at += 2;
  }
  return m;
}

namespace {

VecS zero_or_checked(const VecS& v, int n) {
  if (v.empty()) return VecS(n, Scalar(0));
  if (static_cast<int>(v.size()) != n)
    fail(ErrorCode::InvalidDims, "shift vector dimension mismatch");
  return v;
}

bool all_zero(const VecS& v) {
  for (const auto& s : v)
    if (s.sign() != 0) return false;
  return true;
}

// integer bounds of an interval, guarded against unrepresentable ranges
std::pair<std::int64_t, std::int64_t> int_range(const DInterval& iv) {
  double lo = std::ceil(iv.lo), hi = std::floor(iv.hi);
  if (!(lo > -9e17) || !(hi < 9e17))
    fail(ErrorCode::BudgetExceeded, "enumeration range unbounded");
  return {static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

void maybe_sample(CountResult& out, const std::vector<std::int64_t>& coeffs) {
  if (static_cast<int>(out.sample_points.size()) < kCountSampleCap)
    out.sample_points.push_back(coeffs);
}

bool domain_has_oracle(const Domain& s) {
  if (s.kind == DomainKind::OracleConvex) return true;
  for (const auto& f : s.factors)
    if (domain_has_oracle(f)) return true;
  return false;
}

// Classifies z against the open domain and updates the count.  Returns true
// when the point was inside or banded (for sample bookkeeping).
bool tally(CountResult& out, const Domain& s, const VecS& z, const Rat& tol,
           bool exact_kind) {
  Region reg = classify(s, z, tol);
  if (reg == Region::Inside) {
    out.certain++;
    return true;
  }
  if (reg != Region::Boundary) return false;
  if (exact_kind) {
    Region sharp = tol == 0 ? reg : classify(s, z, Rat(0));
    if (sharp == Region::Boundary) {
      out.boundary_exact++;  // provably on the boundary: not in the open set
      return false;
    }
  }
  out.boundary_hits++;
  return true;
}

// Exact enclosure of a small integer as an interval (outward if beyond the
// double-exact range, which enumeration budgets make unreachable in practice).
DInterval int_iv(std::int64_t c) {
  double cd = static_cast<double>(c);
  if (c > (std::int64_t{1} << 53) || c < -(std::int64_t{1} << 53))
    return DInterval::outward(cd, cd);
  return DInterval(cd);
}

// Interval fast path around tally: clear inside/outside points are decided
// without exact arithmetic; only candidates near the tolerance band pay for
// the exact point construction and classification.
template <class MakeExact>
bool tally_fast(CountResult& out, const Domain& s, const IntervalClassifier& cls,
                const std::vector<DInterval>& z_iv, MakeExact&& make_exact,
                const Rat& tol, bool exact_kind) {
  auto fast = cls.classify(z_iv, tol);
  if (fast) {
    if (*fast == Region::Inside) {
      out.certain++;
      return true;
    }
    if (*fast == Region::Outside) return false;
  }
  return tally(out, s, make_exact(), tol, exact_kind);
}

// Enumerates lattice coefficient vectors whose embedded point can lie in
// `image_box`, maps each point back through `inv` (exact), classifies it
// against S - shift_back, and tallies.  Shared by naive and multiplicative.
void box_count(const Lattice& lat, const Domain& s, const MatS& inv, const VecS& v,
               const std::vector<DInterval>& image_box, const Rat& tol,
               std::int64_t budget, CountResult& out) {
  int n = lat.dim();
  if (budget <= 0) budget = default_budget();
  // coefficient of x along basis row i is the pairing with dual row i
  MatS w = lat.standard_inner_product() ? lat.dual_basis()
                                        : mat_mul(lat.dual_basis(), lat.phi());
  auto wi = mat_to_interval(w);
  std::vector<std::int64_t> lo(n), hi(n);
  double estimate = 1;
  for (int i = 0; i < n; i++) {
    DInterval acc(0.0);
    for (int j = 0; j < n; j++) acc = acc + wi[i][j] * image_box[j];
    auto [a, b] = int_range(acc);
    lo[i] = a;
    hi[i] = b;
    if (b < a) return;  // empty coefficient box
    estimate *= static_cast<double>(b - a + 1);
  }
  if (estimate > static_cast<double>(budget))
    fail(ErrorCode::BudgetExceeded,
         "coefficient box holds about " + std::to_string(estimate) +
             " candidates, budget " + std::to_string(budget));
  bool exact_kind = !domain_has_oracle(s);
  IntervalClassifier cls(s);
  // z = sum_i c_i * inv(b_i) - inv(v); precompute the per-basis-vector images
  MatS cols;
  for (int i = 0; i < n; i++) cols.push_back(mat_vec(inv, lat.basis()[i]));
  VecS off = mat_vec(inv, v);
  auto cols_iv = mat_to_interval(cols);
  auto off_iv = vec_to_interval(off);
  std::vector<std::int64_t> c = lo;
  std::vector<DInterval> z_iv(n, DInterval(0.0));
  auto make_exact = [&]() {
    VecS x = lat.embed(c);
    for (int i = 0; i < n; i++) x[i] -= v[i];
    return mat_vec(inv, x);
  };
  while (true) {
    out.points_examined++;
    for (int d = 0; d < n; d++) {
      DInterval acc = -off_iv[d];
      for (int i = 0; i < n; i++) acc = acc + int_iv(c[i]) * cols_iv[i][d];
      z_iv[d] = acc;
    }
    if (tally_fast(out, s, cls, z_iv, make_exact, tol, exact_kind)) maybe_sample(out, c);
    int i = 0;
    while (i < n && ++c[i] > hi[i]) {
      c[i] = lo[i];
      i++;
    }
    if (i == n) break;
  }
}

Rat rat_up(double x) { return Rat(step_up(x)); }
Rat rat_down(double x) { return Rat(step_down(x)); }

std::vector<std::int64_t> narrow_coeffs(const std::vector<Int>& c, bool& ok) {
  std::vector<std::int64_t> out;
  out.reserve(c.size());
  for (const Int& z : c) {
    if (!z.fits_slong_p()) {
      ok = false;
      return {};
    }
    out.push_back(z.get_si());
  }
  ok = true;
  return out;
}

}  // namespace

CountResult count_naive(const Lattice& lat, const Domain& s, const AnisoMap& m,
                        const VecS& v, const Rat& tol, std::int64_t budget) {
  int n = lat.dim();
  if (m.n != n || s.dim != n) fail(ErrorCode::InvalidDims, "dimension mismatch");
  if (tol < 0) fail(ErrorCode::NonPositiveParameter, "tolerance must be >= 0");
  VecS shift = zero_or_checked(v, n);
  CountResult out;
  out.method = CountMethod::Naive;
  out.eps = m.eps;
  auto box = bounding_box(s, m);
  for (int i = 0; i < n; i++) box[i] = box[i] + shift[i].to_interval();
  box_count(lat, s, m.inv, shift, box, tol, budget, out);
  return out;
}

CountResult count_multiplicative(const Lattice& lat, const Multiplier& t,
                                 const Domain& s, const VecS& v, const Rat& tol,
                                 std::int64_t budget) {
  int n = lat.dim();
  if (t.dim() != n || s.dim != n) fail(ErrorCode::InvalidDims, "dimension mismatch");
  if (tol < 0) fail(ErrorCode::NonPositiveParameter, "tolerance must be >= 0");
  Scalar nm = multiplier_norm(t);
  if (nm.sign() == 0) fail(ErrorCode::ZeroNorm, "multiplier has zero norm");
  VecS shift = zero_or_checked(v, n);
  CountResult out;
  out.method = CountMethod::Multiplicative;
  for (const Scalar& a : t.real_parts) out.multiplier.push_back(a.to_float());
  for (const auto& [re, im] : t.complex_parts) {
    out.multiplier.push_back(re.to_float());
    out.multiplier.push_back(im.to_float());
  }
  MatS m = multiplier_matrix(t);
  MatS minv = inverse(m);
  auto base_box = bounding_box(s);
  auto mi = mat_to_interval(m);
  std::vector<DInterval> box(n, DInterval(0.0));
  for (int i = 0; i < n; i++) {
    DInterval acc(0.0);
    for (int j = 0; j < n; j++) acc = acc + mi[i][j] * base_box[j];
    box[i] = acc + shift[i].to_interval();
  }
  box_count(lat, s, minv, shift, box, tol, budget, out);
  return out;
}

CountResult count_sliced(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                         const VecS& v, const Rat& tol, std::int64_t budget) {
  const Lattice& lat = sd.lattice;
  int n = sd.n, r = sd.r, k = n - r;
  if (s.dim != n) fail(ErrorCode::InvalidDims, "dimension mismatch");
  if (tol < 0) fail(ErrorCode::NonPositiveParameter, "tolerance must be >= 0");
  VecS shift = zero_or_checked(v, n);
  if (!all_zero(shift))
    fail(ErrorCode::UnsupportedKind, "sliced counting requires a zero shift");
  if (budget <= 0) budget = default_budget();

  CountResult out;
  out.method = CountMethod::Sliced;
  out.eps = eps;

  AnisoMap aniso = AnisoMap::make(sd.fixed, eps, lat.phi());
  VecS cs = domain_center(s);
  Rat rho_up = rat_up(circumradius_bound(s).hi);

  // the per-slice lattice, pulled back through the inverse scaling
  MatS u;  // k rows spanning T^-1(V-perp) with integer coordinates = Gamma-perp
  for (int j = 0; j < k; j++) u.push_back(mat_vec(aniso.inv, sd.slice_lattice_vecs[j]));
  MatS slice_gram;
  if (k > 0) slice_gram = mat_mul(u, mat_transpose(u));

  std::int64_t remaining = budget;
  bool exact_kind = !domain_has_oracle(s);
  IntervalClassifier cls(s);
  auto u_iv = mat_to_interval(u);

  auto run_slice = [&](const std::vector<Int>& rep_coeffs) {
    // image of the slice representative under the inverse scaling
    VecS x_rep(n, Scalar(0));
    for (int j = 0; j < n; j++) {
      Scalar cj{Rat(rep_coeffs[j])};
      for (int i = 0; i < n; i++) x_rep[i] += cj * lat.basis()[j][i];
    }
    VecS c_m = mat_vec(aniso.inv, x_rep);
    VecS w(n);
    for (int i = 0; i < n; i++) w[i] = cs[i] - c_m[i];
    Scalar w2 = dot(w, w);
    VecS center;
    Scalar resid2(0);
    if (k > 0) {
      VecS b = mat_vec(u, w);
      center = solve(slice_gram, b);
      resid2 = w2 - dot(b, center);
    } else {
      resid2 = w2;
    }
    Rat rad2 = rho_up * rho_up - rat_down(resid2.to_interval().lo);
    if (rad2 < 0) return;  // slice affine span misses the circumball
    out.slices_used++;
    auto c_m_iv = vec_to_interval(c_m);
    EllipsoidEnum spec;
    spec.gram = slice_gram;
    spec.center = center;
    spec.radius2 = rad2;
    spec.budget = remaining;
    std::int64_t visited = 0;
    std::vector<DInterval> z_iv(n, DInterval(0.0));
    enumerate_ellipsoid(spec, [&](const std::vector<std::int64_t>& delta) {
      visited++;
      out.points_examined++;
      for (int i = 0; i < n; i++) {
        DInterval acc = c_m_iv[i];
        for (int j = 0; j < k; j++) acc = acc + int_iv(delta[j]) * u_iv[j][i];
        z_iv[i] = acc;
      }
      auto make_exact = [&]() {
        VecS z = c_m;
        for (int j = 0; j < k; j++)
          for (int i = 0; i < n; i++) z[i] += Scalar(delta[j]) * u[j][i];
        return z;
      };
      if (!tally_fast(out, s, cls, z_iv, make_exact, tol, exact_kind)) return;
      std::vector<Int> full = rep_coeffs;
      for (int j = 0; j < k; j++)
        for (int i = 0; i < n; i++)
          full[i] += Int(static_cast<long>(delta[j])) * sd.slice_lattice_coords[j][i];
      bool ok = false;
      auto narrowed = narrow_coeffs(full, ok);
      if (ok) maybe_sample(out, narrowed);
    });
    remaining -= visited;
    if (remaining <= 0) fail(ErrorCode::BudgetExceeded, "slice enumeration budget exhausted");
  };

  for (const auto& label : slice_window(sd, s, budget)) {
    std::vector<Int> rep(n, Int(0));
    for (int i = 0; i < r; i++)
      for (int j = 0; j < n; j++)
        rep[j] += Int(static_cast<long>(label[i])) * sd.rep_table[i][j];
    run_slice(rep);
  }

  return out;
}

std::vector<std::vector<std::int64_t>> slice_window(const SubspaceSplit& sd,
                                                    const Domain& s,
                                                    std::int64_t budget) {
  int n = sd.n, r = sd.r, k = n - r;
  if (s.dim != n) fail(ErrorCode::InvalidDims, "dimension mismatch");
  if (budget <= 0) budget = default_budget();
  if (r == 0) return {std::vector<std::int64_t>{}};  // one slice: the whole space

  const Lattice& lat = sd.lattice;
  VecS cs = domain_center(s);
  DInterval rho = circumradius_bound(s);
  Rat rho_up = rat_up(rho.hi);
  Rat slack = Rat(1) / 1000000;

  // Window of slice labels: integer combinations m of the slice index basis
  // whose affine slice passes within rho + slack of the domain center.
  const MatS& sv = sd.slice_index_vecs;  // r x n, spans V
  const MatS& wv = sd.slice_lattice_vecs;
  // standard-orthogonal projector away from span(V-perp)
  auto project_away = [&](const VecS& x) -> VecS {
    if (k == 0) return x;
    MatS wwt = mat_mul(wv, mat_transpose(wv));
    VecS t = solve(wwt, mat_vec(wv, x));
    VecS out_v = x;
    for (int i = 0; i < n; i++)
      for (int j = 0; j < k; j++) out_v[i] -= wv[j][i] * t[j];
    return out_v;
  };
  MatS q_rows;  // r x n: rows are projections of the slice index vectors
  for (int i = 0; i < r; i++) q_rows.push_back(project_away(sv[i]));
  MatS label_gram = mat_zero(r, r);
  for (int i = 0; i < r; i++)
    for (int j = 0; j < r; j++) label_gram[i][j] = dot(q_rows[i], sv[j]);
  VecS qcs = project_away(cs);
  VecS label_rhs(r);
  for (int i = 0; i < r; i++) label_rhs[i] = dot(sv[i], qcs);
  VecS label_center = solve(label_gram, label_rhs);
  // the slice family spans the ambient space, so the minimum distance over
  // real labels is exactly zero; anything else is an internal inconsistency
  Scalar label_resid = dot(qcs, cs) - dot(label_rhs, label_center);
  if (label_resid.sign() != 0)
    fail(ErrorCode::InvariantViolation, "slice label least squares must be exact");

  Rat window_r = rho_up + slack;
  EllipsoidEnum label_spec;
  label_spec.gram = label_gram;
  label_spec.center = label_center;
  label_spec.radius2 = window_r * window_r;
  label_spec.budget = budget;
  std::set<std::vector<std::int64_t>> window;
  enumerate_ellipsoid(label_spec, [&](const std::vector<std::int64_t>& m) {
    window.insert(m);
  });

  // Cross-check: labels reachable from the domain's bounding box must either
  // lie in the window or provably miss the circumball.
  auto bb = bounding_box(s);
  MatS pair_rows = lat.standard_inner_product()
                       ? sd.dual_in_f_vecs
                       : mat_mul(sd.dual_in_f_vecs, lat.phi());
  auto pr = mat_to_interval(pair_rows);
  std::vector<std::int64_t> lo(r), hi(r);
  double est = 1;
  for (int i = 0; i < r; i++) {
    DInterval acc(0.0);
    for (int j = 0; j < n; j++) acc = acc + pr[i][j] * bb[j];
    auto [a, b] = int_range(acc);
    lo[i] = a;
    hi[i] = b;
    est = b < a ? 0 : est * static_cast<double>(b - a + 1);
  }
  if (est > 0 && est <= static_cast<double>(budget)) {
    std::vector<std::int64_t> m = lo;
    while (true) {
      if (!window.count(m)) {
        // exact squared distance from the center to this slice
        VecS diff(r);
        for (int i = 0; i < r; i++) diff[i] = Scalar(m[i]) - label_center[i];
        Scalar d2(0);
        for (int i = 0; i < r; i++)
          for (int j = 0; j < r; j++) d2 += diff[i] * label_gram[i][j] * diff[j];
        if (compare(d2, Scalar(rat_down(rho.lo) * rat_down(rho.lo))) <= 0)
          fail(ErrorCode::WindowIncomplete,
               "slice within the domain ball escaped the window");
      }
      int i = 0;
      while (i < r && ++m[i] > hi[i]) {
        m[i] = lo[i];
        i++;
      }
      if (i == r) break;
    }
  }

  return {window.begin(), window.end()};
}

CountResult count(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                  const VecS& v, const Rat& tol, std::int64_t budget) {
  VecS shift = zero_or_checked(v, sd.n);
  if (all_zero(shift)) return count_sliced(sd, s, eps, v, tol, budget);
  AnisoMap m = AnisoMap::make(sd.fixed, eps, sd.lattice.phi());
  return count_naive(sd.lattice, s, m, v, tol, budget);
}

}  // namespace latgeo
