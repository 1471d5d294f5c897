#include "latgeo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "latgeo/error.hpp"

namespace latgeo {

int64_t default_budget() {
  static int64_t cached = [] {
    if (const char* env = std::getenv("LATGEO_BUDGET")) {
      char* end = nullptr;
      long long v = std::strtoll(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<int64_t>(v);
    }
    return static_cast<int64_t>(50000000);
  }();
  return cached;
}

Lattice Lattice::make(MatS basis, MatS phi) {
  Lattice lat;
  lat.n_ = mat_rows(basis);
  if (lat.n_ == 0 || mat_cols(basis) != lat.n_)
    fail(ErrorCode::InvalidDims, "lattice basis must be square and nonempty");
  if (!phi.empty()) {
    if (mat_rows(phi) != lat.n_ || mat_cols(phi) != lat.n_)
      fail(ErrorCode::InvalidDims, "ambient Gram shape mismatch");
    for (int i = 0; i < lat.n_; i++)
      for (int j = i + 1; j < lat.n_; j++)
        if (!(phi[i][j] == phi[j][i]))
          fail(ErrorCode::InconsistentParameters, "ambient Gram not symmetric");
    MatS l;
    VecS d;
    ldlt(phi, l, d);  // certifies positive definiteness
  }
  lat.basis_ = std::move(basis);
  lat.phi_ = std::move(phi);

  MatS bt = mat_transpose(lat.basis_);
  MatS phib = lat.phi_.empty() ? bt : mat_mul(lat.phi_, bt);
  // dual rows satisfy  dual * phi * basis^T = I
  {
    // inverse() throws SingularBasis exactly when the basis is dependent
    try {
      lat.dual_ = inverse(phib);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularBasis)
        fail(ErrorCode::SingularBasis, "lattice basis rows are dependent");
      throw;
    }
  }
  lat.gram_ = mat_mul(lat.basis_, phib);
  lat.gram_det_ = det(lat.gram_);
  if (lat.gram_det_.is_zero() || lat.gram_det_.sign() <= 0)
    fail(ErrorCode::SingularBasis, "Gram determinant not positive");
  lat.covol_ = std::sqrt(lat.gram_det_.to_float());
  return lat;
}

Lattice Lattice::dual() const { return make(dual_, phi_); }

VecS Lattice::embed(const std::vector<int64_t>& coeffs) const {
  if (static_cast<int>(coeffs.size()) != n_)
    fail(ErrorCode::InvalidDims, "coefficient vector length mismatch");
  VecS out(n_, Scalar(0));
  for (int i = 0; i < n_; i++) {
    if (coeffs[i] == 0) continue;
    Scalar c(static_cast<long>(coeffs[i]));
    for (int j = 0; j < n_; j++)
      if (!basis_[i][j].is_zero()) out[j] += c * basis_[i][j];
  }
  return out;
}

std::vector<double> Lattice::embed_f(const std::vector<int64_t>& coeffs) const {
  VecS v = embed(coeffs);
  return vec_to_double(v);
}

Scalar Lattice::norm_sq(const std::vector<int64_t>& coeffs) const {
  Scalar out(0);
  for (int i = 0; i < n_; i++) {
    if (coeffs[i] == 0) continue;
    for (int j = 0; j < n_; j++) {
      if (coeffs[j] == 0) continue;
      out += Scalar(static_cast<long>(coeffs[i])) * Scalar(static_cast<long>(coeffs[j])) *
             gram_[i][j];
    }
  }
  return out;
}

namespace {

struct EnumState {
  int n;
  std::vector<std::vector<DInterval>> l;  // unit lower triangular
  std::vector<DInterval> d;               // positive pivots
  std::vector<DInterval> center;
  DInterval radius2;
  int64_t budget;
  int64_t visits = 0;
  const std::function<void(const std::vector<int64_t>&)>* emit;
  std::vector<int64_t> coeffs;
  // mu[k] = sum over already-fixed levels j>k of L[j][k]*(c_j - t_j)
  std::vector<std::vector<DInterval>> mu_stack;
};

void enum_level(EnumState& st, int level, DInterval used) {
  if (level < 0) {
    (*st.emit)(st.coeffs);
    return;
  }
  DInterval rem = st.radius2 - used;
  if (rem.hi < 0) return;
  if (rem.lo < 0) rem.lo = 0;
  const DInterval& mu = st.mu_stack[level][level];
  DInterval half = isqrt(rem / st.d[level]);
  DInterval lo_b = st.center[level] - mu - half;
  DInterval hi_b = st.center[level] - mu + half;
  int64_t lo = static_cast<int64_t>(std::floor(lo_b.lo));
  int64_t hi = static_cast<int64_t>(std::ceil(hi_b.hi));
  // floor/ceil of infinities would overflow; clamp via the budget instead
  if (!(lo_b.lo > -1e18) || !(hi_b.hi < 1e18))
    fail(ErrorCode::BudgetExceeded, "enumeration range unbounded (degenerate form)");
  for (int64_t c = lo; c <= hi; c++) {
    if (++st.visits > st.budget)
      fail(ErrorCode::BudgetExceeded,
           "enumeration budget exhausted after " + std::to_string(st.visits) + " visits");
    DInterval y = DInterval(static_cast<double>(c)) - st.center[level] + mu;
    DInterval term = st.d[level] * sqr(y);
    DInterval next_used = used + term;
    if (next_used.lo > st.radius2.hi) continue;
    st.coeffs[level] = c;
    if (level > 0) {
      // push updated partial sums for the levels below
      auto& cur = st.mu_stack[level];
      auto& nxt = st.mu_stack[level - 1];
      DInterval dc = DInterval(static_cast<double>(c)) - st.center[level];
      for (int k = 0; k < level; k++) nxt[k] = cur[k] + st.l[level][k] * dc;
    }
    enum_level(st, level - 1, next_used);
  }
}

}  // namespace

void enumerate_ellipsoid(const EllipsoidEnum& spec,
                         const std::function<void(const std::vector<int64_t>&)>& emit) {
  int n = mat_rows(spec.gram);
  if (spec.radius2 < 0) return;
  if (n == 0) {
    // zero-dimensional form: the origin is the only point and q() = 0
    std::vector<int64_t> empty;
    emit(empty);
    return;
  }
  MatS l;
  VecS d;
  ldlt(spec.gram, l, d);

  EnumState st;
  st.n = n;
  st.l = mat_to_interval(l);
  st.d.reserve(n);
  for (const Scalar& s : d) st.d.push_back(s.to_interval());
  st.center = spec.center.empty() ? std::vector<DInterval>(n, DInterval(0.0))
                                  : vec_to_interval(spec.center);
  if (static_cast<int>(st.center.size()) != n)
    fail(ErrorCode::InvalidDims, "enumeration center length mismatch");
  st.radius2 = to_interval(spec.radius2);
  st.budget = spec.budget > 0 ? spec.budget : default_budget();
  st.emit = &emit;
  st.coeffs.assign(n, 0);
  st.mu_stack.assign(n, std::vector<DInterval>(n, DInterval(0.0)));
  enum_level(st, n - 1, DInterval(0.0));
}

ThetaCheckResult Lattice::theta_check(const Rat& t, int64_t budget) const {
  if (t <= 0) fail(ErrorCode::NonPositiveParameter, "theta parameter must be positive");
  ThetaCheckResult res;
  double td = to_double(t);
  const double log_cutoff = 41.5;  // exp(-41.5) < 1e-18
  double pi = 3.14159265358979323846;

  // primal: window 2x the term cutoff so the certified tail factor is 1e-18
  double xp = log_cutoff / (pi * td);
  Rat xenum = Rat(static_cast<long>(std::ceil(2 * xp * 16))) / 16;
  double lhs = 0, lhs_c = 0, half = 0;
  int64_t nterm = 0;
  auto gd = mat_to_double(gram_);
  auto qform = [&](const std::vector<int64_t>& c) {
    double q = 0;
    for (int i = 0; i < n_; i++) {
      if (c[i] == 0) continue;
      for (int j = 0; j < n_; j++)
        if (c[j] != 0) q += static_cast<double>(c[i]) * static_cast<double>(c[j]) * gd[i][j];
    }
    return q;
  };
  lhs = 0;
  enumerate_ellipsoid({gram_, {}, xenum, budget}, [&](const std::vector<int64_t>& c) {
    double q = qform(c);
    double term = std::exp(-pi * td * q);
    // Kahan summation keeps the accumulation error near one ulp
    double y = term - lhs_c;
    double s = lhs + y;
    lhs_c = (s - lhs) - y;
    lhs = s;
    half += std::exp(-pi * td * q / 2);
    nterm++;
  });
  res.lhs = lhs;
  res.terms_lhs = nterm;

  // dual side
  Lattice du = dual();
  double xd = log_cutoff * td / pi;
  Rat xenum_d = Rat(static_cast<long>(std::ceil(2 * xd * 16)) + 1) / 16;
  auto gdd = mat_to_double(du.gram());
  double rhs = 0, rhs_c = 0, half_d = 0;
  int64_t nterm_d = 0;
  enumerate_ellipsoid({du.gram(), {}, xenum_d, budget}, [&](const std::vector<int64_t>& c) {
    double q = 0;
    for (int i = 0; i < n_; i++) {
      if (c[i] == 0) continue;
      for (int j = 0; j < n_; j++)
        if (c[j] != 0) q += static_cast<double>(c[i]) * static_cast<double>(c[j]) * gdd[i][j];
    }
    double term = std::exp(-pi * q / td);
    double y = term - rhs_c;
    double s = rhs + y;
    rhs_c = (s - rhs) - y;
    rhs = s;
    half_d += std::exp(-pi * q / (2 * td));
    nterm_d++;
  });
  double scale = 1.0 / (covol_ * std::pow(td, n_ / 2.0));
  res.rhs = scale * rhs;
  res.terms_rhs = nterm_d;
  res.rel_gap = std::abs(res.lhs - res.rhs) / std::max(res.lhs, res.rhs);
  // terms outside the enumerated window are dominated by exp(-half window)
  // times the half-temperature sums
  double tail_p = std::exp(-pi * td * xp) * (half + 1.0);
  double tail_d = scale * std::exp(-pi * xd / td) * (half_d + 1.0);
  res.tail_bound = tail_p + tail_d;
  return res;
}

std::vector<std::vector<int64_t>> Lattice::minimal_vectors(const Rat& radius,
                                                           int64_t budget) const {
  if (radius <= 0) fail(ErrorCode::NonPositiveParameter, "radius must be positive");
  Rat r2 = radius * radius;
  std::vector<std::vector<int64_t>> out;
  try {
    enumerate_ellipsoid({gram_, {}, r2, budget}, [&](const std::vector<int64_t>& c) {
      bool zero = true;
      for (int64_t x : c)
        if (x != 0) {
          zero = false;
          break;
        }
      if (zero) return;
      // exact membership: |v|^2 <= r^2
      Scalar q = norm_sq(c);
      if (compare(q, Scalar(r2)) <= 0) out.push_back(c);
    });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BudgetExceeded)
      fail(ErrorCode::RadiusTooLargeForBudget, e.what());
    throw;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace latgeo
