#include "latgeo/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "latgeo/error.hpp"

namespace latgeo {

namespace {

// Exact square root of a nonnegative rational when numerator and denominator
// are both perfect squares.
bool exact_sqrt(const Rat& x, Rat& out) {
  if (x < 0) return false;
  mpz_class num = x.get_num(), den = x.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  out = Rat(sn) / Rat(sd);
  return true;
}

// Orthonormal frame of the span of the slice lattice.  Orthogonalization is
// exact; each row is normalized exactly when its squared norm is a rational
// perfect square (keeping axis-aligned slices exactly adapted to box faces)
// and numerically otherwise.
MatS slice_frame(const SubspaceSplit& sd) {
  int n = sd.n, k = n - sd.r;
  MatS frame;
  if (sd.r == 0) {
    for (int i = 0; i < n; i++) {
      VecS row(n, Scalar(0));
      row[i] = Scalar(1);
      frame.push_back(row);
    }
    return frame;
  }
  MatS u;
  for (int i = 0; i < k; i++) {
    VecS v = sd.slice_lattice_vecs[i];
    for (size_t j = 0; j < u.size(); j++) {
      Scalar c = dot(v, u[j]) / dot(u[j], u[j]);
      for (int a = 0; a < n; a++) v[a] -= c * u[j][a];
    }
    u.push_back(std::move(v));
  }
  for (int i = 0; i < k; i++) {
    Scalar nrm2 = dot(u[i], u[i]);
    Rat nr2, nrm;
    VecS row(n, Scalar(0));
    if (nrm2.try_rational(nr2) && exact_sqrt(nr2, nrm)) {
      Scalar inv = Scalar(Rat(1) / nrm);
      for (int a = 0; a < n; a++) row[a] = u[i][a] * inv;
    } else {
      double inv = 1.0 / std::sqrt(nrm2.to_float());
      for (int a = 0; a < n; a++) row[a] = Scalar(Rat(u[i][a].to_float() * inv));
    }
    frame.push_back(std::move(row));
  }
  return frame;
}

// eps^{-q} by repeated division, so halving eps scales the result by exactly
// 2^q in floating point.
double inv_power(const Rat& eps, int q) {
  double e = to_double(eps);
  double out = 1.0;
  for (int i = 0; i < q; i++) out /= e;
  return out;
}

}  // namespace

PredictedBound predicted_exponent(const RegimeClass& rc) {
  if (rc.n < 1 || rc.p < 0 || rc.q < 1 || rc.n != rc.p + rc.q)
    fail(ErrorCode::InconsistentParameters, "regime dimensions must satisfy n = p + q, q >= 1");
  if (rc.r < 0 || rc.r > rc.p)
    fail(ErrorCode::InconsistentParameters, "slice label rank must lie in [0, p]");
  if (rc.kind != RegimeKind::AlgebraicProduct &&
      (rc.ell != 0 || rc.places_real != 0 || rc.places_complex != 0))
    fail(ErrorCode::InconsistentParameters,
         "degenerate-factor and embedding counts apply only to the algebraic product regime");
  PredictedBound b;
  switch (rc.kind) {
    case RegimeKind::SmoothSlices:
      b.power = 1.0 / (rc.p - rc.r + 1) - rc.q;
      break;
    case RegimeKind::FiberStrictlyConvex:
      b.power = 2.0 * rc.q / (rc.q + 1 + 2 * (rc.p - rc.r)) - rc.q;
      break;
    case RegimeKind::SliceStrictlyConvex:
      b.power = 2.0 * rc.q / (rc.n - rc.r + 1) - rc.q;
      break;
    case RegimeKind::BoxAdmissible:
      b.log_degree = rc.n - rc.r - 1;
      break;
    case RegimeKind::AlgebraicProduct: {
      int m = rc.n - rc.r - rc.ell;
      if (rc.ell < 0 || m < 0 || rc.places_real < 0 || rc.places_complex < 0)
        fail(ErrorCode::InconsistentParameters,
             "algebraic product needs 0 <= ell <= n - r and nonnegative embedding counts");
      b.power = -static_cast<double>(rc.q) * m / (m + 2);
      b.log_degree = rc.places_real + rc.places_complex;
      b.log_margin = 0.1;
      break;
    }
  }
  return b;
}

double leading_term(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                    std::int64_t budget) {
  if (eps <= 0) fail(ErrorCode::NonPositiveParameter, "expansion parameter must be positive");
  if (s.dim != sd.n) fail(ErrorCode::InvalidDims, "dimension mismatch");
  MatS frame = slice_frame(sd);
  double sum = 0.0;
  for (const auto& label : slice_window(sd, s, budget)) {
    VecS base(sd.n, Scalar(0));
    for (int i = 0; i < sd.r; i++) {
      Scalar li{static_cast<long>(label[i])};
      for (int j = 0; j < sd.n; j++) base[j] += li * sd.slice_index_vecs[i][j];
    }
    sum += slice_volume(s, base, frame).value;
  }
  // Density of slice-lattice points per standard volume: the slice sections
  // are measured in coordinate space, so the divisor is the standard-metric
  // covolume of the slice lattice even when the ambient product is not.
  int w = static_cast<int>(sd.slice_lattice_vecs.size());
  MatS gram(w, VecS(w));
  for (int i = 0; i < w; i++)
    for (int j = 0; j < w; j++)
      gram[i][j] = dot(sd.slice_lattice_vecs[i], sd.slice_lattice_vecs[j]);
  double covol = w == 0 ? 1.0 : std::sqrt(det(gram).to_float());
  return inv_power(eps, sd.q) * sum / covol;
}

DInterval remainder(const SubspaceSplit& sd, const Domain& s, const Rat& eps,
                    const CountResult& count, std::int64_t budget) {
  double lt = leading_term(sd, s, eps, budget);
  double lo = static_cast<double>(count.certain) - lt;
  double hi = static_cast<double>(count.certain + count.boundary_hits) - lt;
  return DInterval(lo, hi);
}

RemainderScan fit_scan_rows(std::vector<ScanRow> rows, const RegimeClass& regime) {
  if (rows.empty())
    fail(ErrorCode::InconsistentParameters, "scan needs at least one eps value");
  for (const ScanRow& row : rows)
    if (row.eps <= 0)
      fail(ErrorCode::NonPositiveParameter, "expansion parameter must be positive");
  std::sort(rows.begin(), rows.end(),
            [](const ScanRow& a, const ScanRow& b) { return a.eps > b.eps; });
  for (size_t i = 1; i < rows.size(); i++)
    if (rows[i].eps == rows[i - 1].eps)
      fail(ErrorCode::InconsistentParameters, "eps values must be distinct");

  RemainderScan out;
  out.regime = regime;
  out.predicted = predicted_exponent(regime);
  for (ScanRow& row : rows) {
    // below half a point the remainder is dominated by count quantization
    row.used_in_fit = row.rem_lo >= 0.5 || row.rem_hi <= -0.5;
  }
  out.rows = std::move(rows);

  std::vector<double> xs, ys, ls;
  for (const ScanRow& row : out.rows) {
    if (!row.used_in_fit) continue;
    double e = to_double(row.eps);
    double mid = 0.5 * (row.rem_lo + row.rem_hi);
    xs.push_back(-std::log(e));
    ys.push_back(std::log(std::abs(mid)));
    ls.push_back(1.0 + std::abs(std::log2(e)));
  }
  if (xs.size() < 4)
    fail(ErrorCode::TooFewUsableRows,
         "only " + std::to_string(xs.size()) + " rows usable for the fit, need 4");

  double m = static_cast<double>(xs.size());
  double xbar = 0, ybar = 0;
  for (size_t i = 0; i < xs.size(); i++) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); i++) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  double slope = sxy / sxx;  // growth exponent in log(1/eps)
  double intercept = ybar - slope * xbar;
  out.fit.beta = -slope;
  out.fit.constant = std::exp(intercept);
  out.fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);

  char note[256];
  const double slack = 0.15;
  if (out.predicted.log_form()) {
    out.fit.log_form = true;
    out.fit.log_degree = out.predicted.total_log_degree();
    double acc = 0;
    for (size_t i = 0; i < ys.size(); i++) acc += ys[i] - out.fit.log_degree * std::log(ls[i]);
    out.fit.constant = std::exp(acc / m);
    out.verdict = std::abs(out.fit.beta) <= slack;
    std::snprintf(note, sizeof(note),
                  "fitted power slope %.4f vs 0 required for a log-class remainder "
                  "(slack %.2f); envelope constant %.4g at log degree %.2f",
                  out.fit.beta, slack, out.fit.constant, out.fit.log_degree);
  } else {
    out.verdict = out.fit.beta >= out.predicted.power - slack;
    std::snprintf(note, sizeof(note),
                  "fitted exponent %.4f vs predicted %.4f (one-sided, slack %.2f)",
                  out.fit.beta, out.predicted.power, slack);
  }
  out.verdict_note = note;
  return out;
}

RemainderScan scan_and_fit(const SubspaceSplit& sd, const Domain& s,
                           std::vector<Rat> eps_list, const RegimeClass& regime,
                           const Rat& tol, std::int64_t budget) {
  if (eps_list.empty())
    fail(ErrorCode::InconsistentParameters, "scan needs at least one eps value");
  for (const Rat& e : eps_list)
    if (e <= 0) fail(ErrorCode::NonPositiveParameter, "expansion parameter must be positive");
  std::sort(eps_list.begin(), eps_list.end(), [](const Rat& a, const Rat& b) { return a > b; });
  for (size_t i = 1; i < eps_list.size(); i++)
    if (eps_list[i] == eps_list[i - 1])
      fail(ErrorCode::InconsistentParameters, "eps values must be distinct");

  std::vector<ScanRow> rows;
  for (const Rat& e : eps_list) {
    CountResult c = count_sliced(sd, s, e, {}, tol, budget);
    double lt = leading_term(sd, s, e, budget);
    ScanRow row;
    row.eps = e;
    row.certain = c.certain;
    row.boundary_hits = c.boundary_hits;
    row.leading = lt;
    row.rem_lo = static_cast<double>(c.certain) - lt;
    row.rem_hi = static_cast<double>(c.certain + c.boundary_hits) - lt;
    rows.push_back(row);
  }
  return fit_scan_rows(std::move(rows), regime);
}

}  // namespace latgeo
