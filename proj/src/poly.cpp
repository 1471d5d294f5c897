#include "latgeo/poly.hpp"

#include <algorithm>
#include <complex>

#include "latgeo/error.hpp"

namespace latgeo {

QPoly poly_trim(QPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

int poly_deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

bool poly_is_zero(const QPoly& p) {
  for (const Rat& c : p)
    if (c != 0) return false;
  return true;
}

QPoly poly_add(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); i++) r[i] += a[i];
  for (size_t i = 0; i < b.size(); i++) r[i] += b[i];
  return poly_trim(std::move(r));
}

QPoly poly_sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); i++) r[i] += a[i];
  for (size_t i = 0; i < b.size(); i++) r[i] -= b[i];
  return poly_trim(std::move(r));
}

QPoly poly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < b.size(); j++) r[i + j] += a[i] * b[j];
  return poly_trim(std::move(r));
}

QPoly poly_scale(const QPoly& a, const Rat& s) {
  if (s == 0) return {};
  QPoly r = a;
  for (Rat& c : r) c *= s;
  return r;
}

QPoly poly_derivative(const QPoly& p) {
  if (p.size() <= 1) return {};
  QPoly r(p.size() - 1);
  for (size_t i = 1; i < p.size(); i++) r[i - 1] = p[i] * Rat(static_cast<long>(i));
  return poly_trim(std::move(r));
}

std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b) {
  if (poly_is_zero(b)) fail(ErrorCode::DivisionByZero, "polynomial division by zero");
  QPoly rem = poly_trim(a);
  int db = poly_deg(b);
  QPoly quot;
  if (poly_deg(rem) >= db) quot.assign(rem.size() - db, Rat(0));
  const Rat& lead = b[db];
  while (poly_deg(rem) >= db) {
    int dr = poly_deg(rem);
    Rat f = rem[dr] / lead;
    quot[dr - db] = f;
    for (int i = 0; i <= db; i++) rem[dr - db + i] -= f * b[i];
    rem = poly_trim(std::move(rem));
  }
  return {poly_trim(std::move(quot)), rem};
}

QPoly poly_monic(const QPoly& p) {
  if (p.empty()) return p;
  return poly_scale(p, Rat(1) / p.back());
}

QPoly poly_gcd(QPoly a, QPoly b) {
  a = poly_trim(std::move(a));
  b = poly_trim(std::move(b));
  while (!b.empty()) {
    QPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : poly_monic(a);
}

Rat poly_eval(const QPoly& p, const Rat& x) {
  Rat acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

DInterval poly_eval(const QPoly& p, const DInterval& x) {
  DInterval acc(0.0, 0.0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + to_interval(*it);
  return acc;
}

int poly_sign_at(const QPoly& p, const Rat& x) {
  Rat v = poly_eval(p, x);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

Rat poly_root_bound(const QPoly& p) {
  QPoly q = poly_trim(p);
  if (q.size() <= 1) return Rat(1);
  Rat m(0);
  const Rat& lead = q.back();
  for (size_t i = 0; i + 1 < q.size(); i++) {
    Rat a = rat_abs(q[i] / lead);
    if (a > m) m = a;
  }
  return m + 1;
}

std::vector<QPoly> sturm_chain(const QPoly& p) {
  std::vector<QPoly> chain;
  QPoly p0 = poly_trim(p);
  if (p0.empty()) return chain;
  chain.push_back(p0);
  QPoly p1 = poly_derivative(p0);
  if (p1.empty()) return chain;
  chain.push_back(p1);
  while (true) {
    QPoly r = poly_divmod(chain[chain.size() - 2], chain.back()).second;
    if (poly_is_zero(r)) break;
    // negate and rescale by a positive factor: sign pattern is what matters
    Rat scale = Rat(-1) / rat_abs(r.back());
    chain.push_back(poly_scale(r, scale));
  }
  return chain;
}

int sturm_variations(const std::vector<QPoly>& chain, const Rat& x) {
  int vars = 0, prev = 0;
  for (const QPoly& f : chain) {
    int s = poly_sign_at(f, x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) vars++;
    prev = s;
  }
  return vars;
}

int sturm_count(const std::vector<QPoly>& chain, const Rat& a, const Rat& b) {
  return sturm_variations(chain, a) - sturm_variations(chain, b);
}

int count_real_roots(const QPoly& p) {
  QPoly q = poly_trim(p);
  if (q.size() <= 1) return 0;
  auto chain = sturm_chain(q);
  Rat b = poly_root_bound(q) + 1;
  return sturm_count(chain, -b, b);
}

namespace {

// Splits (lo, hi) known to hold `count` >= 1 roots (non-root dyadic endpoints).
void isolate_rec(const QPoly& p, const std::vector<QPoly>& chain, const Rat& lo,
                 const Rat& hi, int count, std::vector<RootEnclosure>& out) {
  if (count == 0) return;
  if (count == 1) {
    out.push_back({lo, hi, false});
    return;
  }
  Rat mid = (lo + hi) / 2;
  if (poly_sign_at(p, mid) == 0) {
    // mid is itself a (rational) root; carve out a punctured neighborhood
    Rat delta = (hi - lo) / 4;
    while (poly_sign_at(p, mid - delta) == 0 || poly_sign_at(p, mid + delta) == 0 ||
           sturm_count(chain, mid - delta, mid + delta) != 1)
      delta /= 2;
    int left = sturm_count(chain, lo, mid - delta);
    int right = sturm_count(chain, mid + delta, hi);
    isolate_rec(p, chain, lo, mid - delta, left, out);
    out.push_back({mid, mid, true});
    isolate_rec(p, chain, mid + delta, hi, right, out);
    return;
  }
  int left = sturm_count(chain, lo, mid);
  isolate_rec(p, chain, lo, mid, left, out);
  isolate_rec(p, chain, mid, hi, count - left, out);
}

}  // namespace

std::vector<RootEnclosure> isolate_real_roots(const QPoly& p) {
  QPoly q = poly_trim(p);
  std::vector<RootEnclosure> out;
  if (q.size() <= 1) return out;
  QPoly sf = poly_gcd(q, poly_derivative(q));
  if (poly_deg(sf) > 0) fail(ErrorCode::NotSquarefree, "polynomial has repeated roots");
  auto chain = sturm_chain(q);
  // dyadic outer bound strictly beyond every root
  Rat rb = poly_root_bound(q);
  Rat b(2);
  while (b <= rb) b *= 2;
  int total = sturm_count(chain, -b, b);
  isolate_rec(q, chain, -b, b, total, out);
  std::sort(out.begin(), out.end(),
            [](const RootEnclosure& a, const RootEnclosure& c) { return a.lo < c.lo; });
  return out;
}

void refine_enclosure(const QPoly& p, RootEnclosure& enc, const Rat& max_width) {
  if (enc.exact) return;
  int slo = poly_sign_at(p, enc.lo);
  while (enc.hi - enc.lo > max_width) {
    Rat mid = (enc.lo + enc.hi) / 2;
    int sm = poly_sign_at(p, mid);
    if (sm == 0) {
      enc = {mid, mid, true};
      return;
    }
    if (sm == slo)
      enc.lo = mid;
    else
      enc.hi = mid;
  }
}

CRat crat_add(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
CRat crat_sub(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }

CRat crat_mul(const CRat& a, const CRat& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CRat crat_div(const CRat& a, const CRat& b) {
  Rat d = crat_abs2(b);
  if (d == 0) fail(ErrorCode::DivisionByZero, "complex division by zero");
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Rat crat_abs2(const CRat& a) { return a.re * a.re + a.im * a.im; }

CRat poly_eval(const QPoly& p, const CRat& x) {
  CRat acc{Rat(0), Rat(0)};
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    acc = crat_mul(acc, x);
    acc.re += *it;
  }
  return acc;
}

Rat dyadic_round(const Rat& x, int bits) {
  Int scale = Int(1) << bits;
  return Rat(round_nearest(Rat(x * scale)), scale);
}

DInterval ComplexRoot::re() const {
  double c = to_double(center.re), r = to_double(radius);
  return DInterval(step_down(c - r), step_up(c + r));
}

DInterval ComplexRoot::im() const {
  double c = to_double(center.im), r = to_double(radius);
  return DInterval(step_down(c - r), step_up(c + r));
}

std::vector<ComplexRoot> isolate_complex_roots(const QPoly& p, int num_real) {
  QPoly q = poly_monic(poly_trim(p));
  int d = poly_deg(q);
  int t = (d - num_real) / 2;
  std::vector<ComplexRoot> out;
  if (t == 0) return out;
  if ((d - num_real) % 2 != 0)
    fail(ErrorCode::InvariantViolation, "real root count does not match degree parity");

  // Durand-Kerner in doubles to get all d roots simultaneously.
  std::vector<std::complex<double>> c(d + 1), z(d);
  for (int i = 0; i <= d; i++) c[i] = to_double(q[i]);
  double rb = to_double(poly_root_bound(q));
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> w(1.0, 0.0);
  for (int k = 0; k < d; k++) {
    w *= seed;
    z[k] = w * (0.5 + rb);
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = 0.0;
    for (int i = d; i >= 0; i--) acc = acc * x + c[i];
    return acc;
  };
  for (int iter = 0; iter < 500; iter++) {
    double moved = 0.0;
    for (int k = 0; k < d; k++) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < d; j++)
        if (j != k) denom *= z[k] - z[j];
      std::complex<double> delta = eval(z[k]) / denom;
      z[k] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14) break;
  }

  // keep one representative per conjugate pair
  std::vector<std::complex<double>> reps;
  std::vector<std::complex<double>> sorted(z);
  std::sort(sorted.begin(), sorted.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  for (const auto& r : sorted)
    if (r.imag() > 1e-8) reps.push_back(r);
  if (static_cast<int>(reps.size()) != t)
    fail(ErrorCode::InvariantViolation, "complex root pairing failed");

  QPoly dq = poly_derivative(q);
  for (const auto& r : reps) {
    // doubles are dyadic rationals, so this conversion is exact
    CRat x{dyadic_round(Rat(r.real()), 80), dyadic_round(Rat(r.imag()), 80)};
    // two exact Newton steps take the double seed far below the 2^-64 target
    for (int step = 0; step < 3; step++) {
      CRat num = poly_eval(q, x), den = poly_eval(dq, x);
      x = crat_sub(x, crat_div(num, den));
      x.re = dyadic_round(x.re, 400);
      x.im = dyadic_round(x.im, 400);
    }
    // min distance from x to a true root is at most d*|p(x)/p'(x)|
    Rat num2 = crat_abs2(poly_eval(q, x));
    Rat den2 = crat_abs2(poly_eval(dq, x));
    if (den2 == 0) fail(ErrorCode::InvariantViolation, "derivative vanished at approximation");
    Rat ratio2 = Rat(d) * Rat(d) * num2 / den2;
    // rational upper bound on the square root of ratio2
    Rat radius(1, Int(1) << 64);
    while (radius * radius < ratio2) radius *= 2;
    if (radius > Rat(1, Int(1) << 64))
      fail(ErrorCode::InvariantViolation, "complex root certification too loose");
    out.push_back({x, radius});
  }
  return out;
}

}  // namespace latgeo
