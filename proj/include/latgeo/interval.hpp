#pragma once

// Small self-contained interval arithmetic over doubles.  Rounding is made
// rigorous by widening every result outward by two ulps instead of toggling
// the FPU rounding mode; that over-covers the at-most-one-ulp error of each
// correctly rounded primitive, so any real number produced by the modeled
// expression is guaranteed to lie inside the interval.

#include <algorithm>
#include <cmath>
#include <limits>

namespace latgeo {

inline double step_down(double x) {
  double y = std::nextafter(x, -std::numeric_limits<double>::infinity());
  return std::nextafter(y, -std::numeric_limits<double>::infinity());
}

inline double step_up(double x) {
  double y = std::nextafter(x, std::numeric_limits<double>::infinity());
  return std::nextafter(y, std::numeric_limits<double>::infinity());
}

struct DInterval {
  double lo = 0.0;
  double hi = 0.0;

  DInterval() = default;
  explicit DInterval(double x) : lo(x), hi(x) {}
  DInterval(double a, double b) : lo(a), hi(b) {}

  static DInterval exact(double x) { return DInterval(x, x); }
  static DInterval outward(double a, double b) {
    return DInterval(step_down(a), step_up(b));
  }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  // Sign is decided only when the interval is strictly one-sided.
  bool positive() const { return lo > 0.0; }
  bool negative() const { return hi < 0.0; }
};

inline DInterval operator+(const DInterval& a, const DInterval& b) {
  return DInterval(step_down(a.lo + b.lo), step_up(a.hi + b.hi));
}

inline DInterval operator-(const DInterval& a, const DInterval& b) {
  return DInterval(step_down(a.lo - b.hi), step_up(a.hi - b.lo));
}

inline DInterval operator-(const DInterval& a) {
  return DInterval(-a.hi, -a.lo);
}

inline DInterval operator*(const DInterval& a, const DInterval& b) {
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  double lo = std::min(std::min(p1, p2), std::min(p3, p4));
  double hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return DInterval(step_down(lo), step_up(hi));
}

inline DInterval operator/(const DInterval& a, const DInterval& b) {
  if (b.contains_zero()) {
    return DInterval(-std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity());
  }
  double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
  double lo = std::min(std::min(p1, p2), std::min(p3, p4));
  double hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return DInterval(step_down(lo), step_up(hi));
}

inline DInterval operator+(const DInterval& a, double b) { return a + DInterval(b); }
inline DInterval operator-(const DInterval& a, double b) { return a - DInterval(b); }
inline DInterval operator*(const DInterval& a, double b) { return a * DInterval(b); }

inline DInterval sqr(const DInterval& a) {
  if (a.lo >= 0.0) return DInterval(step_down(a.lo * a.lo), step_up(a.hi * a.hi));
  if (a.hi <= 0.0) return DInterval(step_down(a.hi * a.hi), step_up(a.lo * a.lo));
  double m = std::max(-a.lo, a.hi);
  return DInterval(0.0, step_up(m * m));
}

// Upper/lower square root of a nonnegative interval; clamps tiny negative
// lows caused by outward widening to zero.
inline DInterval isqrt(const DInterval& a) {
  double lo = a.lo <= 0.0 ? 0.0 : step_down(std::sqrt(a.lo));
  double hi = a.hi <= 0.0 ? 0.0 : step_up(std::sqrt(a.hi));
  if (lo < 0.0) lo = 0.0;
  return DInterval(lo, hi);
}

inline DInterval hull(const DInterval& a, const DInterval& b) {
  return DInterval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline DInterval abs_iv(const DInterval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return DInterval(-a.hi, -a.lo);
  return DInterval(0.0, std::max(-a.lo, a.hi));
}

}  // namespace latgeo
