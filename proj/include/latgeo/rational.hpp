#pragma once

// Exact integers and rationals.  mpz_class / mpq_class carry the
// arbitrary-precision arithmetic; this header adds parsing, formatting and
// the handful of numeric helpers used throughout the library.  Rationals are
// always kept in canonical form (gcd 1, positive denominator) — mpq_class
// canonicalizes on construction and after every operation we perform.

#include <gmpxx.h>

#include <string>

#include "latgeo/error.hpp"
#include "latgeo/interval.hpp"

namespace latgeo {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p", "-p", "p/q", or a plain decimal like "0.25" into an exact
// rational.  Decimal input is exact (scaled by a power of ten).
Rat parse_rat(const std::string& text);

std::string rat_str(const Rat& x);  // "p" or "p/q"

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

Int floor_rat(const Rat& x);
Int ceil_rat(const Rat& x);
Int round_nearest(const Rat& x);  // half-away-from-zero

Rat pow_rat(const Rat& base, long e);

// Correctly rounded-to-nearest is not guaranteed by mpq_get_d (it truncates),
// but its error is below one ulp, well inside the library-wide 4-ulp budget.
inline double to_double(const Rat& x) { return x.get_d(); }

// Encloses an exact rational in a two-ulp-outward double interval.
inline DInterval to_interval(const Rat& x) {
  double d = x.get_d();
  return DInterval(step_down(d), step_up(d));
}

}  // namespace latgeo
