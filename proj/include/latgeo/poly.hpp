#pragma once

// Dense univariate polynomials over Q.  Coefficient vector is indexed by
// degree; the zero polynomial is the empty vector.  These are the workhorse
// routines behind number fields: exact arithmetic, Sturm sequences, and
// certified real/complex root isolation with rational (dyadic) endpoints.

#include <utility>
#include <vector>

#include "latgeo/interval.hpp"
#include "latgeo/rational.hpp"

namespace latgeo {

using QPoly = std::vector<Rat>;

QPoly poly_trim(QPoly p);                 // strip trailing zeros
int poly_deg(const QPoly& p);             // -1 for the zero polynomial
bool poly_is_zero(const QPoly& p);
QPoly poly_add(const QPoly& a, const QPoly& b);
QPoly poly_sub(const QPoly& a, const QPoly& b);
QPoly poly_mul(const QPoly& a, const QPoly& b);
QPoly poly_scale(const QPoly& a, const Rat& s);
QPoly poly_derivative(const QPoly& p);
// Euclidean division over Q; returns {quotient, remainder}.
std::pair<QPoly, QPoly> poly_divmod(const QPoly& a, const QPoly& b);
QPoly poly_monic(const QPoly& p);
QPoly poly_gcd(QPoly a, QPoly b);         // monic gcd, 1 for coprime
Rat poly_eval(const QPoly& p, const Rat& x);
DInterval poly_eval(const QPoly& p, const DInterval& x);
int poly_sign_at(const QPoly& p, const Rat& x);

// Cauchy bound: every real or complex root has magnitude < the returned value.
Rat poly_root_bound(const QPoly& p);

// Sturm machinery.  The chain is sign-normalized (each remainder scaled by a
// positive rational), which preserves sign-variation counts while keeping
// coefficients small.
std::vector<QPoly> sturm_chain(const QPoly& p);
int sturm_variations(const std::vector<QPoly>& chain, const Rat& x);
// Number of distinct real roots in (a, b]; requires a squarefree input chain.
int sturm_count(const std::vector<QPoly>& chain, const Rat& a, const Rat& b);
int count_real_roots(const QPoly& p);

// One isolated real root.  If exact, lo == hi is the root itself; otherwise
// lo < root < hi, the endpoints are dyadic non-roots and p changes sign.
struct RootEnclosure {
  Rat lo, hi;
  bool exact = false;

  Rat mid() const { return exact ? lo : Rat((lo + hi) / 2); }
  Rat width() const { return exact ? Rat(0) : Rat(hi - lo); }
  DInterval to_interval() const {
    double a = to_double(lo), b = to_double(hi);
    return DInterval(step_down(a), step_up(b));
  }
};

// All real roots of a squarefree polynomial, ascending, pairwise disjoint.
std::vector<RootEnclosure> isolate_real_roots(const QPoly& p);
// Shrinks an enclosure below the requested width by sign bisection.
void refine_enclosure(const QPoly& p, RootEnclosure& enc, const Rat& max_width);

// Exact complex rationals, used for polishing complex root approximations.
struct CRat {
  Rat re, im;
};
CRat crat_add(const CRat& a, const CRat& b);
CRat crat_sub(const CRat& a, const CRat& b);
CRat crat_mul(const CRat& a, const CRat& b);
CRat crat_div(const CRat& a, const CRat& b);
Rat crat_abs2(const CRat& a);
CRat poly_eval(const QPoly& p, const CRat& x);

// One member of a conjugate pair of complex roots (imaginary part > 0).
// center is certified to be within `radius` of a true root, and the disks of
// distinct pairs are disjoint.
struct ComplexRoot {
  CRat center;
  Rat radius;
  DInterval re() const;
  DInterval im() const;
};

// Certified conjugate-pair representatives for a squarefree polynomial with
// the given number of real roots; radius is at most 2^-64.
std::vector<ComplexRoot> isolate_complex_roots(const QPoly& p, int num_real);

// Rounds to denominator 2^bits; keeps Newton iterates from ballooning.
Rat dyadic_round(const Rat& x, int bits);

}  // namespace latgeo
