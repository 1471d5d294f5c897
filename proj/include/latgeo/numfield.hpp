#pragma once

// A real-embeddable algebraic number field Q(theta) presented by a monic
// integer minimal polynomial.  Analysis isolates all roots with certified
// enclosures: real roots as exact dyadic sign-change intervals (Sturm +
// bisection), complex roots as certified disks.  The field object is
// immutable after construction and safe to share across threads.

#include <memory>
#include <string>
#include <vector>

#include "latgeo/poly.hpp"

namespace latgeo {

struct NumberField {
  QPoly minpoly;      // monic, integer coefficients, squarefree
  int degree = 0;     // d
  int num_real = 0;   // s: real embeddings, ordered ascending
  int num_complex = 0;  // t: conjugate pairs, ordered by (re, im)

  // real root enclosures refined to width <= 2^-64
  std::vector<RootEnclosure> real_roots;
  // complex conjugate-pair representatives (im > 0), radius <= 2^-64
  std::vector<ComplexRoot> complex_roots;

  // theta^(d+k) in the power basis for k = 0..d-2, so products reduce by
  // table lookup instead of repeated division
  std::vector<std::vector<Rat>> reduction;

  std::string describe() const;
};

using FieldPtr = std::shared_ptr<const NumberField>;

// Validates (monic, integer, squarefree, degree >= 2), runs best-effort
// reducibility detection (integer roots at any degree; quadratic splits at
// degree 4), isolates all roots, and precomputes the reduction table.
// Irreducibility beyond those checks is the caller's assertion.
FieldPtr analyze_field(const QPoly& minpoly);

// Convenience: coefficients c0..cd as integers, constant term first.
FieldPtr analyze_field(std::initializer_list<long> coeffs);

}  // namespace latgeo
