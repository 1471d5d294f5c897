#pragma once

// Exact scalars: rationals and number-field elements under a designated real
// embedding, closed under field arithmetic.  Field elements store power-basis
// coordinates and are reduced modulo the minimal polynomial after every
// multiplication, so the zero test is structural (all coordinates zero).
// Sign determination is certified: interval evaluation on the root enclosure,
// refined on demand; if refinement stalls because the coordinate polynomial
// shares a root with the minimal polynomial, the gcd exposes the claimed
// minimal polynomial as reducible and we report that instead of looping.

#include <string>
#include <variant>
#include <vector>

#include "latgeo/numfield.hpp"

namespace latgeo {

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, std::vector<Rat> coords, int embedding);

  static FieldElement constant(const FieldPtr& field, const Rat& c, int embedding);
  static FieldElement generator(const FieldPtr& field, int embedding);

  const FieldPtr& field() const { return field_; }
  const std::vector<Rat>& coords() const { return coords_; }
  int embedding() const { return embedding_; }

  bool is_zero() const;
  bool is_rational_value() const;  // theta-coordinates all vanish
  Rat rational_value() const;      // requires is_rational_value()

  std::string str() const;

 private:
  friend FieldElement fe_add(const FieldElement&, const FieldElement&);
  friend FieldElement fe_sub(const FieldElement&, const FieldElement&);
  friend FieldElement fe_mul(const FieldElement&, const FieldElement&);
  friend FieldElement fe_neg(const FieldElement&);
  friend FieldElement fe_inv(const FieldElement&);

  FieldPtr field_;
  std::vector<Rat> coords_;
  int embedding_ = 0;
};

// Verifies two elements live in the same field under the same embedding
// (pointer fast path, minimal-polynomial comparison otherwise).
void require_same_field(const FieldElement& a, const FieldElement& b);

FieldElement fe_add(const FieldElement& a, const FieldElement& b);
FieldElement fe_sub(const FieldElement& a, const FieldElement& b);
FieldElement fe_mul(const FieldElement& a, const FieldElement& b);
FieldElement fe_neg(const FieldElement& a);
FieldElement fe_inv(const FieldElement& a);

// Certified sign of the real number the element denotes under an arbitrary
// real embedding (defaults to the designated one).
int fe_sign(const FieldElement& a, int embedding = -1);
// Double approximation within 4 ulp.
double fe_to_float(const FieldElement& a, int embedding = -1);
// Rigorous enclosure from the stored (width <= 2^-64) root enclosure.
DInterval fe_to_interval(const FieldElement& a, int embedding = -1);

class Scalar {
 public:
  Scalar() : v_(Rat(0)) {}
  Scalar(const Rat& r) : v_(r) {}
  Scalar(Rat&& r) : v_(std::move(r)) {}
  Scalar(long n) : v_(Rat(n)) {}
  Scalar(int n) : v_(Rat(n)) {}
  Scalar(const FieldElement& f) : v_(f) {}
  Scalar(FieldElement&& f) : v_(std::move(f)) {}

  bool is_rational() const { return std::holds_alternative<Rat>(v_); }
  const Rat& rat() const;
  const FieldElement& field_elem() const;

  bool is_zero() const;
  bool is_one() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  int sign() const;
  double to_float() const;
  double to_float(int embedding) const;
  DInterval to_interval() const;
  std::string str() const;

  // If the value is rational (possibly via vanishing theta-coordinates),
  // returns it; pure-rational fast path is free.
  bool try_rational(Rat& out) const;

 private:
  std::variant<Rat, FieldElement> v_;
};

Scalar operator+(Scalar a, const Scalar& b);
Scalar operator-(Scalar a, const Scalar& b);
Scalar operator*(Scalar a, const Scalar& b);
Scalar operator/(Scalar a, const Scalar& b);
bool operator==(const Scalar& a, const Scalar& b);  // exact value equality

// sign(a - b): -1, 0, or +1, certified.
int compare(const Scalar& a, const Scalar& b);

Scalar scalar_abs(const Scalar& a);

}  // namespace latgeo
