#include "latgeo/scalar.hpp"

#include <sstream>

#include "latgeo/error.hpp"

namespace latgeo {

FieldElement::FieldElement(FieldPtr field, std::vector<Rat> coords, int embedding)
    : field_(std::move(field)), coords_(std::move(coords)), embedding_(embedding) {
  if (!field_) fail(ErrorCode::InconsistentParameters, "field element without field");
  if (embedding_ < 0 || embedding_ >= field_->num_real)
    fail(ErrorCode::EmbeddingOutOfRange,
         "embedding " + std::to_string(embedding_) + " of " +
             std::to_string(field_->num_real));
  coords_.resize(field_->degree, Rat(0));
}

FieldElement FieldElement::constant(const FieldPtr& field, const Rat& c, int embedding) {
  std::vector<Rat> coords(field->degree, Rat(0));
  coords[0] = c;
  return FieldElement(field, std::move(coords), embedding);
}

FieldElement FieldElement::generator(const FieldPtr& field, int embedding) {
  std::vector<Rat> coords(field->degree, Rat(0));
  coords[1] = 1;
  return FieldElement(field, std::move(coords), embedding);
}

bool FieldElement::is_zero() const {
  for (const Rat& c : coords_)
    if (c != 0) return false;
  return true;
}

bool FieldElement::is_rational_value() const {
  for (size_t i = 1; i < coords_.size(); i++)
    if (coords_[i] != 0) return false;
  return true;
}

Rat FieldElement::rational_value() const {
  if (!is_rational_value())
    fail(ErrorCode::InvariantViolation, "field element is not rational");
  return coords_[0];
}

std::string FieldElement::str() const {
  std::ostringstream os;
  bool any = false;
  for (size_t i = 0; i < coords_.size(); i++) {
    if (coords_[i] == 0) continue;
    if (any) os << (coords_[i] > 0 ? " + " : " - ");
    else if (coords_[i] < 0) os << "-";
    Rat a = rat_abs(coords_[i]);
    if (i == 0 || a != 1) os << rat_str(a);
    if (i == 0 && a == 1 && false) os << "1";
    if (i >= 1) os << "t";
    if (i >= 2) os << "^" << i;
    any = true;
  }
  if (!any) os << "0";
  if (embedding_ != 0) os << "@" << embedding_;
  return os.str();
}

void require_same_field(const FieldElement& a, const FieldElement& b) {
  if (a.field() != b.field()) {
    if (!a.field() || !b.field() || a.field()->minpoly != b.field()->minpoly)
      fail(ErrorCode::FieldMismatch, "elements of different number fields");
  }
  if (a.embedding() != b.embedding())
    fail(ErrorCode::FieldMismatch, "elements under different embeddings");
}

FieldElement fe_add(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  FieldElement r = a;
  for (size_t i = 0; i < r.coords_.size(); i++) r.coords_[i] += b.coords_[i];
  return r;
}

FieldElement fe_sub(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  FieldElement r = a;
  for (size_t i = 0; i < r.coords_.size(); i++) r.coords_[i] -= b.coords_[i];
  return r;
}

FieldElement fe_neg(const FieldElement& a) {
  FieldElement r = a;
  for (Rat& c : r.coords_) c = -c;
  return r;
}

FieldElement fe_mul(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  int d = a.field()->degree;
  std::vector<Rat> prod(2 * d - 1, Rat(0));
  for (int i = 0; i < d; i++) {
    if (a.coords_[i] == 0) continue;
    for (int j = 0; j < d; j++) {
      if (b.coords_[j] == 0) continue;
      prod[i + j] += a.coords_[i] * b.coords_[j];
    }
  }
  // fold theta^(d+k) terms through the precomputed reduction table
  std::vector<Rat> red(d, Rat(0));
  for (int i = 0; i < d; i++) red[i] = prod[i];
  for (int k = 0; k <= d - 2; k++) {
    const Rat& c = prod[d + k];
    if (c == 0) continue;
    const auto& row = a.field()->reduction[k];
    for (int i = 0; i < d; i++) red[i] += c * row[i];
  }
  FieldElement r = a;
  r.coords_ = std::move(red);
  return r;
}

namespace {

// extended gcd over Q[x]: returns g (monic) with u*p + v*m = g (v unused)
QPoly poly_egcd(const QPoly& p, const QPoly& m, QPoly& u) {
  QPoly r0 = poly_trim(m), r1 = poly_trim(p);
  QPoly u0 = {}, u1 = {Rat(1)};  // coefficients of p in the combination
  while (!r1.empty()) {
    auto [q, r2] = poly_divmod(r0, r1);
    QPoly u2 = poly_sub(u0, poly_mul(q, u1));
    r0 = std::move(r1);
    r1 = std::move(r2);
    u0 = std::move(u1);
    u1 = std::move(u2);
  }
  if (r0.empty()) fail(ErrorCode::DivisionByZero, "gcd of zero polynomials");
  Rat lead = r0.back();
  u = poly_scale(u0, Rat(1) / lead);
  return poly_scale(r0, Rat(1) / lead);
}

}  // namespace

FieldElement fe_inv(const FieldElement& a) {
  if (a.is_zero()) fail(ErrorCode::DivisionByZero, "inverse of zero field element");
  QPoly p = poly_trim(a.coords_);
  QPoly u;
  QPoly g = poly_egcd(p, a.field()->minpoly, u);
  if (poly_deg(g) > 0)
    fail(ErrorCode::ReducibleDetected,
         "element shares a factor with the claimed minimal polynomial");
  FieldElement r = a;
  u.resize(a.field()->degree, Rat(0));
  r.coords_ = std::move(u);
  return r;
}

namespace {

int resolve_embedding(const FieldElement& a, int embedding) {
  int e = embedding < 0 ? a.embedding() : embedding;
  if (e < 0 || e >= a.field()->num_real)
    fail(ErrorCode::EmbeddingOutOfRange, "real embedding " + std::to_string(e));
  return e;
}

// Rational bound on |p'| over [-B, B]
Rat derivative_bound(const QPoly& p, const Rat& B) {
  QPoly dp = poly_derivative(p);
  Rat bound(0), power(1);
  for (const Rat& c : dp) {
    bound += rat_abs(c) * power;
    power *= B;
  }
  return bound;
}

}  // namespace

int fe_sign(const FieldElement& a, int embedding) {
  if (a.is_zero()) return 0;
  if (a.is_rational_value()) {
    const Rat& c = a.coords()[0];
    return c > 0 ? 1 : -1;
  }
  int e = resolve_embedding(a, embedding);
  QPoly p = poly_trim(a.coords());
  const QPoly& m = a.field()->minpoly;
  RootEnclosure enc = a.field()->real_roots[e];

  // |p(theta) - p(mid)| <= M * width/2 with M a derivative bound: the sign of
  // p(mid) is conclusive once the error term is smaller than |p(mid)|.
  Rat B = rat_abs(enc.lo) > rat_abs(enc.hi) ? rat_abs(enc.lo) : rat_abs(enc.hi);
  B += 1;
  Rat M = derivative_bound(p, B);
  bool checked_gcd = false;
  Rat width_floor(1, Int(1) << 128);
  while (true) {
    Rat mid = enc.mid();
    Rat v = poly_eval(p, mid);
    Rat err = M * enc.width() / 2;
    if (rat_abs(v) > err) return v > 0 ? 1 : -1;
    if (enc.exact) {
      // the root itself is rational and p vanishes at it
      if (v == 0)
        fail(ErrorCode::ReducibleDetected,
             "nonzero element evaluates to zero at a rational root");
      return v > 0 ? 1 : -1;
    }
    if (!checked_gcd && enc.width() < width_floor) {
      checked_gcd = true;
      QPoly g = poly_gcd(p, m);
      if (poly_deg(g) > 0) {
        auto chain = sturm_chain(g);
        if (sturm_count(chain, enc.lo, enc.hi) > 0)
          fail(ErrorCode::ReducibleDetected,
               "nonzero element vanishes at the designated root; "
               "minimal polynomial is reducible");
      }
      // no shared root here: the value is nonzero, refinement must terminate
    }
    refine_enclosure(m, enc, Rat(enc.width() / (Int(1) << 32)));
  }
}

double fe_to_float(const FieldElement& a, int embedding) {
  if (a.is_zero()) return 0.0;
  if (a.is_rational_value()) return to_double(a.coords()[0]);
  int e = resolve_embedding(a, embedding);
  QPoly p = poly_trim(a.coords());
  const QPoly& m = a.field()->minpoly;
  RootEnclosure enc = a.field()->real_roots[e];
  Rat B = rat_abs(enc.lo) > rat_abs(enc.hi) ? rat_abs(enc.lo) : rat_abs(enc.hi);
  B += 1;
  Rat M = derivative_bound(p, B);
  // tighten until the enclosure-induced error is far below one ulp of the
  // value, then a single exact evaluation at the midpoint is conclusive
  Rat tiny(1, Int(1) << 1074);
  while (true) {
    Rat mid = enc.mid();
    Rat v = poly_eval(p, mid);
    Rat err = M * enc.width() / 2;
    if (enc.exact || err <= rat_abs(v) / (Int(1) << 55) || err < tiny)
      return to_double(v);
    refine_enclosure(m, enc, Rat(enc.width() / (Int(1) << 32)));
  }
}

DInterval fe_to_interval(const FieldElement& a, int embedding) {
  if (a.is_zero()) return DInterval(0.0, 0.0);
  if (a.is_rational_value()) return to_interval(a.coords()[0]);
  int e = resolve_embedding(a, embedding);
  DInterval x = a.field()->real_roots[e].to_interval();
  return poly_eval(poly_trim(a.coords()), x);
}

const Rat& Scalar::rat() const {
  if (!is_rational()) fail(ErrorCode::UnsupportedScalarKind, "scalar is not rational");
  return std::get<Rat>(v_);
}

const FieldElement& Scalar::field_elem() const {
  if (is_rational()) fail(ErrorCode::UnsupportedScalarKind, "scalar is rational");
  return std::get<FieldElement>(v_);
}

bool Scalar::is_zero() const {
  if (is_rational()) return std::get<Rat>(v_) == 0;
  return std::get<FieldElement>(v_).is_zero();
}

bool Scalar::is_one() const {
  if (is_rational()) return std::get<Rat>(v_) == 1;
  const FieldElement& f = std::get<FieldElement>(v_);
  return f.is_rational_value() && f.coords()[0] == 1;
}

bool Scalar::try_rational(Rat& out) const {
  if (is_rational()) {
    out = std::get<Rat>(v_);
    return true;
  }
  const FieldElement& f = std::get<FieldElement>(v_);
  if (f.is_rational_value()) {
    out = f.coords()[0];
    return true;
  }
  return false;
}

Scalar Scalar::operator-() const {
  if (is_rational()) return Scalar(Rat(-std::get<Rat>(v_)));
  return Scalar(fe_neg(std::get<FieldElement>(v_)));
}

namespace {

FieldElement promote(const Rat& r, const FieldElement& like) {
  return FieldElement::constant(like.field(), r, like.embedding());
}

}  // namespace

Scalar& Scalar::operator+=(const Scalar& o) {
  if (is_rational() && o.is_rational())
    std::get<Rat>(v_) += std::get<Rat>(o.v_);
  else if (is_rational())
    v_ = fe_add(promote(std::get<Rat>(v_), std::get<FieldElement>(o.v_)),
                std::get<FieldElement>(o.v_));
  else if (o.is_rational())
    v_ = fe_add(std::get<FieldElement>(v_),
                promote(std::get<Rat>(o.v_), std::get<FieldElement>(v_)));
  else
    v_ = fe_add(std::get<FieldElement>(v_), std::get<FieldElement>(o.v_));
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  *this += -o;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (is_rational() && o.is_rational())
    std::get<Rat>(v_) *= std::get<Rat>(o.v_);
  else if (is_rational())
    v_ = fe_mul(promote(std::get<Rat>(v_), std::get<FieldElement>(o.v_)),
                std::get<FieldElement>(o.v_));
  else if (o.is_rational())
    v_ = fe_mul(std::get<FieldElement>(v_),
                promote(std::get<Rat>(o.v_), std::get<FieldElement>(v_)));
  else
    v_ = fe_mul(std::get<FieldElement>(v_), std::get<FieldElement>(o.v_));
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) fail(ErrorCode::DivisionByZero, "scalar division by zero");
  if (is_rational() && o.is_rational()) {
    std::get<Rat>(v_) /= std::get<Rat>(o.v_);
    return *this;
  }
  if (o.is_rational()) {
    *this *= Scalar(Rat(1 / std::get<Rat>(o.v_)));
    return *this;
  }
  *this *= Scalar(fe_inv(std::get<FieldElement>(o.v_)));
  return *this;
}

int Scalar::sign() const {
  if (is_rational()) {
    const Rat& r = std::get<Rat>(v_);
    return r > 0 ? 1 : (r < 0 ? -1 : 0);
  }
  return fe_sign(std::get<FieldElement>(v_));
}

double Scalar::to_float() const {
  if (is_rational()) return to_double(std::get<Rat>(v_));
  return fe_to_float(std::get<FieldElement>(v_));
}

double Scalar::to_float(int embedding) const {
  if (is_rational()) return to_double(std::get<Rat>(v_));
  return fe_to_float(std::get<FieldElement>(v_), embedding);
}

DInterval Scalar::to_interval() const {
  if (is_rational()) return latgeo::to_interval(std::get<Rat>(v_));
  return fe_to_interval(std::get<FieldElement>(v_));
}

std::string Scalar::str() const {
  if (is_rational()) return rat_str(std::get<Rat>(v_));
  return std::get<FieldElement>(v_).str();
}

Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

bool operator==(const Scalar& a, const Scalar& b) { return (a - b).is_zero(); }

int compare(const Scalar& a, const Scalar& b) { return (a - b).sign(); }

Scalar scalar_abs(const Scalar& a) { return a.sign() < 0 ? -a : a; }

}  // namespace latgeo
