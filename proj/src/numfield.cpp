#include "latgeo/numfield.hpp"

#include <sstream>

#include "latgeo/error.hpp"

namespace latgeo {

namespace {

// For a monic integer polynomial every rational root is an integer dividing
// the constant term; candidates can only sit inside a real-root enclosure.
void check_integer_roots(const QPoly& m, const std::vector<RootEnclosure>& real_roots) {
  for (const auto& enc : real_roots) {
    if (enc.exact) {
      if (is_integer(enc.lo))
        fail(ErrorCode::ReducibleDetected,
             "minimal polynomial has rational root " + rat_str(enc.lo));
      continue;
    }
    Int lo = ceil_rat(enc.lo), hi = floor_rat(enc.hi);
    for (Int k = lo; k <= hi; k++) {
      if (poly_eval(m, Rat(k)) == 0)
        fail(ErrorCode::ReducibleDetected,
             "minimal polynomial has integer root " + k.get_str());
    }
  }
}

// Degree-4 split into two monic integer quadratics: x^4+a3x^3+a2x^2+a1x+a0 =
// (x^2+px+q)(x^2+rx+s).  Enumerate divisor pairs q*s = a0 (Gauss: monic
// integer factorizations have integer coefficients), then solve p+r, pr.
void check_quartic_split(const QPoly& m) {
  if (poly_deg(m) != 4) return;
  Int a0 = m[0].get_num(), a1 = m[1].get_num(), a2 = m[2].get_num(), a3 = m[3].get_num();
  if (a0 == 0) return;  // caught by integer-root check
  Int abs0 = abs(a0);
  if (abs0 > 1000000000000L) return;  // best-effort only
  std::vector<Int> divisors;
  for (Int i = 1; i * i <= abs0; i++) {
    if (abs0 % i == 0) {
      divisors.push_back(i);
      divisors.push_back(abs0 / i);
    }
    if (i > 1000000) return;
  }
  for (const Int& dpos : divisors) {
    for (int sign = 0; sign < 2; sign++) {
      Int q = sign ? Int(-dpos) : dpos;
      Int s = a0 / q;
      // p + r = a3, p*s + q*r = a1, p*r = a2 - q - s
      Int pr = a2 - q - s;
      Int disc = a3 * a3 - 4 * pr;
      if (disc < 0) continue;
      Int root = sqrt(disc);
      if (root * root != disc) continue;
      for (int branch = 0; branch < 2; branch++) {
        Int num = branch ? Int(a3 - root) : Int(a3 + root);
        if (num % 2 != 0) continue;
        Int p = num / 2, r = a3 - p;
        if (p * s + q * r == a1)
          fail(ErrorCode::ReducibleDetected, "degree-4 minimal polynomial splits");
      }
    }
  }
}

}  // namespace

std::string NumberField::describe() const {
  std::ostringstream os;
  os << "Q[x]/(";
  bool first = true;
  for (int i = degree; i >= 0; i--) {
    if (minpoly[i] == 0) continue;
    if (!first && minpoly[i] > 0) os << "+";
    if (i == 0 || minpoly[i] != 1) {
      if (i > 0 && minpoly[i] == -1)
        os << "-";
      else
        os << rat_str(minpoly[i]);
    }
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
    first = false;
  }
  os << "), signature (" << num_real << "," << num_complex << ")";
  return os.str();
}

FieldPtr analyze_field(const QPoly& minpoly_in) {
  QPoly m = poly_trim(minpoly_in);
  int d = poly_deg(m);
  if (d < 2) fail(ErrorCode::InvalidDims, "minimal polynomial must have degree >= 2");
  for (const Rat& c : m)
    if (!is_integer(c))
      fail(ErrorCode::InconsistentParameters, "minimal polynomial must have integer coefficients");
  if (m.back() != 1)
    fail(ErrorCode::InconsistentParameters, "minimal polynomial must be monic");
  if (poly_deg(poly_gcd(m, poly_derivative(m))) > 0)
    fail(ErrorCode::NotSquarefree, "minimal polynomial is not squarefree");

  auto nf = std::make_shared<NumberField>();
  nf->minpoly = m;
  nf->degree = d;
  nf->real_roots = isolate_real_roots(m);
  nf->num_real = static_cast<int>(nf->real_roots.size());
  if ((d - nf->num_real) % 2 != 0)
    fail(ErrorCode::InvariantViolation, "signature parity mismatch");
  nf->num_complex = (d - nf->num_real) / 2;

  check_integer_roots(m, nf->real_roots);
  check_quartic_split(m);

  Rat width(1, Int(1) << 64);
  for (auto& enc : nf->real_roots) refine_enclosure(m, enc, width);
  if (nf->num_complex > 0)
    nf->complex_roots = isolate_complex_roots(m, nf->num_real);

  // reduction table: theta^(d+k) = -(sum_i m_i theta^(i+k)) reduced iteratively
  std::vector<Rat> cur(m.begin(), m.end() - 1);  // theta^d = -cur (coeff view)
  for (Rat& c : cur) c = -c;
  nf->reduction.push_back(cur);
  for (int k = 1; k <= d - 2; k++) {
    // multiply by theta: shift up, then fold the theta^d term back down
    std::vector<Rat> next(d, Rat(0));
    Rat top = cur[d - 1];
    for (int i = d - 1; i >= 1; i--) next[i] = cur[i - 1];
    next[0] = 0;
    for (int i = 0; i < d; i++) next[i] += top * nf->reduction[0][i];
    nf->reduction.push_back(next);
    cur = std::move(next);
  }
  return nf;
}

FieldPtr analyze_field(std::initializer_list<long> coeffs) {
  QPoly m;
  m.reserve(coeffs.size());
  for (long c : coeffs) m.push_back(Rat(c));
  return analyze_field(m);
}

}  // namespace latgeo
