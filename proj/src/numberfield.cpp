#include "latgeo/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "latgeo/error.hpp"
#include "latgeo/poly.hpp"

namespace latgeo {
namespace {

// Horner evaluation of power-basis coordinates at an arbitrary element of
// the same field (used to apply a conjugation expressed as a polynomial).
FieldElement eval_coords_at(const std::vector<Rat>& coords,
                            const FieldElement& x) {
  FieldElement acc = FieldElement::constant(x.field(), Rat(0), x.embedding());
  for (int k = static_cast<int>(coords.size()) - 1; k >= 0; --k) {
    acc = fe_add(fe_mul(acc, x),
                 FieldElement::constant(x.field(), coords[k], x.embedding()));
  }
  return acc;
}

bool minpoly_is(const NumberField& f, std::initializer_list<long> coeffs) {
  if (static_cast<int>(coeffs.size()) != f.degree + 1) return false;
  int i = 0;
  for (long c : coeffs) {
    if (f.minpoly[i] != Rat(c)) return false;
    ++i;
  }
  return true;
}

// Rational Scalar when the theta-coordinates vanish, field Scalar otherwise;
// keeps embedded bases as rational as possible.
Scalar tidy(const FieldElement& e) {
  if (e.is_rational_value()) return Scalar(e.rational_value());
  return Scalar(e);
}

void check_vanishes(const FieldElement& e, const char* what) {
  if (!e.is_zero()) fail(ErrorCode::InvariantViolation, what);
}

// Conjugation by polynomial images of the generator: columns are g evaluated
// at each root element, designated root first, the rest ascending by value.
void conjugation_rows(const FieldPtr& field,
                      const std::vector<FieldElement>& gens, int emb,
                      std::vector<std::vector<Rat>> conj_coords, MatS& rows) {
  std::vector<FieldElement> roots;
  roots.push_back(FieldElement::generator(field, emb));
  for (auto& cc : conj_coords) {
    FieldElement r(field, std::move(cc), emb);
    std::vector<Rat> mp(field->minpoly.begin(), field->minpoly.end());
    check_vanishes(eval_coords_at(mp, r),
                   "conjugation image is not a root of the minimal polynomial");
    roots.push_back(std::move(r));
  }
  std::sort(roots.begin() + 1, roots.end(),
            [](const FieldElement& a, const FieldElement& b) {
              return compare(Scalar(a), Scalar(b)) < 0;
            });
  const int d = field->degree;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      rows[i][k] = tidy(eval_coords_at(gens[i].coords(), roots[k]));
}

// Exact rows for x^3 - 2 via the auxiliary field of x^6 - 108, whose
// positive root gamma = 108^(1/6) expresses every entry: cbrt2 = gamma^4/18,
// cbrt4 = gamma^2/3, sqrt3 = gamma^3/6.  For g = a + b cbrt2 + c cbrt4 the
// complex embedding sends cbrt2 to cbrt2 * omega (omega a primitive cube
// root of unity with positive imaginary part), so
//   Re = a - (b cbrt2 + c cbrt4)/2,   Im = (b cbrt2 - c cbrt4) sqrt3/2.
void cbrt2_rows(const std::vector<FieldElement>& gens, MatS& rows) {
  FieldPtr aux = analyze_field({-108, 0, 0, 0, 0, 0, 1});
  const int e = 1;  // positive real root of x^6 - 108
  auto mono = [&](int k, const Rat& num, long den) {
    std::vector<Rat> c(6, Rat(0));
    c[k] = Rat(num) / den;
    return FieldElement(aux, std::move(c), e);
  };
  FieldElement alpha = mono(4, Rat(1), 18);   // 2^(1/3)
  FieldElement alpha2 = mono(2, Rat(1), 3);   // 2^(2/3)
  FieldElement rt3 = mono(3, Rat(1), 6);      // sqrt 3
  auto cst = [&](const Rat& r) { return FieldElement::constant(aux, r, e); };
  check_vanishes(fe_sub(fe_mul(alpha, alpha2), cst(Rat(2))),
                 "cube-root model: alpha * alpha^2 != 2");
  check_vanishes(fe_sub(fe_mul(rt3, rt3), cst(Rat(3))),
                 "cube-root model: sqrt3^2 != 3");
  FieldElement half_rt3 = fe_mul(rt3, cst(Rat(1) / 2));
  for (size_t i = 0; i < gens.size(); ++i) {
    const auto& co = gens[i].coords();
    FieldElement ba = fe_mul(cst(co[1]), alpha);
    FieldElement ca2 = fe_mul(cst(co[2]), alpha2);
    FieldElement irr = fe_add(ba, ca2);
    FieldElement real = fe_add(cst(co[0]), irr);
    FieldElement re = fe_sub(cst(co[0]), fe_mul(irr, cst(Rat(1) / 2)));
    FieldElement im = fe_mul(fe_sub(ba, ca2), half_rt3);
    rows[i] = {tidy(real), tidy(re), tidy(im)};
  }
}

void check_frame(const MatS& frame, size_t d) {
  if (frame.size() != d)
    fail(ErrorCode::InvalidDims, "frame has wrong number of rows");
  for (const auto& r : frame)
    if (r.size() != d) fail(ErrorCode::InvalidDims, "frame row length mismatch");
  const Rat tol = Rat(1) / 1000000 / 1000000;
  for (size_t i = 0; i < d; ++i)
    for (size_t j = i; j < d; ++j) {
      Scalar delta = dot(frame[i], frame[j]) - Scalar(i == j ? 1 : 0);
      if (compare(scalar_abs(delta), Scalar(tol)) > 0)
        fail(ErrorCode::NonOrthonormalFrame,
             "frame rows are not orthonormal within 1e-12");
    }
}

GoodPositionResult norm_search(const Lattice& lat, const MatS& frame,
                               const Rat& radius, std::int64_t budget) {
  if (radius <= 0)
    fail(ErrorCode::NonPositiveParameter, "search mode needs radius > 0");
  check_frame(frame, static_cast<size_t>(lat.dim()));
  GoodPositionResult res;
  res.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& c : lat.minimal_vectors(radius, budget)) {
    ++res.points_checked;
    VecS x = lat.embed(c);
    Scalar nm(Rat(1));
    for (const auto& row : frame) nm *= dot(row, x);
    if (nm.sign() == 0) {
      res.refuted = true;
      res.min_abs = 0.0;
      res.witness = c;
      return res;
    }
    double a = std::fabs(nm.to_float());
    if (a < res.min_abs) {
      res.min_abs = a;
      res.witness = c;
    }
  }
  return res;
}

}  // namespace

ModuleLattice canonical_embedding(const FieldPtr& field,
                                  const std::vector<FieldElement>& gens) {
  if (!field) fail(ErrorCode::InvalidDims, "canonical_embedding: null field");
  const int d = field->degree;
  if (static_cast<int>(gens.size()) != d)
    fail(ErrorCode::InvalidDims,
         "canonical_embedding: a rank-d module needs exactly d generators");
  const int emb = gens[0].embedding();
  for (const auto& g : gens) {
    if (!g.field() ||
        (g.field() != field && g.field()->minpoly != field->minpoly))
      fail(ErrorCode::FieldMismatch, "generator lives in a different field");
    if (g.embedding() != emb)
      fail(ErrorCode::FieldMismatch,
           "generators must share one designated embedding");
  }

  MatS coord(d, VecS(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) coord[i][j] = Scalar(gens[i].coords()[j]);
  if (det(coord).sign() == 0)
    fail(ErrorCode::DependentGenerators,
         "generators are Z-linearly dependent");

  const int s = field->num_real;
  MatS rows(d, VecS(d));
  bool exact = true;

  if (d == 2 && s == 2) {
    // The other root is -c1 - theta, so conjugating a + b theta just needs a
    // coordinate rewrite inside the same field.
    const Rat& c1 = field->minpoly[1];
    for (int i = 0; i < d; ++i) {
      const auto& co = gens[i].coords();
      rows[i][0] = tidy(gens[i]);
      rows[i][1] =
          tidy(FieldElement(field, {Rat(co[0] - co[1] * c1), Rat(-co[1])}, emb));
    }
  } else if (minpoly_is(*field, {-2, 0, 0, 1})) {
    cbrt2_rows(gens, rows);
  } else if (minpoly_is(*field, {-1, -3, 0, 1})) {
    // Cyclic cubic: the conjugates of theta are theta^2 - theta - 2 and
    // 2 - theta^2 (verified exactly during construction).
    conjugation_rows(field, gens, emb,
                     {{Rat(-2), Rat(-1), Rat(1)}, {Rat(2), Rat(0), Rat(-1)}},
                     rows);
  } else {
    // Rational fallback: evaluate the coordinate polynomial at the certified
    // root enclosures (midpoints / complex centers, width <= 2^-64).
    exact = false;
    for (int i = 0; i < d; ++i) {
      QPoly gp = poly_trim(gens[i].coords());
      int col = 0;
      rows[i][col++] = Scalar(poly_eval(gp, field->real_roots[emb].mid()));
      for (int k = 0; k < s; ++k) {
        if (k == emb) continue;
        rows[i][col++] = Scalar(poly_eval(gp, field->real_roots[k].mid()));
      }
      for (int j = 0; j < field->num_complex; ++j) {
        CRat v = poly_eval(gp, field->complex_roots[j].center);
        rows[i][col++] = Scalar(v.re);
        rows[i][col++] = Scalar(v.im);
      }
    }
  }

  ModuleLattice out;
  out.field = field;
  out.generators = gens;
  out.embedded = Lattice::make(std::move(rows));
  out.embedding_exact = exact;
  return out;
}

Rat field_norm(const FieldElement& xi) {
  const FieldPtr& fld = xi.field();
  if (!fld) fail(ErrorCode::InvalidDims, "field_norm: element has no field");
  const int d = fld->degree;
  // Multiplication matrix of xi on the power basis; its determinant is the
  // resultant of the (monic) minimal polynomial with xi's coordinates.
  MatS m(d, VecS(d));
  for (int j = 0; j < d; ++j) {
    std::vector<Rat> unit(d, Rat(0));
    unit[j] = 1;
    FieldElement prod =
        fe_mul(xi, FieldElement(fld, std::move(unit), xi.embedding()));
    for (int i = 0; i < d; ++i) m[i][j] = Scalar(prod.coords()[i]);
  }
  Rat out;
  if (!det(m).try_rational(out))
    fail(ErrorCode::InvariantViolation, "field norm came out irrational");
  return out;
}

double nm_e(const std::vector<double>& x,
            const std::vector<std::vector<double>>& frame) {
  const size_t d = x.size();
  if (frame.size() != d)
    fail(ErrorCode::InvalidDims, "frame has wrong number of rows");
  for (const auto& r : frame)
    if (r.size() != d) fail(ErrorCode::InvalidDims, "frame row length mismatch");
  for (size_t i = 0; i < d; ++i)
    for (size_t j = i; j < d; ++j) {
      double g = 0;
      for (size_t a = 0; a < d; ++a) g += frame[i][a] * frame[j][a];
      if (std::fabs(g - (i == j ? 1.0 : 0.0)) > 1e-12)
        fail(ErrorCode::NonOrthonormalFrame,
             "frame rows are not orthonormal within 1e-12");
    }
  double prod = 1;
  for (size_t j = 0; j < d; ++j) {
    double p = 0;
    for (size_t a = 0; a < d; ++a) p += frame[j][a] * x[a];
    prod *= p;
  }
  return prod;
}

Scalar nm_e_exact(const VecS& x, const MatS& frame) {
  check_frame(frame, x.size());
  Scalar prod(Rat(1));
  for (const auto& row : frame) prod *= dot(row, x);
  return prod;
}

double nm_canonical(const FieldPtr& field, const std::vector<double>& x) {
  if (!field) fail(ErrorCode::InvalidDims, "nm_canonical: null field");
  if (static_cast<int>(x.size()) != field->degree)
    fail(ErrorCode::InvalidDims, "nm_canonical: point has wrong dimension");
  double prod = 1;
  int c = 0;
  for (int k = 0; k < field->num_real; ++k) prod *= x[c++];
  for (int j = 0; j < field->num_complex; ++j) {
    double re = x[c++], im = x[c++];
    prod *= re * re + im * im;
  }
  return prod;
}

GoodPositionResult good_position_check(const ModuleLattice& ml,
                                       const MatS& frame, GoodPositionMode mode,
                                       const Rat& radius, std::int64_t budget) {
  if (mode == GoodPositionMode::Search)
    return norm_search(ml.embedded, frame, radius, budget);
  if (!ml.field) fail(ErrorCode::InvalidDims, "module lattice has no field");
  const int d = ml.field->degree;
  if (static_cast<int>(frame.size()) != d)
    fail(ErrorCode::FrameMismatch,
         "certified mode needs the canonical coordinate frame");
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(frame[i].size()) != d)
      fail(ErrorCode::FrameMismatch,
           "certified mode needs the canonical coordinate frame");
    for (int j = 0; j < d; ++j)
      if (!(frame[i][j] == Scalar(i == j ? 1 : 0)))
        fail(ErrorCode::FrameMismatch,
             "certified mode needs the canonical coordinate frame");
  }
  // Scaling by the common denominator D of all generator coordinates lands
  // the module inside the power-basis order, whose nonzero elements have
  // nonzero integer norm; the norm scales by D^d, so |norm| >= 1/D^d.
  Int den(1);
  for (const auto& g : ml.generators)
    for (const auto& c : g.coords())
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
  GoodPositionResult res;
  res.certified = true;
  res.bound_exact = Rat(1) / pow_rat(Rat(den), d);
  res.bound = to_double(res.bound_exact);
  res.min_abs = std::numeric_limits<double>::infinity();
  return res;
}

GoodPositionResult good_position_check(const Lattice& lat, const MatS& frame,
                                       GoodPositionMode mode, const Rat& radius,
                                       std::int64_t budget) {
  if (mode == GoodPositionMode::Certified)
    fail(ErrorCode::UnsupportedKind,
         "certified mode needs module structure; use a module lattice");
  return norm_search(lat, frame, radius, budget);
}

bool decomposition_compatibility(const FieldPtr& field,
                                 const std::vector<MatS>& blocks) {
  if (!field) fail(ErrorCode::InvalidDims, "null field");
  const int d = field->degree;
  std::vector<std::vector<double>> all;   // every row, flattened
  std::vector<int> owner;                 // block index of each row
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty())
      fail(ErrorCode::BlocksNotSpanning, "empty block in decomposition");
    for (const auto& r : blocks[b]) {
      if (static_cast<int>(r.size()) != d)
        fail(ErrorCode::BlocksNotSpanning, "block row has wrong dimension");
      all.push_back(vec_to_double(r));
      owner.push_back(static_cast<int>(b));
    }
  }
  if (static_cast<int>(all.size()) != d)
    fail(ErrorCode::BlocksNotSpanning,
         "blocks must contribute exactly dim-many rows");
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i; j < all.size(); ++j) {
      double g = 0;
      for (int a = 0; a < d; ++a) g += all[i][a] * all[j][a];
      if (std::fabs(g - (i == j ? 1.0 : 0.0)) > 1e-9)
        fail(ErrorCode::BlocksNotSpanning,
             "blocks are not jointly orthonormal within 1e-9");
    }
  // Which block carries coordinate axis c in full?  (Masses over blocks sum
  // to 1, so at most one block can hold mass ~1.)
  std::vector<int> axis_block(d, -1);
  for (int c = 0; c < d; ++c) {
    std::vector<double> mass(blocks.size(), 0.0);
    for (size_t i = 0; i < all.size(); ++i) mass[owner[i]] += all[i][c] * all[i][c];
    for (size_t b = 0; b < blocks.size(); ++b)
      if (std::fabs(mass[b] - 1.0) <= 1e-9) axis_block[c] = static_cast<int>(b);
    if (axis_block[c] < 0) return false;  // axis split across blocks
  }
  const int s = field->num_real;
  for (int j = 0; j < field->num_complex; ++j)
    if (axis_block[s + 2 * j] != axis_block[s + 2 * j + 1])
      return false;  // complex pair split across blocks
  return true;
}

ModuleLattice module_zsqrt2() {
  FieldPtr f = analyze_field({-2, 0, 1});
  const int e = 1;  // positive root
  return canonical_embedding(
      f, {FieldElement::constant(f, Rat(1), e), FieldElement::generator(f, e)});
}

ModuleLattice module_zcbrt2() {
  FieldPtr f = analyze_field({-2, 0, 0, 1});
  FieldElement th = FieldElement::generator(f, 0);
  return canonical_embedding(
      f, {FieldElement::constant(f, Rat(1), 0), th, fe_mul(th, th)});
}

ModuleLattice module_zcyclic3() {
  FieldPtr f = analyze_field({-1, -3, 0, 1});
  const int e = 2;  // largest root, 2 cos(pi/9)
  FieldElement th = FieldElement::generator(f, e);
  return canonical_embedding(
      f, {FieldElement::constant(f, Rat(1), e), th, fe_mul(th, th)});
}

}  // namespace latgeo
