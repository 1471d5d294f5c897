#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "latgeo/asymptotics.hpp"
#include "latgeo/error.hpp"
#include "latgeo/numfield.hpp"
#include "latgeo/scalar.hpp"
#include "latgeo/spectral.hpp"

using namespace latgeo;

namespace {

VecS pt(std::initializer_list<Rat> xs) {
  VecS v;
  for (const Rat& x : xs) v.push_back(Scalar(x));
  return v;
}

MatS rows(std::initializer_list<std::initializer_list<Rat>> rs) {
  MatS m;
  for (const auto& r : rs) m.push_back(pt(r));
  return m;
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel: "no error was raised"
}

const double FOUR_PI_SQ = 4.0 * M_PI * M_PI;

// Z^2 torus, standard metric, foliation along the x-axis.
FlatTorus axis_torus() {
  return FlatTorus::make(rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}), {},
                         SubspaceSpec::make(2, rows({{Rat(1), Rat(0)}})));
}

// Z^2 torus foliated along the irrational direction (1, sqrt2).
FlatTorus oblique_torus() {
  FieldPtr f = analyze_field({-2, 0, 1});
  Scalar rt2(FieldElement::generator(f, 1));
  MatS dir = {{Scalar(Rat(1)), rt2}};
  return FlatTorus::make(rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}), {},
                         SubspaceSpec::make(2, dir));
}

}  // namespace

TEST_CASE("eigenvalues split into fixed and shrinking dual components") {
  FlatTorus t = axis_torus();
  CHECK(std::fabs(t.eigenvalue({0, 1}, Rat(1, 10)) - FOUR_PI_SQ * 0.01) < 1e-12);
  CHECK(std::fabs(t.eigenvalue({1, 0}, Rat(1, 10)) - FOUR_PI_SQ) < 1e-12);
  CHECK(std::fabs(t.eigenvalue({1, 0}, Rat(3)) - FOUR_PI_SQ) < 1e-12);
  CHECK(t.eigenvalue({0, 0}, Rat(1, 2)) == 0.0);
  // |P k|^2 + eps^2 |k - P k|^2 exactly: k = (3, 4), eps = 1/2.
  CHECK(compare(t.eigenvalue_factor({3, 4}, Rat(1, 2)), Scalar(Rat(13))) == 0);

  CHECK(error_of([&] { t.eigenvalue({1, 2, 3}, Rat(1)); }) ==
        ErrorCode::InvalidDims);
  CHECK(error_of([&] { t.eigenvalue({1, 2}, Rat(0)); }) ==
        ErrorCode::NonPositiveParameter);
}

TEST_CASE("counting function: axis foliation closed form 2*ceil(1/eps)-1") {
  FlatTorus t = axis_torus();
  // mu = 1: the dual points (0, j) count while j^2 eps^2 < 1; the four points
  // (+-1, 0) and (0, +-1/eps) land exactly on the threshold.
  CountResult a = counting_function(t, Rat(1), Rat(1, 10));
  CHECK(a.certain == 19);
  CHECK(a.boundary_hits == 0);
  CHECK(a.boundary_exact == 4);
  CountResult b = counting_function(t, Rat(1), Rat(1, 7));
  CHECK(b.certain == 13);
  CHECK(b.boundary_exact == 4);
  CountResult c = counting_function(t, Rat(1), Rat(1));
  CHECK(c.certain == 1);
  CHECK(c.boundary_exact == 4);
  // mu = 2 at eps = 1: (+-1, +-1) sit exactly on the threshold.
  CountResult d = counting_function(t, Rat(2), Rat(1));
  CHECK(d.certain == 5);
  CHECK(d.boundary_hits == 0);
  CHECK(d.boundary_exact == 4);
  CHECK(error_of([&] { counting_function(t, Rat(0), Rat(1)); }) ==
        ErrorCode::NonPositiveParameter);
}

TEST_CASE("counting function is nondecreasing in the threshold") {
  FlatTorus t = oblique_torus();
  std::int64_t prev_lo = -1, prev_hi = -1;
  for (const Rat& mu : {Rat(1, 2), Rat(1), Rat(3, 2), Rat(2), Rat(4)}) {
    CountResult r = counting_function(t, mu, Rat(1, 4));
    CHECK(r.certain >= prev_lo);
    CHECK(r.certain + r.boundary_hits >= prev_hi);
    prev_lo = r.certain;
    prev_hi = r.certain + r.boundary_hits;
  }
}

TEST_CASE("oblique foliation count equals direct eigenvalue enumeration") {
  // Independent oracle: project k onto (1, sqrt2) by hand with exact field
  // scalars and count eigenvalue factors strictly below 1.
  FieldPtr fld = analyze_field({-2, 0, 1});
  Scalar rt2(FieldElement::generator(fld, 1));
  const Rat eps(1, 8);
  const Scalar three(Rat(3));  // |(1, sqrt2)|^2
  auto factor = [&](long k1, long k2) {
    Scalar d = Scalar(k1) + rt2 * Scalar(k2);  // <k, f>
    Scalar pf2 = d * d / three;                // |P_F k|^2
    Scalar ph2 = Scalar(k1 * k1 + k2 * k2) - pf2;
    return pf2 + Scalar(Rat(eps * eps)) * ph2;
  };
  std::int64_t strict = 0, exact_boundary = 0;
  // |P_F k| < 1 and |P_H k| < 8 force |k| <= 8.07; sweep a wider box.
  for (long k1 = -10; k1 <= 10; k1++)
    for (long k2 = -10; k2 <= 10; k2++) {
      if (k1 == 0 && k2 == 0) {
        strict++;  // zero eigenvalue always counts
        continue;
      }
      int cmp = compare(factor(k1, k2), Scalar(Rat(1)));
      if (cmp < 0) strict++;
      if (cmp == 0) exact_boundary++;
    }

  FlatTorus t = oblique_torus();
  CountResult r = counting_function(t, Rat(1), eps);
  CHECK(r.certain == strict);
  CHECK(r.boundary_hits == 0);
  CHECK(r.boundary_exact == exact_boundary);
  CHECK(t.dual_split().r == 0);  // the direction is irrational for Z^2

  // The library's eigenvalue projector agrees exactly with the hand-built one.
  for (long k1 : {-3L, 0L, 2L, 7L})
    for (long k2 : {-5L, 1L, 4L})
      CHECK(compare(t.eigenvalue_factor({k1, k2}, eps), factor(k1, k2)) == 0);
}

TEST_CASE("leading term: axis and oblique closed forms") {
  FlatTorus ax = axis_torus();
  // eps^-1 * omega_1 * (covol 1 / covol 1) * (1 - 0)^{1/2} = 20 at eps=1/10.
  CHECK(std::fabs(leading_term_spectral(ax, Rat(1), Rat(1, 10)) - 20.0) < 1e-9);
  // mu = 4: labels m = -1, 0, 1 contribute 2(sqrt3 + sqrt3 + 2).
  double expect = 10.0 * 2.0 * (2.0 + 2.0 * std::sqrt(3.0));
  CHECK(std::fabs(leading_term_spectral(ax, Rat(4), Rat(1, 10)) - expect) < 1e-9);

  FlatTorus ob = oblique_torus();
  // r = 0: single slice, eps^-1 * omega_2 * mu.
  CHECK(std::fabs(leading_term_spectral(ob, Rat(1), Rat(1, 8)) - 8.0 * M_PI) <
        1e-9);
  CHECK(std::fabs(leading_term_spectral(ob, Rat(5, 4), Rat(1, 4)) - 5.0 * M_PI) <
        1e-9);
}

TEST_CASE("diagonal metric: hand-derived count and leading term") {
  // Metric diag(1, 4): dual metric diag(1, 1/4), eigenvalue factors
  // k1^2 + k2^2/4 (transverse part scaled by eps^2).
  FlatTorus t = FlatTorus::make(
      rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}),
      rows({{Rat(1), Rat(0)}, {Rat(0), Rat(4)}}),
      SubspaceSpec::make(2, rows({{Rat(1), Rat(0)}})));
  CHECK(compare(t.eigenvalue_factor({1, 0}, Rat(1, 2)), Scalar(Rat(1))) == 0);
  CHECK(compare(t.eigenvalue_factor({0, 1}, Rat(1, 2)), Scalar(Rat(1, 16))) == 0);

  // mu = 1, eps = 1/10: strict count needs k2^2/400 < 1 on the k1 = 0 line,
  // i.e. |k2| <= 19 -> 39 points; (+-1, 0) and (0, +-20) are exact hits.
  CountResult r = counting_function(t, Rat(1), Rat(1, 10));
  CHECK(r.certain == 39);
  CHECK(r.boundary_hits == 0);
  CHECK(r.boundary_exact == 4);

  // Leading term by hand: the torus has metric volume 2, the fixed circle
  // has length 1, the slice dimension is 1, and only k = 0 contributes:
  // 10 * 2 * 2 * 1 = 40.
  CHECK(std::fabs(leading_term_spectral(t, Rat(1), Rat(1, 10)) - 40.0) < 1e-9);
}

TEST_CASE("counting and closed-form leading terms agree across code paths") {
  // The closed form must match the slice-decomposition leading term applied
  // to the dual data, including non-identity metrics and skew bases.
  std::mt19937 rng(23u);
  std::uniform_int_distribution<int> small(-2, 2), diag(1, 3);
  int built = 0;
  while (built < 20) {
    const int n = 2 + (built % 2);  // alternate dimensions 2 and 3
    // Unimodular-ish integer basis: retry until invertible.
    MatS basis(n, VecS(n));
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) basis[i][j] = Scalar(small(rng));
    if (det(basis).sign() == 0) continue;
    // SPD metric A^T A + diagonal.
    MatS a(n, VecS(n));
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) a[i][j] = Scalar(Rat(small(rng)) / 2);
    MatS g = mat_mul(mat_transpose(a), a);
    for (int i = 0; i < n; i++) g[i][i] += Scalar(diag(rng));
    // Foliation along 1 <= p < n integer directions.
    const int p = 1 + (built % (n - 1));
    MatS dirs(p, VecS(n));
    for (int i = 0; i < p; i++)
      for (int j = 0; j < n; j++) dirs[i][j] = Scalar(small(rng));
    if (rank(dirs) != p) continue;

    FlatTorus t = FlatTorus::make(basis, g, SubspaceSpec::make(n, dirs));
    const Rat mu = built % 3 == 0 ? Rat(5, 2) : Rat(built % 3);
    const Rat eps(1, 4);
    double closed = leading_term_spectral(t, mu, eps);
    double sliced = leading_term(t.dual_split(), t.threshold_domain(mu), eps);
    REQUIRE(closed > 0);
    CHECK(std::fabs(closed - sliced) <= 1e-9 * std::fabs(closed));
    built++;
  }
}

TEST_CASE("counting function is literally the dual-side sliced count") {
  std::mt19937 rng(5u);
  std::uniform_int_distribution<int> pick(1, 6);
  FlatTorus tori[] = {axis_torus(), oblique_torus()};
  for (int trial = 0; trial < 50; trial++) {
    const FlatTorus& t = tori[trial % 2];
    Rat mu = Rat(pick(rng)) / pick(rng);
    Rat eps = Rat(1) / pick(rng);
    CountResult lhs = counting_function(t, mu, eps);
    CountResult rhs = count_sliced(t.dual_split(), t.threshold_domain(mu), eps);
    CHECK(lhs.certain == rhs.certain);
    CHECK(lhs.boundary_hits == rhs.boundary_hits);
    CHECK(lhs.boundary_exact == rhs.boundary_exact);
  }
}

TEST_CASE("partial density of states: closed shells and frozen value") {
  CHECK(std::fabs(partial_density_of_states(1.0, {0.0}, 2, 1) - 2.0) < 1e-12);

  // Direct sum oracle for rho = 2.5: gamma in {-2..2}.
  double oracle = 0;
  for (int gchk = -3; gchk <= 3; gchk++) {
    double d2 = 6.25 - static_cast<double>(gchk) * gchk;
    if (d2 > 0) oracle += 2.0 * std::sqrt(d2);
  }
  double v = partial_density_of_states(2.5, {0.0}, 2, 1);
  CHECK(std::fabs(v - oracle) < 1e-12);
  CHECK(v == doctest::Approx(20.16515).epsilon(1e-5));

  // Shifted k-point: gamma in {0, 1} both at distance 1/2.
  CHECK(std::fabs(partial_density_of_states(1.0, {0.5}, 2, 1) -
                  2.0 * std::sqrt(3.0)) < 1e-12);

  CHECK(partial_density_of_states(0.0, {0.0}, 2, 1) == 0.0);
  CHECK(error_of([&] { partial_density_of_states(1.0, {0.0}, 2, 2); }) ==
        ErrorCode::InvalidDims);
  CHECK(error_of([&] { partial_density_of_states(1.0, {0.0, 0.0}, 2, 1); }) ==
        ErrorCode::InvalidDims);
  CHECK(error_of([&] { partial_density_of_states(-1.0, {0.0}, 3, 1); }) ==
        ErrorCode::NonPositiveParameter);
}

TEST_CASE("partial density of states: monotone, continuous, asymptotic") {
  double prev = -1;
  for (int i = 3; i <= 30; i++) {
    double v = partial_density_of_states(0.1 * i, {0.0}, 2, 1);
    CHECK(v >= prev);
    prev = v;
  }
  // New shells enter at value zero, so crossing |gamma| = 2 is continuous.
  double below = partial_density_of_states(2.0 - 1e-9, {0.0}, 2, 1);
  double above = partial_density_of_states(2.0 + 1e-9, {0.0}, 2, 1);
  CHECK(std::fabs(above - below) < 1e-3);
  double below3 = partial_density_of_states(2.0 - 1e-9, {0.0}, 3, 1);
  double above3 = partial_density_of_states(2.0 + 1e-9, {0.0}, 3, 1);
  CHECK(std::fabs(above3 - below3) < 1e-6);

  // Large radius: the shell sum fills the d-ball volume.
  double big = partial_density_of_states(50.0, {0.0}, 2, 1);
  CHECK(std::fabs(big / (M_PI * 2500.0) - 1.0) < 0.02);
}

TEST_CASE("flat torus construction validates its inputs") {
  MatS id2 = rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
  SubspaceSpec fx = SubspaceSpec::make(2, rows({{Rat(1), Rat(0)}}));
  CHECK(error_of([&] {
          FlatTorus::make(id2, rows({{Rat(1), Rat(2)}, {Rat(2), Rat(1)}}), fx);
        }) == ErrorCode::InvariantViolation);  // not positive definite
  CHECK(error_of([&] {
          FlatTorus::make(id2, {}, SubspaceSpec::make(3, mat_identity(3)));
        }) == ErrorCode::InvalidDims);
  FlatTorus t = axis_torus();
  CHECK(error_of([&] { leading_term_spectral(t, Rat(1), Rat(0)); }) ==
        ErrorCode::NonPositiveParameter);
  CHECK(error_of([&] { leading_term_spectral(t, Rat(-1), Rat(1)); }) ==
        ErrorCode::NonPositiveParameter);
}
