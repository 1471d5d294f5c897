#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latgeo/asymptotics.hpp"
#include "latgeo/error.hpp"

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

Lattice z2() { return Lattice::make(rows({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}})); }

// split of Z^2 along the x-axis: slices are the vertical lattice columns
SubspaceSplit axis_split() {
  return split_by_subspace(z2(), SubspaceSpec::make(2, rows({{Rat(1), Rat(0)}})));
}

// split of Z^2 along the line of slope 2: five slices meet the unit disk
SubspaceSplit slope2_split() {
  return split_by_subspace(z2(), SubspaceSpec::make(2, rows({{Rat(1), Rat(2)}})));
}

// split of Z^2 along an irrational direction: no dual vector lies in F, so
// there is a single slice covering the whole plane
SubspaceSplit sqrt2_split() {
  auto fld = analyze_field({-2, 0, 1});
  Scalar t(FieldElement::generator(fld, 1));
  MatS frow;
  frow.push_back(pt({Rat(1), Rat(0)}));
  frow[0][1] = t;
  return split_by_subspace(z2(), SubspaceSpec::make(2, frow));
}

Domain unit_disk() { return Domain::ball(pt({Rat(0), Rat(0)}), Scalar(1)); }

// the (-1/2,3/2) x (0,1) strip: exactly two unit-length slice sections
Domain strip_box() {
  return Domain::box(pt({Rat(1, 2), Rat(1, 2)}), {Scalar(Rat(1)), Scalar(Rat(1, 2))});
}

std::vector<Rat> dyadic_eps(int from, int to) {
  std::vector<Rat> out;
  for (int k = from; k <= to; k++) out.push_back(Rat(1) / (std::int64_t{1} << k));
  return out;
}

}  // namespace

TEST_CASE("predicted exponents across the regimes") {
  RegimeClass rc;
  rc.kind = RegimeKind::SliceStrictlyConvex;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 0;
  PredictedBound b = predicted_exponent(rc);
  CHECK(b.power == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(b.log_degree == 0);
  CHECK_FALSE(b.log_form());

  rc.kind = RegimeKind::BoxAdmissible;
  b = predicted_exponent(rc);
  CHECK(b.power == 0.0);
  CHECK(b.log_degree == 1);
  CHECK(b.log_form());
  CHECK(b.total_log_degree() == doctest::Approx(1.0));

  RegimeClass alg;
  alg.kind = RegimeKind::AlgebraicProduct;
  alg.n = 2, alg.p = 1, alg.q = 1, alg.r = 1;  // label rank equals dim F
  alg.ell = 0, alg.places_real = 2, alg.places_complex = 0;
  b = predicted_exponent(alg);
  CHECK(b.power == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(b.log_degree == 2);
  CHECK(b.log_margin == doctest::Approx(0.1));
  CHECK(b.total_log_degree() == doctest::Approx(2.1));

  RegimeClass sm;
  sm.kind = RegimeKind::SmoothSlices;
  sm.n = 3, sm.p = 2, sm.q = 1, sm.r = 1;
  CHECK(predicted_exponent(sm).power == doctest::Approx(-0.5).epsilon(1e-12));

  RegimeClass fb;
  fb.kind = RegimeKind::FiberStrictlyConvex;
  fb.n = 3, fb.p = 2, fb.q = 1, fb.r = 0;
  CHECK(predicted_exponent(fb).power == doctest::Approx(-2.0 / 3).epsilon(1e-12));
}

TEST_CASE("predicted exponent rejects inconsistent parameters") {
  RegimeClass rc;
  rc.kind = RegimeKind::SmoothSlices;
  rc.n = 3, rc.p = 1, rc.q = 1, rc.r = 0;  // n != p + q
  CHECK(error_of([&] { predicted_exponent(rc); }) == ErrorCode::InconsistentParameters);

  rc.n = 2;
  rc.r = 2;  // rank beyond dim F
  CHECK(error_of([&] { predicted_exponent(rc); }) == ErrorCode::InconsistentParameters);

  rc.r = 0;
  rc.ell = 1;  // degenerate factors outside the algebraic regime
  CHECK(error_of([&] { predicted_exponent(rc); }) == ErrorCode::InconsistentParameters);

  RegimeClass alg;
  alg.kind = RegimeKind::AlgebraicProduct;
  alg.n = 2, alg.p = 1, alg.q = 1, alg.r = 1;
  alg.ell = 3;  // more degenerate factors than slice codimension
  CHECK(error_of([&] { predicted_exponent(alg); }) == ErrorCode::InconsistentParameters);
}

TEST_CASE("leading term of the two-slice strip") {
  SubspaceSplit sd = axis_split();
  double lt = leading_term(sd, strip_box(), Rat(1, 10));
  CHECK(lt == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("leading term with a single slice is the scaled area") {
  SubspaceSplit sd = sqrt2_split();
  CHECK(sd.r == 0);
  double lt = leading_term(sd, unit_disk(), Rat(1, 2));
  CHECK(lt == doctest::Approx(2.0 * std::acos(-1.0)).epsilon(1e-12));
}

TEST_CASE("leading term equals the chord-length sum over slices") {
  // Independent evaluation: the slices of the slope-2 split cut the unit disk
  // in chords at distance |m|/sqrt(5) from the center, |m| <= 2.
  double oracle = 0.0;
  for (int m = -2; m <= 2; m++) oracle += 2.0 * std::sqrt(1.0 - m * m / 5.0);
  oracle /= std::sqrt(5.0);

  SubspaceSplit sd = slope2_split();
  CHECK(sd.r == 1);
  double lt = leading_term(sd, unit_disk(), Rat(1));
  CHECK(lt == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(lt == doctest::Approx(3.29443).epsilon(1e-5));
}

TEST_CASE("leading term scales exactly like the expansion power") {
  struct Case {
    SubspaceSplit sd;
    Domain s;
  };
  std::vector<Case> cases;
  cases.push_back({axis_split(), strip_box()});
  cases.push_back({slope2_split(), unit_disk()});
  cases.push_back({sqrt2_split(), unit_disk()});
  // a 3-dimensional split with two expanded directions
  Lattice z3 = Lattice::make(
      rows({{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}}));
  SubspaceSplit sd3 =
      split_by_subspace(z3, SubspaceSpec::make(3, rows({{Rat(1), Rat(0), Rat(0)}})));
  cases.push_back({sd3, Domain::ball(pt({Rat(0), Rat(0), Rat(0)}), Scalar(1))});

  for (auto& c : cases) {
    int q = c.sd.q;
    Rat eps = Rat(3, 7);
    double a = leading_term(c.sd, c.s, eps);
    double b = leading_term(c.sd, c.s, eps / 2);
    CHECK(b / a == doctest::Approx(std::ldexp(1.0, q)).epsilon(1e-12));
  }
}

TEST_CASE("single-slice leading term matches domain volume over covolume") {
  SubspaceSplit sd = sqrt2_split();
  double pi = std::acos(-1.0);
  Rat eps(1, 8);

  CHECK(leading_term(sd, unit_disk(), eps) == doctest::Approx(8.0 * pi).epsilon(1e-12));

  Domain box = Domain::box(pt({Rat(1, 3), Rat(-1, 5)}), {Scalar(Rat(3, 4)), Scalar(Rat(2, 5))});
  CHECK(leading_term(sd, box, eps) ==
        doctest::Approx(8.0 * (2 * 0.75) * (2 * 0.4)).epsilon(1e-12));

  Domain ell = Domain::ellipsoid(pt({Rat(0), Rat(0)}),
                                 rows({{Rat(1, 4), Rat(0)}, {Rat(0), Rat(1)}}));
  CHECK(leading_term(sd, ell, eps) == doctest::Approx(8.0 * 2 * pi).epsilon(1e-9));
}

TEST_CASE("remainder of the strip count is exactly minus two") {
  SubspaceSplit sd = axis_split();
  Domain s = strip_box();
  CountResult c = count_sliced(sd, s, Rat(1, 10));
  CHECK(c.certain == 18);
  CHECK(c.boundary_hits == 0);
  DInterval r = remainder(sd, s, Rat(1, 10), c);
  CHECK(r.lo == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("remainder of an empty configuration is zero") {
  // Ball strictly between two slice columns: no slice meets it and the
  // expanded image never captures a lattice point.
  SubspaceSplit sd = axis_split();
  Domain s = Domain::ball(pt({Rat(1, 2), Rat(1, 2)}), Scalar(Rat(1, 4)));
  CountResult c = count_sliced(sd, s, Rat(1, 16));
  CHECK(c.certain == 0);
  CHECK(c.boundary_hits == 0);
  CHECK(c.slices_used == 0);
  DInterval r = remainder(sd, s, Rat(1, 16), c);
  CHECK(r.lo == doctest::Approx(0.0));
  CHECK(r.hi == doctest::Approx(0.0));
}

TEST_CASE("remainder against the enumeration oracle at a deep scale") {
  SubspaceSplit sd = sqrt2_split();
  Domain s = unit_disk();
  Rat eps = Rat(1) / 256;
  CountResult oracle = count_naive(sd.lattice, s, AnisoMap::make(sd.fixed, eps));
  CountResult sliced = count_sliced(sd, s, eps);
  CHECK(oracle.certain == sliced.certain);
  CHECK(oracle.boundary_hits == sliced.boundary_hits);

  double lt = leading_term(sd, s, eps);
  DInterval r = remainder(sd, s, eps, oracle);
  CHECK(r.lo == doctest::Approx(static_cast<double>(oracle.certain) - lt).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(static_cast<double>(oracle.certain + oracle.boundary_hits) - lt)
                    .epsilon(1e-12));
  // at this scale the remainder is already far below the leading term
  CHECK(std::abs(r.mid()) < 0.05 * lt);
}

TEST_CASE("scan of the irrational disk fits the strictly convex exponent") {
  SubspaceSplit sd = sqrt2_split();
  RegimeClass rc;
  rc.kind = RegimeKind::SliceStrictlyConvex;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 0;

  RemainderScan scan = scan_and_fit(sd, unit_disk(), dyadic_eps(4, 14), rc);
  CHECK(scan.rows.size() == 11);
  for (size_t i = 1; i < scan.rows.size(); i++) CHECK(scan.rows[i].eps < scan.rows[i - 1].eps);
  CHECK(scan.predicted.power == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK_FALSE(scan.fit.log_form);
  CHECK(scan.fit.beta <= 0.0);
  CHECK(scan.fit.beta >= -0.45);
  CHECK(scan.verdict);
  CHECK(scan.fit.constant > 0.0);
  CHECK(scan.fit.r2 >= 0.0);
  CHECK(scan.fit.r2 <= 1.0);
  // remainder is relatively negligible at the deepest scale
  const ScanRow& last = scan.rows.back();
  CHECK(std::abs(0.5 * (last.rem_lo + last.rem_hi)) < 0.05 * last.leading);
}

TEST_CASE("scan of the strip is flat") {
  SubspaceSplit sd = axis_split();
  RegimeClass rc;
  rc.kind = RegimeKind::BoxAdmissible;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 1;  // log degree 0: bounded remainder
  RemainderScan scan = scan_and_fit(sd, strip_box(), dyadic_eps(2, 9), rc);
  CHECK(scan.predicted.log_form());
  CHECK(scan.predicted.log_degree == 0);
  for (const ScanRow& row : scan.rows) {
    CHECK(row.rem_lo == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(row.rem_hi == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(row.used_in_fit);
  }
  CHECK(scan.fit.log_form);
  CHECK(std::abs(scan.fit.beta) < 1e-9);
  CHECK(scan.fit.constant == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(scan.verdict);
}

TEST_CASE("scan of the embedded quadratic lattice box stays logarithmic") {
  // Lattice spanned by (1,1) and (sqrt2,-sqrt2); the fixed axis meets no dual
  // vector, and the box remainder should grow at most like |log2 eps|.
  auto fld = analyze_field({-2, 0, 1});
  Scalar t(FieldElement::generator(fld, 1));
  MatS basis = rows({{Rat(1), Rat(1)}, {Rat(0), Rat(0)}});
  basis[1][0] = t;
  basis[1][1] = -t;
  Lattice lat = Lattice::make(basis);
  SubspaceSplit sd = split_by_subspace(lat, SubspaceSpec::make(2, rows({{Rat(1), Rat(0)}})));
  CHECK(sd.r == 0);

  Domain box = Domain::box(pt({Rat(0), Rat(0)}), {Scalar(Rat(1, 2)), Scalar(Rat(1, 2))});
  RegimeClass rc;
  rc.kind = RegimeKind::BoxAdmissible;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 0;

  RemainderScan scan = scan_and_fit(sd, box, dyadic_eps(4, 20), rc);
  CHECK(scan.predicted.log_degree == 1);
  CHECK(scan.fit.log_form);
  CHECK(scan.fit.log_degree == doctest::Approx(1.0));
  CHECK(std::abs(scan.fit.beta) <= 0.15);
  CHECK(scan.verdict);
  CHECK(scan.fit.constant > 0.0);
  // every remainder obeys the fitted log envelope up to a modest factor
  for (const ScanRow& row : scan.rows) {
    double mag = std::max(std::abs(row.rem_lo), std::abs(row.rem_hi));
    double level = 1.0 + std::abs(std::log2(to_double(row.eps)));
    CHECK(mag <= 20.0 * level);
  }
}

TEST_CASE("scan fit ignores the input order") {
  SubspaceSplit sd = sqrt2_split();
  RegimeClass rc;
  rc.kind = RegimeKind::SliceStrictlyConvex;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 0;
  std::vector<Rat> eps = dyadic_eps(4, 10);
  RemainderScan a = scan_and_fit(sd, unit_disk(), eps, rc);
  std::reverse(eps.begin(), eps.end());
  std::swap(eps[0], eps[3]);
  RemainderScan b = scan_and_fit(sd, unit_disk(), eps, rc);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); i++) {
    CHECK(a.rows[i].eps == b.rows[i].eps);
    CHECK(a.rows[i].certain == b.rows[i].certain);
    CHECK(a.rows[i].leading == b.rows[i].leading);
    CHECK(a.rows[i].used_in_fit == b.rows[i].used_in_fit);
  }
  CHECK(a.fit.beta == b.fit.beta);
  CHECK(a.fit.constant == b.fit.constant);
  CHECK(a.verdict == b.verdict);
  CHECK(a.verdict_note == b.verdict_note);
}

TEST_CASE("scan input validation and row starvation") {
  SubspaceSplit sd = axis_split();
  RegimeClass rc;
  rc.kind = RegimeKind::BoxAdmissible;
  rc.n = 2, rc.p = 1, rc.q = 1, rc.r = 1;
  Domain s = strip_box();

  CHECK(error_of([&] { scan_and_fit(sd, s, {}, rc); }) == ErrorCode::InconsistentParameters);
  CHECK(error_of([&] { scan_and_fit(sd, s, {Rat(1, 2), Rat(1, 4), Rat(1, 2)}, rc); }) ==
        ErrorCode::InconsistentParameters);
  CHECK(error_of([&] { scan_and_fit(sd, s, {Rat(1, 2), Rat(0)}, rc); }) ==
        ErrorCode::NonPositiveParameter);
  // three usable rows are not enough for a fit
  CHECK(error_of([&] { scan_and_fit(sd, s, dyadic_eps(2, 4), rc); }) ==
        ErrorCode::TooFewUsableRows);
}

TEST_CASE("leading term input validation") {
  SubspaceSplit sd = axis_split();
  CHECK(error_of([&] { leading_term(sd, strip_box(), Rat(0)); }) ==
        ErrorCode::NonPositiveParameter);
  Domain ball3 = Domain::ball(pt({Rat(0), Rat(0), Rat(0)}), Scalar(1));
  CHECK(error_of([&] { leading_term(sd, ball3, Rat(1, 2)); }) == ErrorCode::InvalidDims);
}
