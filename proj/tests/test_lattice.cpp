#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "latgeo/error.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/numfield.hpp"
#include "latgeo/scalar.hpp"

using namespace latgeo;

namespace {

template <class F>
bool fails_with(ErrorCode code, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// deterministic LCG so test inputs never depend on platform RNG
struct Lcg {
  uint64_t s;
  explicit Lcg(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
  }
  long range(long lo, long hi) {  // inclusive
    return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
};

MatS rational_matrix(const std::vector<std::vector<long>>& rows) {
  MatS m;
  for (const auto& r : rows) {
    VecS v;
    for (long x : r) v.push_back(Scalar(x));
    m.push_back(v);
  }
  return m;
}

}  // namespace

TEST_CASE("construction validates shapes, rank and the ambient form") {
  CHECK(fails_with(ErrorCode::InvalidDims,
                   [] { Lattice::make(rational_matrix({{1, 0}})); }));
  CHECK(fails_with(ErrorCode::SingularBasis,
                   [] { Lattice::make(rational_matrix({{1, 2}, {2, 4}})); }));
  CHECK(fails_with(ErrorCode::InconsistentParameters, [] {
    Lattice::make(rational_matrix({{1, 0}, {0, 1}}),
                  rational_matrix({{1, 2}, {0, 1}}));
  }));
  // indefinite ambient form is rejected by the factorization
  CHECK(fails_with(ErrorCode::InvariantViolation, [] {
    Lattice::make(rational_matrix({{1, 0}, {0, 1}}),
                  rational_matrix({{1, 2}, {2, 1}}));
  }));
}

TEST_CASE("dual basis, Gram matrix and covolume are exact") {
  // Z^2 sheared: rows (1,0), (1,1)
  Lattice lat = Lattice::make(rational_matrix({{1, 0}, {1, 1}}));
  CHECK(compare(lat.covolume_sq(), Scalar(1)) == 0);
  // dual of dual returns the original basis entry-for-entry
  Lattice dd = lat.dual().dual();
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++)
      CHECK(compare(dd.basis()[i][j], lat.basis()[i][j]) == 0);
  // pairing: basis * phi * dual^T = identity
  Scalar p = dot_phi(lat.basis()[0], lat.phi(), lat.dual_basis()[0]);
  CHECK(compare(p, Scalar(1)) == 0);
  p = dot_phi(lat.basis()[0], lat.phi(), lat.dual_basis()[1]);
  CHECK(compare(p, Scalar(0)) == 0);

  // with a non-standard ambient form, covol(L) * covol(dual L) = 1 exactly
  MatS phi = rational_matrix({{2, 1}, {1, 3}});
  Lattice lp = Lattice::make(rational_matrix({{1, 2}, {0, 1}}), phi);
  Scalar prod = lp.covolume_sq() * lp.dual().covolume_sq();
  CHECK(compare(prod, Scalar(1)) == 0);
  // det Gram = det(B)^2 det(phi) = 1 * 5
  CHECK(compare(lp.covolume_sq(), Scalar(5)) == 0);
}

TEST_CASE("embedding and norms agree with the Gram matrix") {
  Lattice lat = Lattice::make(rational_matrix({{2, 1}, {1, 1}}));
  std::vector<int64_t> c = {3, -2};
  VecS v = lat.embed(c);  // 3*(2,1) - 2*(1,1) = (4,1)
  CHECK(compare(v[0], Scalar(4)) == 0);
  CHECK(compare(v[1], Scalar(1)) == 0);
  CHECK(compare(lat.norm_sq(c), Scalar(17)) == 0);
  auto vf = lat.embed_f(c);
  CHECK(vf[0] == doctest::Approx(4.0));
  CHECK(vf[1] == doctest::Approx(1.0));
}

TEST_CASE("ellipsoid enumeration matches a box-scan oracle") {
  Lcg rng(20240517);
  int trials_run = 0;
  for (int trial = 0; trial < 30; trial++) {
    int n = trial < 20 ? 2 : 3;
    // random integer basis with nonzero determinant
    std::vector<std::vector<long>> b(n, std::vector<long>(n));
    MatS bs;
    while (true) {
      for (auto& row : b)
        for (auto& x : row) x = rng.range(-3, 3);
      bs = rational_matrix(b);
      Scalar d = det(bs);
      if (!d.is_zero()) break;
    }
    // integer Gram G = B B^T
    std::vector<std::vector<long>> g(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        for (int k = 0; k < n; k++) g[i][j] += b[i][k] * b[j][k];
    MatS gram = rational_matrix(g);

    long den = rng.range(1, 4);
    std::vector<Rat> center_q(n);
    VecS center_s(n, Scalar(0));
    for (int i = 0; i < n; i++) {
      center_q[i] = Rat(rng.range(-8, 8)) / den;
      center_s[i] = Scalar(center_q[i]);
    }
    Rat radius2 = Rat(rng.range(1, 40)) / rng.range(1, 3);

    // oracle: exact rational quadratic form over a certified coefficient box
    auto qval = [&](const std::vector<int64_t>& c) {
      Rat q = 0;
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
          q += (Rat(static_cast<long>(c[i])) - center_q[i]) * g[i][j] *
               (Rat(static_cast<long>(c[j])) - center_q[j]);
      return q;
    };
    MatS ginv = inverse(gram);
    std::vector<long> lo(n), hi(n);
    bool feasible_box = true;
    for (int i = 0; i < n; i++) {
      Scalar bound_sq = ginv[i][i] * Scalar(radius2);
      double w = std::sqrt(std::max(0.0, bound_sq.to_float())) + 1.0;
      if (w > 40) {
        feasible_box = false;
        break;
      }
      double cc = to_double(center_q[i]);
      lo[i] = static_cast<long>(std::floor(cc - w));
      hi[i] = static_cast<long>(std::ceil(cc + w));
    }
    if (!feasible_box) continue;
    trials_run++;

    std::set<std::vector<int64_t>> oracle;
    std::vector<int64_t> c(n, 0);
    std::function<void(int)> scan = [&](int level) {
      if (level == n) {
        if (qval(c) <= radius2) oracle.insert(c);
        return;
      }
      for (long x = lo[level]; x <= hi[level]; x++) {
        c[level] = x;
        scan(level + 1);
      }
    };
    scan(0);

    std::vector<std::vector<int64_t>> raw;
    enumerate_ellipsoid({gram, center_s, radius2, 0},
                        [&](const std::vector<int64_t>& p) { raw.push_back(p); });
    // no under-inclusion: every oracle point was visited
    std::set<std::vector<int64_t>> raw_set(raw.begin(), raw.end());
    for (const auto& p : oracle) CHECK(raw_set.count(p) == 1);
    // after the exact membership filter, the two sets agree perfectly
    std::set<std::vector<int64_t>> filtered;
    for (const auto& p : raw)
      if (qval(p) <= radius2) filtered.insert(p);
    CHECK(filtered == oracle);

    // deterministic visit order: a second run yields the identical sequence
    std::vector<std::vector<int64_t>> raw2;
    enumerate_ellipsoid({gram, center_s, radius2, 0},
                        [&](const std::vector<int64_t>& p) { raw2.push_back(p); });
    CHECK(raw == raw2);
  }
  CHECK(trials_run >= 20);
}

TEST_CASE("zero-dimensional enumeration emits the origin exactly once") {
  int calls = 0;
  enumerate_ellipsoid({{}, {}, Rat(3), 0},
                      [&](const std::vector<int64_t>& c) {
                        CHECK(c.empty());
                        calls++;
                      });
  CHECK(calls == 1);
  enumerate_ellipsoid({{}, {}, Rat(-1), 0},
                      [&](const std::vector<int64_t>&) { calls++; });
  CHECK(calls == 1);
}

TEST_CASE("enumeration respects its work budget") {
  MatS gram = rational_matrix({{1, 0}, {0, 1}});
  CHECK(fails_with(ErrorCode::BudgetExceeded, [&] {
    enumerate_ellipsoid({gram, {}, Rat(1000000), 10},
                        [](const std::vector<int64_t>&) {});
  }));
  Lattice z2 = Lattice::make(rational_matrix({{1, 0}, {0, 1}}));
  CHECK(fails_with(ErrorCode::RadiusTooLargeForBudget,
                   [&] { z2.minimal_vectors(Rat(1000), 10); }));
}

TEST_CASE("short vectors of Z^2 and of an embedded quadratic module") {
  Lattice z2 = Lattice::make(rational_matrix({{1, 0}, {0, 1}}));
  auto mv = z2.minimal_vectors(Rat(1));
  std::vector<std::vector<int64_t>> want = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  CHECK(mv == want);
  mv = z2.minimal_vectors(Rat(3) / 2);
  CHECK(mv.size() == 8);  // adds the four diagonal vectors
  CHECK(mv.front() == std::vector<int64_t>{-1, -1});
  CHECK(mv.back() == std::vector<int64_t>{1, 1});

  // image of Z[sqrt2] under (id, conjugate): rows (1,1) and (t,-t), t=+sqrt2
  auto f = analyze_field({-2, 0, 1});
  Scalar t(FieldElement::generator(f, 1));
  MatS basis = {{Scalar(1), Scalar(1)}, {t, Scalar(0) - t}};
  Lattice m = Lattice::make(basis);
  CHECK(compare(m.covolume_sq(), Scalar(8)) == 0);
  CHECK(m.covolume() == doctest::Approx(2.8284271247461903).epsilon(1e-12));
  auto sv = m.minimal_vectors(Rat(3) / 2);
  // |a + b sqrt2|^2 + |a - b sqrt2|^2 = 2a^2 + 4b^2 <= 9/4 forces (a,b)=(+-1,0)
  std::vector<std::vector<int64_t>> want2 = {{-1, 0}, {1, 0}};
  CHECK(sv == want2);
  VecS v = m.embed({1, 0});
  CHECK(compare(v[0], Scalar(1)) == 0);
  CHECK(compare(v[1], Scalar(1)) == 0);
}

TEST_CASE("theta identity holds for Z^n at unit temperature") {
  // sum over Z of exp(-pi k^2) = pi^(1/4) / Gamma(3/4)
  const double theta1 = 1.0864348112133080;
  Lattice z1 = Lattice::make(rational_matrix({{1}}));
  auto r = z1.theta_check(Rat(1));
  CHECK(r.lhs == doctest::Approx(theta1).epsilon(1e-10));
  CHECK(r.rhs == doctest::Approx(theta1).epsilon(1e-10));
  CHECK(r.rel_gap <= 1e-10);
  CHECK(r.tail_bound <= 1e-12);
  CHECK(r.terms_lhs >= 7);  // at least k in -3..3

  Lattice z2 = Lattice::make(rational_matrix({{1, 0}, {0, 1}}));
  auto r2 = z2.theta_check(Rat(1));
  CHECK(r2.lhs == doctest::Approx(theta1 * theta1).epsilon(1e-10));
  CHECK(r2.rel_gap <= 1e-10);
}

TEST_CASE("theta identity survives scaling, shearing and ambient forms") {
  std::vector<Rat> temps = {Rat(1) / 2, Rat(1), Rat(2)};
  // dilated line, sheared plane, non-standard ambient form, 3d with denominators
  std::vector<Lattice> lats;
  lats.push_back(Lattice::make(rational_matrix({{2}})));
  lats.push_back(Lattice::make(rational_matrix({{1, 0}, {1, 1}})));
  lats.push_back(Lattice::make(rational_matrix({{1, 0}, {0, 1}}),
                               rational_matrix({{2, 1}, {1, 3}})));
  {
    MatS b = rational_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    b[0][0] = Scalar(Rat(1) / 2);
    b[1][0] = Scalar(Rat(1) / 3);
    lats.push_back(Lattice::make(b));
  }
  for (const auto& lat : lats) {
    for (const auto& t : temps) {
      auto r = lat.theta_check(t);
      CHECK(r.rel_gap <= 1e-9);
      CHECK(r.tail_bound <= 1e-9);
    }
  }
}

TEST_CASE("theta identity with exact algebraic basis entries") {
  auto f = analyze_field({-2, 0, 1});
  Scalar t(FieldElement::generator(f, 1));
  MatS basis = {{Scalar(1), Scalar(1)}, {t, Scalar(0) - t}};
  Lattice m = Lattice::make(basis);
  auto r = m.theta_check(Rat(1));
  CHECK(r.rel_gap <= 1e-9);
  // Gram is diag(2,4), so the primal side factors into two 1d thetas
  double s2 = 0, s4 = 0;
  for (int k = -10; k <= 10; k++) {
    s2 += std::exp(-M_PI * 2.0 * k * k);
    s4 += std::exp(-M_PI * 4.0 * k * k);
  }
  CHECK(r.lhs == doctest::Approx(s2 * s4).epsilon(1e-10));
}

TEST_CASE("theta rejects non-positive temperature") {
  Lattice z1 = Lattice::make(rational_matrix({{1}}));
  CHECK(fails_with(ErrorCode::NonPositiveParameter,
                   [&] { z1.theta_check(Rat(0)); }));
}
