#include "latgeo/spectral.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "latgeo/error.hpp"

namespace latgeo {
namespace {

// eps^{-q} by repeated division, matching the leading-term evaluation on the
// counting side so the two code paths produce bit-identical scale factors.
double inv_power(const Rat& eps, int q) {
  double e = to_double(eps);
  double out = 1.0;
  for (int i = 0; i < q; i++) out /= e;
  return out;
}

}  // namespace

FlatTorus FlatTorus::make(MatS basis, MatS metric, const SubspaceSpec& f) {
  FlatTorus t;
  t.torus_ = Lattice::make(std::move(basis), metric);  // validates SPD metric
  const int n = t.torus_.dim();
  if (f.ambient_dim != n)
    fail(ErrorCode::InvalidDims, "foliation subspace has the wrong ambient dimension");
  const bool standard = metric.empty();
  t.metric_ = standard ? mat_identity(n) : metric;
  t.metric_inv_ = standard ? mat_identity(n) : inverse(metric);

  // Dual lattice under the standard pairing, carrying the inverse metric.
  MatS dual_rows = mat_transpose(inverse(t.torus_.basis()));
  t.dual_ = Lattice::make(std::move(dual_rows), standard ? MatS{} : t.metric_inv_);

  // The fixed dual subspace is the metric image of F: the eigenvalue form
  // splits orthogonally (under the inverse metric) along gF and its
  // complement, the standard orthogonal complement of F.
  const int p = f.dim();
  MatS fstar_rows =
      (standard || p == 0) ? f.rows : mat_mul(f.rows, t.metric_);
  SubspaceSpec fstar =
      p == 0 ? f : SubspaceSpec::make(n, fstar_rows);
  t.split_ = split_by_subspace(t.dual_, fstar);

  if (p == 0) {
    t.proj_f_ = mat_zero(n, n);
  } else if (p == n) {
    t.proj_f_ = mat_identity(n);
  } else {
    MatS m = fstar_rows;
    for (const auto& row : t.split_.expanded_rows) m.push_back(row);
    MatS mt = mat_transpose(m);
    MatS sel = mat_zero(n, n);
    for (int i = 0; i < p; i++) sel[i][i] = Scalar(1);
    t.proj_f_ = mat_mul(mat_mul(mt, sel), inverse(mt));
  }
  return t;
}

Scalar FlatTorus::eigenvalue_factor(const std::vector<std::int64_t>& k,
                                    const Rat& eps) const {
  if (static_cast<int>(k.size()) != dim())
    fail(ErrorCode::InvalidDims, "dual coefficient vector has the wrong length");
  if (eps <= 0)
    fail(ErrorCode::NonPositiveParameter, "adiabatic parameter must be positive");
  VecS kv = dual_.embed(k);
  VecS a = mat_vec(proj_f_, kv);
  VecS b = vec_sub(kv, a);
  const MatS& phi = dual_.phi();
  return dot_phi(a, phi, a) + Scalar(Rat(eps * eps)) * dot_phi(b, phi, b);
}

double FlatTorus::eigenvalue(const std::vector<std::int64_t>& k,
                             const Rat& eps) const {
  return 4.0 * M_PI * M_PI * eigenvalue_factor(k, eps).to_float();
}

Domain FlatTorus::threshold_domain(const Rat& mu) const {
  if (mu <= 0)
    fail(ErrorCode::NonPositiveParameter, "eigenvalue threshold must be positive");
  VecS center(dim(), Scalar(0));
  return Domain::ellipsoid(std::move(center),
                           mat_scale(metric_inv_, Scalar(Rat(1) / mu)));
}

CountResult counting_function(const FlatTorus& t, const Rat& mu, const Rat& eps,
                              const Rat& tol, std::int64_t budget) {
  return count_sliced(t.dual_split(), t.threshold_domain(mu), eps, {}, tol,
                      budget);
}

double leading_term_spectral(const FlatTorus& t, const Rat& mu, const Rat& eps,
                             std::int64_t budget) {
  if (mu <= 0)
    fail(ErrorCode::NonPositiveParameter, "eigenvalue threshold must be positive");
  if (eps <= 0)
    fail(ErrorCode::NonPositiveParameter, "adiabatic parameter must be positive");
  const SubspaceSplit& sd = t.dual_split();
  const int m = sd.n - sd.r;  // dimension of each slice section
  const MatS& phi = t.dual().phi();

  double sum = 0.0;
  if (sd.r == 0) {
    sum = std::pow(to_double(mu), 0.5 * m);
  } else {
    // Gram matrix of the slice labels under the dual metric; every label
    // inside the threshold contributes its section radius to the power m.
    MatS g(sd.r, VecS(sd.r));
    for (int i = 0; i < sd.r; i++)
      for (int j = 0; j < sd.r; j++)
        g[i][j] = dot_phi(sd.slice_index_vecs[i], phi, sd.slice_index_vecs[j]);
    EllipsoidEnum spec;
    spec.gram = g;
    spec.center = VecS(sd.r, Scalar(0));
    spec.radius2 = mu;
    spec.budget = budget;
    enumerate_ellipsoid(spec, [&](const std::vector<std::int64_t>& c) {
      Scalar nm2(Rat(0));
      for (int i = 0; i < sd.r; i++) {
        Scalar ci{static_cast<long>(c[i])};
        for (int j = 0; j < sd.r; j++)
          nm2 += ci * g[i][j] * Scalar(static_cast<long>(c[j]));
      }
      Scalar slack = Scalar(mu) - nm2;
      if (slack.sign() > 0) sum += std::pow(slack.to_float(), 0.5 * m);
    });
  }

  double pref = unit_ball_volume(m) * t.torus().covolume() /
                std::sqrt(sd.covol_sq_dual_in_f.to_float());
  return inv_power(eps, sd.q) * pref * sum;
}

double partial_density_of_states(double rho, const std::vector<double>& kpoint,
                                 int d, int k) {
  if (k <= 0 || k >= d)
    fail(ErrorCode::InvalidDims,
         "partial density of states needs 0 < k < d");
  if (static_cast<int>(kpoint.size()) != k)
    fail(ErrorCode::InvalidDims, "k-point has the wrong length");
  if (rho < 0)
    fail(ErrorCode::NonPositiveParameter, "shell radius must be nonnegative");
  const int ell = d - k;
  const double rho2 = rho * rho;
  double sum = 0.0;
  std::vector<long> gamma(k);
  // iterate over the integer box [ceil(k_i - rho), floor(k_i + rho)]^k
  std::function<void(int, double)> walk = [&](int i, double acc) {
    if (acc >= rho2) return;
    if (i == k) {
      sum += std::pow(rho2 - acc, 0.5 * ell);
      return;
    }
    long lo = static_cast<long>(std::ceil(kpoint[i] - rho));
    long hi = static_cast<long>(std::floor(kpoint[i] + rho));
    for (long gi = lo; gi <= hi; gi++) {
      double dlt = static_cast<double>(gi) - kpoint[i];
      walk(i + 1, acc + dlt * dlt);
    }
  };
  walk(0, 0.0);
  return unit_ball_volume(ell) * sum;
}

}  // namespace latgeo
