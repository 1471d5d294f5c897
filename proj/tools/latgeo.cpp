// Command-line driver: declarative experiment runs (counts, leading-term
// scans, remainder fits, adiabatic spectra) plus inspection commands for
// splits, algebraic lattices and good-position checks.  Configs are JSON
// documents parsed by the descriptors module; artifacts are CSV / JSON / SVG
// files that are byte-identical across reruns (the wall_time_ms column of
// count tables being the one deliberate exception).
//
// Exit codes: 0 success (and verdict pass), 2 verdict fail or refutation,
// 1 any error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latgeo/asymptotics.hpp"
#include "latgeo/counting.hpp"
#include "latgeo/descriptors.hpp"
#include "latgeo/domains.hpp"
#include "latgeo/error.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/numberfield.hpp"
#include "latgeo/spectral.hpp"
#include "latgeo/splitter.hpp"

using namespace latgeo;

namespace {

const double kPi = std::acos(-1.0);
const double kFourPiSq = 4.0 * kPi * kPi;

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string scalar_text(const Scalar& s) {
  Rat r;
  if (s.try_rational(r)) return rat_str(r);
  return fmt_g(s.to_float());
}

std::string row_text(const VecS& row) {
  std::string out = "[";
  for (size_t i = 0; i < row.size(); i++) {
    if (i) out += ", ";
    out += scalar_text(row[i]);
  }
  return out + "]";
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::path p = std::filesystem::path(dir) / name;
  std::error_code ec;
  if (!p.parent_path().empty())
    std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + p.string());
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for " + p.string());
}

void require_field(bool present, const char* name) {
  if (!present)
    fail(ErrorCode::ParseError,
         std::string("config: missing required field \"") + name + "\"");
}

struct Common {
  std::string config, out, tol, seed;
  int workers = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required = true) {
  auto* opt = sub->add_option("--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "output directory for artifacts");
  sub->add_option("--tol", c.tol, "classification tolerance, rational \"p/q\"");
  sub->add_option("--workers", c.workers, "worker count (recorded; kernels run sequentially)");
  sub->add_option("--seed", c.seed, "seed for quasi-Monte Carlo stages (hex ok)");
}

ExperimentConfig load_merged(const Common& c) {
  ExperimentConfig cfg = load_experiment(c.config);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (!c.tol.empty()) {
    cfg.tol = parse_rat(c.tol);
    if (cfg.tol < 0)
      fail(ErrorCode::ParseError, "--tol: tolerance must be nonnegative");
  }
  if (c.workers > 0) cfg.workers = c.workers;
  if (!c.seed.empty()) {
    try {
      cfg.seed = std::stoull(c.seed, nullptr, 0);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "--seed: malformed seed \"" + c.seed + "\"");
    }
  }
  return cfg;
}

SubspaceSplit split_of(const ExperimentConfig& cfg) {
  require_field(cfg.has_lattice, "lattice");
  require_field(cfg.has_subspace, "subspace");
  return split_by_subspace(cfg.lattice, cfg.subspace);
}

void check_shift(const ExperimentConfig& cfg) {
  if (cfg.shift.empty()) return;
  if (static_cast<int>(cfg.shift.size()) != cfg.lattice.dim())
    fail(ErrorCode::InvalidDims,
         "shift has " + std::to_string(cfg.shift.size()) + " entries for a " +
             std::to_string(cfg.lattice.dim()) + "-dimensional lattice");
}

bool shift_is_zero(const VecS& v) {
  for (const Scalar& s : v)
    if (compare(s, Scalar(0)) != 0) return false;
  return true;
}

const char* method_name(CountMethod m) {
  switch (m) {
    case CountMethod::Naive: return "naive";
    case CountMethod::Sliced: return "sliced";
    case CountMethod::Multiplicative: return "multiplicative";
  }
  return "unknown";
}

std::string multiplier_text(const Multiplier& t) {
  std::string out = "T[";
  bool first = true;
  for (const Scalar& s : t.real_parts) {
    if (!first) out += ";";
    first = false;
    out += scalar_text(s);
  }
  for (const auto& [re, im] : t.complex_parts) {
    if (!first) out += ";";
    first = false;
    out += "(" + scalar_text(re) + " " + scalar_text(im) + ")";
  }
  return out + "]";
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------- scan bits

std::string scan_csv(const RemainderScan& scan) {
  std::string csv = "epsilon,count_lo,count_hi,leading,rem_lo,rem_hi\n";
  for (const ScanRow& row : scan.rows) {
    csv += rat_str(row.eps) + "," + std::to_string(row.certain) + "," +
           std::to_string(row.certain + row.boundary_hits) + "," +
           fmt_g(row.leading) + "," + fmt_g(row.rem_lo) + "," +
           fmt_g(row.rem_hi) + "\n";
  }
  return csv;
}

std::string fit_report(const RemainderScan& scan, const ExperimentConfig& cfg) {
  Json r;
  r["beta"] = scan.fit.beta;
  r["C"] = scan.fit.constant;
  r["r2"] = scan.fit.r2;
  r["verdict"] = scan.verdict;
  r["kind"] = regime_kind_name(scan.regime.kind);
  r["log_form"] = scan.fit.log_form;
  if (scan.fit.log_form) r["log_degree"] = scan.fit.log_degree;
  r["predicted_power"] = scan.predicted.power;
  r["predicted_log_degree"] = scan.predicted.total_log_degree();
  std::int64_t used = 0;
  for (const ScanRow& row : scan.rows) used += row.used_in_fit ? 1 : 0;
  r["rows_total"] = scan.rows.size();
  r["rows_used"] = used;
  r["note"] = scan.verdict_note;
  r["seed"] = cfg.seed;
  r["workers"] = cfg.workers;
  return r.dump(2) + "\n";
}

// Minimal log-log plot: measured |R| per eps plus the fitted envelope.
std::string svg_loglog(const RemainderScan& scan) {
  const double W = 720, H = 480, L = 70, R = 24, T = 28, B = 56;
  const double plot_w = W - L - R, plot_h = H - T - B;
  std::vector<double> xs, ys;
  std::vector<bool> used;
  for (const ScanRow& row : scan.rows) {
    double mid = 0.5 * (row.rem_lo + row.rem_hi);
    xs.push_back(-std::log2(to_double(row.eps)));
    ys.push_back(std::log2(std::max(std::abs(mid), 1.0 / 1024.0)));
    used.push_back(row.used_in_fit);
  }
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (size_t i = 0; i < xs.size(); i++) {
    xmin = std::min(xmin, xs[i]);
    xmax = std::max(xmax, xs[i]);
    ymin = std::min(ymin, ys[i]);
    ymax = std::max(ymax, ys[i]);
  }
  if (xmax - xmin < 1e-9) { xmin -= 1; xmax += 1; }
  if (ymax - ymin < 1e-9) { ymin -= 1; ymax += 1; }
  ymin -= 0.5; ymax += 0.5;
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return T + (ymax - y) / (ymax - ymin) * plot_h; };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
       "viewBox=\"0 0 720 480\">\n";
  s += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  // axes
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) +
       "\" y2=\"" + num(H - B) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" +
       num(W - R) + "\" y2=\"" + num(H - B) + "\" stroke=\"black\"/>\n";
  // integer ticks
  int xstep = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / 8.0)));
  for (int x = static_cast<int>(std::ceil(xmin)); x <= xmax; x += xstep) {
    s += "<line x1=\"" + num(sx(x)) + "\" y1=\"" + num(H - B) + "\" x2=\"" +
         num(sx(x)) + "\" y2=\"" + num(H - B + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(H - B + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(x) +
         "</text>\n";
  }
  int ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 8.0)));
  for (int y = static_cast<int>(std::ceil(ymin)); y <= ymax; y += ystep) {
    s += "<line x1=\"" + num(L - 5) + "\" y1=\"" + num(sy(y)) + "\" x2=\"" +
         num(L) + "\" y2=\"" + num(sy(y)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(L - 9) + "\" y=\"" + num(sy(y) + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + std::to_string(y) +
         "</text>\n";
  }
  s += "<text x=\"" + num(L + plot_w / 2) + "\" y=\"" + num(H - 12) +
       "\" font-size=\"12\" text-anchor=\"middle\">log2(1/eps)</text>\n";
  s += "<text x=\"16\" y=\"" + num(T + plot_h / 2) +
       "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(T + plot_h / 2) + ")\">log2|R|</text>\n";
  // fitted envelope over the x range
  std::string fitpts;
  for (int i = 0; i <= 64; i++) {
    double x = xmin + (xmax - xmin) * i / 64.0;
    double y;
    if (scan.fit.log_form)
      y = std::log2(scan.fit.constant) +
          scan.fit.log_degree * std::log2(1.0 + std::abs(x));
    else
      y = std::log2(scan.fit.constant) - scan.fit.beta * x;
    y = std::min(std::max(y, ymin), ymax);
    fitpts += num(sx(x)) + "," + num(sy(y)) + " ";
  }
  s += "<polyline points=\"" + fitpts +
       "\" fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"6 3\"/>\n";
  // data
  std::string datapts;
  for (size_t i = 0; i < xs.size(); i++)
    datapts += num(sx(xs[i])) + "," + num(sy(ys[i])) + " ";
  s += "<polyline points=\"" + datapts +
       "\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
  for (size_t i = 0; i < xs.size(); i++)
    s += "<circle cx=\"" + num(sx(xs[i])) + "\" cy=\"" + num(sy(ys[i])) +
         "\" r=\"3\" fill=\"" + (used[i] ? "#1f77b4" : "white") +
         "\" stroke=\"#1f77b4\"/>\n";
  std::string legend;
  if (scan.fit.log_form)
    legend = "fit: c=" + fmt_short(scan.fit.constant) + " log-degree " +
             fmt_short(scan.fit.log_degree) + " (slope " +
             fmt_short(scan.fit.beta) + ")";
  else
    legend = "fit: beta=" + fmt_short(scan.fit.beta) + " C=" +
             fmt_short(scan.fit.constant) + " r2=" + fmt_short(scan.fit.r2);
  s += "<text x=\"" + num(W - R) + "\" y=\"" + num(T - 8) +
       "\" font-size=\"12\" text-anchor=\"end\">" + legend + "</text>\n";
  s += "</svg>\n";
  return s;
}

std::vector<ScanRow> scan_rows(const SubspaceSplit& sd,
                               const ExperimentConfig& cfg) {
  require_field(cfg.has_domain, "domain");
  require_field(!cfg.epsilons.empty(), "scan.epsilons");
  if (!cfg.shift.empty() && !shift_is_zero(cfg.shift))
    fail(ErrorCode::InconsistentParameters,
         "scans use the slice decomposition and require a zero shift");
  std::vector<ScanRow> rows;
  for (const Rat& e : cfg.epsilons) {
    try {
      CountResult c = count_sliced(sd, cfg.domain, e, {}, cfg.tol, 0);
      double lt = leading_term(sd, cfg.domain, e, 0);
      ScanRow row;
      row.eps = e;
      row.certain = c.certain;
      row.boundary_hits = c.boundary_hits;
      row.leading = lt;
      row.rem_lo = static_cast<double>(c.certain) - lt;
      row.rem_hi = static_cast<double>(c.certain + c.boundary_hits) - lt;
      rows.push_back(row);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::BudgetExceeded)
        fail(ErrorCode::BudgetExceeded,
             "at eps = " + rat_str(e) + ": " + err.what());
      throw;
    }
  }
  return rows;
}

int finish_fit(const RemainderScan& scan, const ExperimentConfig& cfg,
               bool write_scan_artifacts) {
  std::string report = fit_report(scan, cfg);
  if (!cfg.out_dir.empty()) {
    if (write_scan_artifacts) {
      write_file(cfg.out_dir, "scan.csv", scan_csv(scan));
      write_file(cfg.out_dir, "scan.svg", svg_loglog(scan));
    }
    write_file(cfg.out_dir, "fit.json", report);
  }
  std::cout << report;
  std::cout << "verdict: " << (scan.verdict ? "pass" : "fail") << " — "
            << scan.verdict_note << "\n";
  return scan.verdict ? 0 : 2;
}

// ---------------------------------------------------------------- commands

int run_count(const Common& c) {
  ExperimentConfig cfg = load_merged(c);
  require_field(cfg.has_lattice, "lattice");
  require_field(cfg.has_domain, "domain");
  check_shift(cfg);
  std::string csv = "epsilon,certain,boundary_hits,method,wall_time_ms\n";
  if (cfg.multiplier) {
    auto t0 = std::chrono::steady_clock::now();
    CountResult r = count_multiplicative(cfg.lattice, *cfg.multiplier,
                                         cfg.domain, cfg.shift, cfg.tol, 0);
    csv += multiplier_text(*cfg.multiplier) + "," + std::to_string(r.certain) +
           "," + std::to_string(r.boundary_hits) + "," +
           method_name(r.method) + "," + std::to_string(elapsed_ms(t0)) + "\n";
  } else {
    require_field(!cfg.epsilons.empty(), "scan.epsilons");
    SubspaceSplit sd = split_of(cfg);
    for (const Rat& e : cfg.epsilons) {
      auto t0 = std::chrono::steady_clock::now();
      CountResult r = count(sd, cfg.domain, e, cfg.shift, cfg.tol, 0);
      csv += rat_str(e) + "," + std::to_string(r.certain) + "," +
             std::to_string(r.boundary_hits) + "," + method_name(r.method) +
             "," + std::to_string(elapsed_ms(t0)) + "\n";
    }
  }
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_file(cfg.out_dir, "counts.csv", csv);
  return 0;
}

int run_leading(const Common& c) {
  ExperimentConfig cfg = load_merged(c);
  require_field(cfg.has_domain, "domain");
  require_field(!cfg.epsilons.empty(), "scan.epsilons");
  SubspaceSplit sd = split_of(cfg);
  std::string csv = "epsilon,leading\n";
  for (const Rat& e : cfg.epsilons)
    csv += rat_str(e) + "," + fmt_g(leading_term(sd, cfg.domain, e, 0)) + "\n";
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_file(cfg.out_dir, "leading.csv", csv);
  return 0;
}

int run_scan(const Common& c) {
  ExperimentConfig cfg = load_merged(c);
  SubspaceSplit sd = split_of(cfg);
  RegimeClass rc = regime_for_split(cfg, sd);
  RemainderScan scan = fit_scan_rows(scan_rows(sd, cfg), rc);
  std::cout << scan_csv(scan);
  return finish_fit(scan, cfg, true);
}

int run_fit(const Common& c, const std::string& csv_path) {
  ExperimentConfig cfg = load_merged(c);
  SubspaceSplit sd = split_of(cfg);
  RegimeClass rc = regime_for_split(cfg, sd);

  std::string path = csv_path;
  if (path.empty()) {
    if (cfg.out_dir.empty())
      fail(ErrorCode::ParseError,
           "fit needs --csv PATH or an output directory holding scan.csv");
    path = (std::filesystem::path(cfg.out_dir) / "scan.csv").string();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open scan table " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "epsilon,count_lo,count_hi,leading,rem_lo,rem_hi")
    fail(ErrorCode::ParseError, path + ": not a scan table (bad header)");
  std::vector<ScanRow> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6)
      fail(ErrorCode::ParseError,
           path + " line " + std::to_string(lineno) + ": expected 6 columns");
    try {
      ScanRow row;
      row.eps = parse_rat(f[0]);
      row.certain = std::stoll(f[1]);
      row.boundary_hits = std::stoll(f[2]) - row.certain;
      row.leading = std::stod(f[3]);
      row.rem_lo = std::stod(f[4]);
      row.rem_hi = std::stod(f[5]);
      rows.push_back(row);
    } catch (const std::exception& e) {
      fail(ErrorCode::ParseError,
           path + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  RemainderScan scan = fit_scan_rows(std::move(rows), rc);
  return finish_fit(scan, cfg, false);
}

// Exact quadratic form of the eigenvalue factor on dual coefficients,
// recovered from the factor by polarization.
MatS eigen_form(const FlatTorus& t, const Rat& eps) {
  int n = t.dim();
  MatS q(n, VecS(n, Scalar(0)));
  std::vector<std::int64_t> k(n, 0);
  VecS diag(n, Scalar(0));
  for (int i = 0; i < n; i++) {
    std::fill(k.begin(), k.end(), 0);
    k[i] = 1;
    diag[i] = t.eigenvalue_factor(k, eps);
    q[i][i] = diag[i];
  }
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) {
      std::fill(k.begin(), k.end(), 0);
      k[i] = 1;
      k[j] = 1;
      Scalar off = (t.eigenvalue_factor(k, eps) - diag[i] - diag[j]) / Scalar(2);
      q[i][j] = off;
      q[j][i] = off;
    }
  return q;
}

std::string eigenvalue_dump(const FlatTorus& t, const Rat& cutoff,
                            const std::vector<Rat>& epsilons) {
  int n = t.dim();
  std::string csv = "epsilon,lambda";
  for (int i = 1; i <= n; i++) csv += ",k" + std::to_string(i);
  csv += "\n";
  for (const Rat& eps : epsilons) {
    EllipsoidEnum spec;
    spec.gram = eigen_form(t, eps);
    spec.center = VecS(n, Scalar(0));
    spec.radius2 = cutoff;
    std::vector<std::pair<double, std::vector<std::int64_t>>> found;
    enumerate_ellipsoid(spec, [&](const std::vector<std::int64_t>& k) {
      Scalar factor = t.eigenvalue_factor(k, eps);
      if (compare(factor, Scalar(cutoff)) < 0)
        found.emplace_back(kFourPiSq * factor.to_float(), k);
    });
    std::sort(found.begin(), found.end());
    for (const auto& [lambda, k] : found) {
      csv += rat_str(eps) + "," + fmt_g(lambda);
      for (std::int64_t ki : k) csv += "," + std::to_string(ki);
      csv += "\n";
    }
  }
  return csv;
}

int run_spectrum(const Common& c) {
  ExperimentConfig cfg = load_merged(c);
  require_field(cfg.has_lattice, "lattice");
  require_field(cfg.has_subspace, "subspace");
  require_field(!cfg.lambdas.empty(), "scan.lambdas");
  require_field(!cfg.epsilons.empty(), "scan.epsilons");
  MatS metric = cfg.metric;
  if (!cfg.lattice.standard_inner_product()) {
    if (!metric.empty())
      fail(ErrorCode::InconsistentParameters,
           "metric given both as the lattice \"form\" and at top level");
    metric = cfg.lattice.phi();
  }
  FlatTorus t = FlatTorus::make(cfg.lattice.basis(), metric, cfg.subspace);
  std::string csv = "lambda,epsilon,N,leading,remainder\n";
  for (const Rat& mu : cfg.lambdas) {
    for (const Rat& eps : cfg.epsilons) {
      CountResult r = counting_function(t, mu, eps, cfg.tol, 0);
      double lt = leading_term_spectral(t, mu, eps, 0);
      double n = static_cast<double>(r.certain);
      csv += fmt_g(kFourPiSq * to_double(mu)) + "," + rat_str(eps) + "," +
             std::to_string(r.certain) + "," + fmt_g(lt) + "," +
             fmt_g(n - lt) + "\n";
    }
  }
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_file(cfg.out_dir, "spectrum.csv", csv);
  if (cfg.dump_below) {
    std::string dump = eigenvalue_dump(t, *cfg.dump_below, cfg.epsilons);
    if (!cfg.out_dir.empty()) {
      write_file(cfg.out_dir, "eigenvalues.csv", dump);
    } else {
      std::cout << "\n" << dump;
    }
  }
  return 0;
}

int run_pdos(double rho, int dim, int rank, const std::string& kpoint_text) {
  std::vector<double> kpoint;
  if (!kpoint_text.empty()) {
    std::stringstream ss(kpoint_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        kpoint.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "--kpoint: malformed number \"" + cell + "\"");
      }
    }
  } else {
    kpoint.assign(static_cast<size_t>(rank), 0.0);
  }
  std::cout << fmt_g(partial_density_of_states(rho, kpoint, dim, rank)) << "\n";
  return 0;
}

int run_lattice_info(const Common& c, const std::string& radius_text) {
  ExperimentConfig cfg = load_merged(c);
  SubspaceSplit sd = split_of(cfg);
  std::ostringstream out;
  out << "ambient dimension        n = " << sd.n << "\n";
  out << "fixed subspace dimension p = " << sd.p << "  (expanded q = " << sd.q
      << ")\n";
  out << "slice label rank         r = " << sd.r << "\n";
  out << "covolume(lattice)          = " << fmt_g(sd.lattice.covolume())
      << "  (squared: " << scalar_text(sd.lattice.covolume_sq()) << ")\n";
  out << "vol(V / Gamma_F)           = "
      << fmt_g(std::sqrt(sd.covol_sq_dual_in_f.to_float()))
      << "  (squared: " << scalar_text(sd.covol_sq_dual_in_f) << ")\n";
  out << "vol(V^perp / Gamma^perp)   = "
      << fmt_g(std::sqrt(sd.covol_sq_slices.to_float()))
      << "  (squared: " << scalar_text(sd.covol_sq_slices) << ")\n";
  Scalar resid =
      sd.covol_sq_slices - sd.lattice.covolume_sq() * sd.covol_sq_dual_in_f;
  if (compare(resid, Scalar(0)) == 0)
    out << "covolume identity residual = 0 (exact)\n";
  else
    out << "covolume identity residual = " << fmt_g(std::abs(resid.to_float()))
        << "\n";
  out << "Gamma_F generators (dual vectors in F):\n";
  if (sd.dual_in_f_vecs.empty()) out << "  (none: the dual meets F only in 0)\n";
  for (const VecS& row : sd.dual_in_f_vecs) out << "  " << row_text(row) << "\n";
  if (!sd.slice_index_vecs.empty()) {
    out << "slice index vectors:\n";
    for (const VecS& row : sd.slice_index_vecs)
      out << "  " << row_text(row) << "\n";
  }
  out << "slice lattice basis:\n";
  for (const VecS& row : sd.slice_lattice_vecs)
    out << "  " << row_text(row) << "\n";
  if (sd.r == 0 && sd.p > 0) {
    Rat radius = parse_rat(radius_text);
    TrivialIntersectionCert cert = verify_trivial_intersection(sd, radius, 0);
    out << "trivial-intersection certificate (radius " << rat_str(radius)
        << "): " << (cert.holds ? "holds" : "REFUTED") << ", "
        << cert.points_checked << " dual points checked";
    if (!cert.vacuous)
      out << ", min relative distance " << fmt_g(cert.min_ratio);
    out << "\n";
  }
  std::cout << out.str();
  return 0;
}

std::string poly_text(const QPoly& p) {
  std::string s;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--) {
    if (p[i] == 0) continue;
    Rat c = p[i];
    bool neg = c < 0;
    Rat a = neg ? Rat(-c) : c;
    if (s.empty())
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    bool unit = a == 1 && i > 0;
    if (!unit) s += rat_str(a);
    if (i >= 1) {
      if (!unit) s += "*";
      s += "x";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

// Module / lattice source shared by `field` and `good-position`: either a
// bundled preset name or a JSON file holding a module descriptor (optionally
// wrapped in {"module": ...}), for good-position also {"lattice": ...}.
struct AlgebraicSource {
  bool is_module = false;
  ModuleLattice module;
  Lattice lattice;
  MatS frame;  // optional "frame" key
};

AlgebraicSource load_algebraic(const std::string& preset,
                               const std::string& config, bool allow_lattice) {
  AlgebraicSource src;
  if (!preset.empty() && !config.empty())
    fail(ErrorCode::ParseError, "give either --preset or --config, not both");
  if (!preset.empty()) {
    Json j;
    j["preset"] = preset;
    src.module = module_from_json(j, "--preset");
    src.is_module = true;
    return src;
  }
  if (config.empty())
    fail(ErrorCode::ParseError, "missing --preset NAME or --config PATH");
  std::ifstream in(config, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + config);
  std::ostringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, config + ": malformed JSON: " + e.what());
  }
  if (j.is_object() && j.contains("frame"))
    src.frame = matrix_from_json(j["frame"], ScalarContext{}, "config.frame");
  if (j.is_object() && j.contains("module")) {
    src.module = module_from_json(j["module"], "config.module");
    src.is_module = true;
  } else if (j.is_object() && (j.contains("minpoly") || j.contains("preset"))) {
    Json m = j;
    m.erase("frame");
    src.module = module_from_json(m, "config");
    src.is_module = true;
  } else if (allow_lattice && j.is_object() && j.contains("lattice")) {
    src.lattice = lattice_from_json(j["lattice"], "config.lattice");
  } else {
    fail(ErrorCode::ParseError,
         "config: expected a \"module\" / \"minpoly\" descriptor" +
             std::string(allow_lattice ? " or a \"lattice\"" : ""));
  }
  return src;
}

int run_field(const std::string& preset, const std::string& config) {
  AlgebraicSource src = load_algebraic(preset, config, false);
  const ModuleLattice& ml = src.module;
  std::ostringstream out;
  out << "minimal polynomial: " << poly_text(ml.field->minpoly)
      << "   coefficients [";
  for (size_t i = 0; i < ml.field->minpoly.size(); i++)
    out << (i ? ", " : "") << rat_str(ml.field->minpoly[i]);
  out << "]\n";
  out << "degree " << ml.field->degree << ", signature (" << ml.field->num_real
      << " real, " << ml.field->num_complex << " complex pairs)"
      << ", designated embedding " << ml.generators[0].embedding() << "\n";
  out << "generators (power-basis coordinates) and field norms:\n";
  for (const FieldElement& g : ml.generators) {
    out << "  [";
    for (size_t i = 0; i < g.coords().size(); i++)
      out << (i ? ", " : "") << rat_str(g.coords()[i]);
    out << "]   norm " << rat_str(field_norm(g)) << "\n";
  }
  out << "embedded basis rows:\n";
  for (const VecS& row : ml.embedded.basis()) {
    out << "  [";
    for (size_t i = 0; i < row.size(); i++)
      out << (i ? ", " : "") << fmt_g(row[i].to_float());
    out << "]\n";
  }
  out << "covolume^2 = " << scalar_text(ml.embedded.covolume_sq())
      << "   covolume = " << fmt_g(ml.embedded.covolume()) << "\n";
  out << "embedding: "
      << (ml.embedding_exact ? "exact algebraic rows"
                             : "certified rational approximation of the rows")
      << "\n";
  std::cout << out.str();
  return 0;
}

int run_good_position(const std::string& preset, const std::string& config,
                      const std::string& mode_text,
                      const std::string& radius_text) {
  AlgebraicSource src = load_algebraic(preset, config, true);
  GoodPositionMode mode;
  if (mode_text == "certified")
    mode = GoodPositionMode::Certified;
  else if (mode_text == "search")
    mode = GoodPositionMode::Search;
  else
    fail(ErrorCode::ParseError,
         "--mode must be \"certified\" or \"search\", got \"" + mode_text + "\"");
  Rat radius = parse_rat(radius_text);
  int n = src.is_module ? src.module.embedded.dim() : src.lattice.dim();
  MatS frame = src.frame;
  if (frame.empty()) {
    frame.assign(n, VecS(n, Scalar(0)));
    for (int i = 0; i < n; i++) frame[i][i] = Scalar(1);
  }
  GoodPositionResult res =
      src.is_module
          ? good_position_check(src.module, frame, mode, radius, 0)
          : good_position_check(src.lattice, frame, mode, radius, 0);
  std::ostringstream out;
  out << "mode: " << mode_text << "\n";
  if (res.refuted) {
    out << "REFUTED: nonzero lattice point with vanishing norm form\n";
    out << "witness coefficients: [";
    for (size_t i = 0; i < res.witness.size(); i++)
      out << (i ? ", " : "") << res.witness[i];
    out << "]\n";
  } else if (res.certified) {
    out << "certified lower bound on |norm form|: " << rat_str(res.bound_exact)
        << " (" << fmt_g(res.bound) << ")\n";
  } else {
    out << "no vanishing point found within radius " << rat_str(radius) << "\n";
    out << "points checked: " << res.points_checked
        << "   minimum |norm form| seen: " << fmt_g(res.min_abs) << "\n";
  }
  std::cout << out.str();
  return res.refuted ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lattice point counts in anisotropically expanding domains: exact "
      "counting, leading-term asymptotics, remainder-rate fits, and adiabatic "
      "spectra of flat tori"};
  app.require_subcommand(1);
  int rc = 0;

  Common c_count, c_leading, c_scan, c_fit, c_spectrum, c_info;
  std::string fit_csv, info_radius = "8";
  double pdos_rho = 0;
  int pdos_dim = 0, pdos_rank = 0;
  std::string pdos_kpoint;
  std::string alg_preset, alg_config, gp_mode = "certified", gp_radius = "8";
  std::string gp_preset, gp_config;

  CLI::App* count = app.add_subcommand(
      "count", "exact lattice point counts over the configured eps values");
  add_common(count, c_count);
  count->callback([&] { rc = run_count(c_count); });

  CLI::App* leading = app.add_subcommand(
      "leading", "leading term of the count asymptotics per eps");
  add_common(leading, c_leading);
  leading->callback([&] { rc = run_leading(c_leading); });

  CLI::App* scan = app.add_subcommand(
      "scan", "count, compare against the leading term, and fit the "
              "remainder decay (exit 2 when the verdict fails)");
  add_common(scan, c_scan);
  scan->callback([&] { rc = run_scan(c_scan); });

  CLI::App* fitcmd = app.add_subcommand(
      "fit", "refit a saved scan.csv against the configured regime");
  add_common(fitcmd, c_fit);
  fitcmd->add_option("--csv", fit_csv, "scan table to refit (default <out>/scan.csv)");
  fitcmd->callback([&] { rc = run_fit(c_fit, fit_csv); });

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "adiabatic eigenvalue counts of a flat torus over a "
                  "(lambda, eps) grid; lambda is 4*pi^2 times the configured "
                  "rational thresholds");
  add_common(spectrum, c_spectrum);
  spectrum->callback([&] { rc = run_spectrum(c_spectrum); });

  CLI::App* pdos = app.add_subcommand(
      "pdos", "partial density of states S(rho, k; d, k-rank)");
  pdos->add_option("--rho", pdos_rho, "radius")->required();
  pdos->add_option("--dim", pdos_dim, "ambient dimension d")->required();
  pdos->add_option("--rank", pdos_rank, "lattice rank k, 0 < k < d")->required();
  pdos->add_option("--kpoint", pdos_kpoint,
                   "comma-separated shift of length k (default 0)");
  pdos->callback(
      [&] { rc = run_pdos(pdos_rho, pdos_dim, pdos_rank, pdos_kpoint); });

  CLI::App* info = app.add_subcommand(
      "lattice-info", "print the subspace split of the configured lattice");
  add_common(info, c_info);
  info->add_option("--radius", info_radius,
                   "dual enumeration radius for the trivial-intersection "
                   "certificate (rank-0 splits)");
  info->callback([&] { rc = run_lattice_info(c_info, info_radius); });

  CLI::App* field = app.add_subcommand(
      "field", "build and print a canonically embedded algebraic lattice");
  field->add_option("--preset", alg_preset, "zsqrt2 | zcbrt2 | zcyclic3");
  field->add_option("--config", alg_config, "module descriptor (JSON)");
  field->callback([&] { rc = run_field(alg_preset, alg_config); });

  CLI::App* gp = app.add_subcommand(
      "good-position", "norm-form nonvanishing: certified bound or exact "
                       "search (exit 2 on refutation)");
  gp->add_option("--preset", gp_preset, "zsqrt2 | zcbrt2 | zcyclic3");
  gp->add_option("--config", gp_config,
                 "module or lattice descriptor (JSON), optional \"frame\"");
  gp->add_option("--mode", gp_mode, "certified (default) or search");
  gp->add_option("--radius", gp_radius, "search radius, rational");
  gp->callback(
      [&] { rc = run_good_position(gp_preset, gp_config, gp_mode, gp_radius); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
