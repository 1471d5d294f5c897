// Tests for the JSON descriptor layer and the command-line driver.  The
// descriptor half calls the library directly; the driver half runs the built
// binary as a subprocess and checks stdout, artifacts and exit codes,
// including byte-level determinism of reruns.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "latgeo/counting.hpp"
#include "latgeo/descriptors.hpp"
#include "latgeo/domains.hpp"
#include "latgeo/error.hpp"
#include "latgeo/numberfield.hpp"
#include "latgeo/splitter.hpp"

using namespace latgeo;
namespace fs = std::filesystem;

namespace {

std::string scenario(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli(const std::string& args) {
  fs::create_directories("cli_tmp");
  std::string cmd = std::string(LATGEO_BIN) + " " + args +
                    " > cli_tmp/stdout.txt 2> cli_tmp/stderr.txt";
  int st = std::system(cmd.c_str());
  RunResult r;
  if (st != -1 && WIFEXITED(st)) r.code = WEXITSTATUS(st);
  r.out = slurp("cli_tmp/stdout.txt");
  r.err = slurp("cli_tmp/stderr.txt");
  return r;
}

std::string fresh_dir(const std::string& name) {
  std::string dir = "cli_tmp/" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

// ------------------------------------------------------------- descriptors

TEST_CASE("rational values parse from integers, exact floats and strings") {
  CHECK(rat_from_json(Json(7), "x") == Rat(7));
  CHECK(rat_from_json(Json(-3), "x") == Rat(-3));
  CHECK(rat_from_json(Json(0.25), "x") == Rat(1) / 4);
  CHECK(rat_from_json(Json("3/4"), "x") == Rat(3) / 4);
  CHECK(rat_from_json(Json("-12"), "x") == Rat(-12));
  CHECK_THROWS_AS(rat_from_json(Json("3/"), "x"), Error);
  CHECK_THROWS_AS(rat_from_json(Json(true), "x"), Error);
  // the failure message names the JSON path of the offending value
  try {
    rat_from_json(Json("oops"), "domain.radius");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(contains(e.what(), "domain.radius"));
  }
}

TEST_CASE("scalars parse as rationals, field elements, and coordinate arrays") {
  ScalarContext bare;
  Scalar r = scalar_from_json(Json("1/3"), bare, "x");
  CHECK(r.is_rational());
  CHECK(r.rat() == Rat(1) / 3);

  Json fe;
  fe["minpoly"] = Json::array({-2, 0, 1});
  fe["coords"] = Json::array({0, 1});
  fe["embedding"] = 1;
  Scalar s = scalar_from_json(fe, bare, "x");
  CHECK_FALSE(s.is_rational());
  CHECK(s.to_float() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  // coordinate-array shorthand needs a surrounding field declaration
  CHECK_THROWS_AS(scalar_from_json(Json::array({0, 1}), bare, "x"), Error);
  ScalarContext ctx;
  ctx.field = field_for_minpoly({Rat(-2), Rat(0), Rat(1)});
  ctx.embedding = 1;
  Scalar t = scalar_from_json(Json::array({0, 1}), ctx, "x");
  CHECK(compare(s, t) == 0);
}

TEST_CASE("lattice descriptors: preset equals the canonical embedding") {
  Json j;
  j["preset"] = "zsqrt2";
  Lattice preset = lattice_from_json(j, "lattice");
  Lattice embedded = module_zsqrt2().embedded;
  REQUIRE(preset.dim() == embedded.dim());
  for (int i = 0; i < preset.dim(); i++)
    for (int k = 0; k < preset.dim(); k++)
      CHECK(compare(preset.basis()[i][k], embedded.basis()[i][k]) == 0);
}

TEST_CASE("lattice descriptors: explicit basis, unknown keys rejected") {
  Json j;
  j["dim"] = 2;
  j["basis"] = Json::array({Json::array({1, 0}), Json::array({0, 1})});
  Lattice lat = lattice_from_json(j, "lattice");
  CHECK(lat.dim() == 2);
  Rat cv;
  CHECK(lat.covolume_sq().try_rational(cv));
  CHECK(cv == 1);

  j["bogus"] = 1;
  CHECK_THROWS_AS(lattice_from_json(j, "lattice"), Error);
  try {
    lattice_from_json(j, "lattice");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(contains(e.what(), "bogus"));
  }
}

TEST_CASE("domain descriptors cover the analytic kinds and refuse oracles") {
  Json ball;
  ball["kind"] = "ball";
  ball["center"] = Json::array({0, 0});
  ball["radius"] = 1;
  Domain b = domain_from_json(ball, "domain");
  CHECK(b.dim() == 2);

  Json box;
  box["kind"] = "box";
  box["center"] = Json::array({"1/2", "1/2"});
  box["half_widths"] = Json::array({1, "1/2"});
  Domain bx = domain_from_json(box, "domain");
  CHECK(bx.dim() == 2);

  Json ell;
  ell["kind"] = "ellipsoid";
  ell["center"] = Json::array({0, 0});
  ell["form"] = Json::array({Json::array({1, 0}), Json::array({0, 4})});
  CHECK(domain_from_json(ell, "domain").dim() == 2);

  Json prod;
  prod["kind"] = "product";
  prod["factors"] = Json::array({ball, ball});
  CHECK(domain_from_json(prod, "domain").dim() == 4);

  Json orac;
  orac["kind"] = "oracle";
  CHECK_THROWS_AS(domain_from_json(orac, "domain"), Error);
}

TEST_CASE("experiment configs fill defaults and validate the scan block") {
  Json j;
  j["lattice"] = {{"dim", 2},
                  {"basis", Json::array({Json::array({1, 0}), Json::array({0, 1})})}};
  j["subspace"] = Json::array({Json::array({1, 0})});
  j["scan"] = {{"epsilons", Json::array({"1/10"})}};
  ExperimentConfig cfg = experiment_from_json(j, "config");
  CHECK(cfg.has_lattice);
  CHECK(cfg.has_subspace);
  CHECK_FALSE(cfg.has_domain);
  CHECK(cfg.workers == 1);
  CHECK(cfg.seed == 0x5EED);
  CHECK(cfg.tol == default_count_tol());
  REQUIRE(cfg.epsilons.size() == 1);
  CHECK(cfg.epsilons[0] == Rat(1) / 10);

  j["scan"]["epsilons"].push_back(0);  // eps must be positive
  CHECK_THROWS_AS(experiment_from_json(j, "config"), Error);
}

TEST_CASE("regime classes cross-check explicit dimensions against the split") {
  ExperimentConfig cfg = load_experiment(scenario("strip.json"));
  SubspaceSplit sd = split_by_subspace(cfg.lattice, cfg.subspace);
  RegimeClass rc = regime_for_split(cfg, sd);
  CHECK(rc.kind == RegimeKind::SmoothSlices);
  CHECK(rc.n == 2);
  CHECK(rc.p == 1);
  CHECK(rc.q == 1);
  CHECK(rc.r == 1);

  cfg.regime_n = 4;  // disagrees with the 2-dimensional split
  CHECK_THROWS_AS(regime_for_split(cfg, sd), Error);
}

TEST_CASE("config loading reports missing files and malformed JSON with paths") {
  CHECK_THROWS_AS(load_experiment("cli_tmp/does_not_exist.json"), Error);
  fs::create_directories("cli_tmp");
  spit("cli_tmp/broken.json", "{\"lattice\": \n");
  try {
    load_experiment("cli_tmp/broken.json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(contains(e.what(), "broken.json"));
    CHECK(contains(e.what(), "malformed JSON"));
  }
}

// -------------------------------------------------------------- CLI driver

TEST_CASE("count: strip scenario counts every eps with the sliced method") {
  RunResult r = run_cli("count --config " + scenario("strip.json"));
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "epsilon,certain,boundary_hits,method,wall_time_ms");
  CHECK(lines[1].rfind("1/10,18,0,sliced,", 0) == 0);
  CHECK(lines[5].rfind("1/100000,199998,0,sliced,", 0) == 0);
}

TEST_CASE("leading: strip leading terms are 2/eps") {
  RunResult r = run_cli("leading --config " + scenario("strip.json"));
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "epsilon,leading");
  CHECK(lines[1] == "1/10,20");
}

TEST_CASE("scan: strip passes its verdict and writes exact artifacts") {
  std::string dir = fresh_dir("strip_scan");
  RunResult r = run_cli("scan --config " + scenario("strip.json") + " --out " + dir);
  REQUIRE(r.code == 0);

  std::vector<std::string> csv = split_lines(slurp(dir + "/scan.csv"));
  REQUIRE(csv.size() == 6);
  CHECK(csv[0] == "epsilon,count_lo,count_hi,leading,rem_lo,rem_hi");
  CHECK(csv[1] == "1/10,18,18,20,-2,-2");

  Json fit = Json::parse(slurp(dir + "/fit.json"));
  CHECK(fit.at("verdict").get<bool>());
  CHECK(fit.at("kind").get<std::string>() == "smooth_slices");
  CHECK(fit.at("rows_total").get<int>() == 5);
  CHECK(fit.at("rows_used").get<int>() == 5);
  CHECK(std::abs(fit.at("beta").get<double>()) < 1e-6);
  CHECK(fit.at("seed").get<std::uint64_t>() == 0x5EED);

  CHECK(slurp(dir + "/scan.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("scan: artifacts are byte-identical across reruns") {
  std::string d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  REQUIRE(run_cli("scan --config " + scenario("strip.json") + " --out " + d1).code == 0);
  REQUIRE(run_cli("scan --config " + scenario("strip.json") + " --out " + d2).code == 0);
  CHECK(slurp(d1 + "/scan.csv") == slurp(d2 + "/scan.csv"));
  CHECK(slurp(d1 + "/fit.json") == slurp(d2 + "/fit.json"));
  CHECK(slurp(d1 + "/scan.svg") == slurp(d2 + "/scan.svg"));
  CHECK(!slurp(d1 + "/scan.csv").empty());
}

TEST_CASE("fit: refitting a saved scan table reproduces the verdict") {
  std::string dir = fresh_dir("refit");
  REQUIRE(run_cli("scan --config " + scenario("strip.json") + " --out " + dir).code == 0);
  RunResult r = run_cli("fit --config " + scenario("strip.json") + " --csv " +
                        dir + "/scan.csv --out " + dir);
  REQUIRE(r.code == 0);
  Json fit = Json::parse(slurp(dir + "/fit.json"));
  CHECK(fit.at("verdict").get<bool>());

  // row order in the table must not matter: reverse the data lines
  std::vector<std::string> lines = split_lines(slurp(dir + "/scan.csv"));
  std::string reversed = lines[0] + "\n";
  for (size_t i = lines.size(); i-- > 1;) reversed += lines[i] + "\n";
  spit(dir + "/reversed.csv", reversed);
  RunResult r2 = run_cli("fit --config " + scenario("strip.json") + " --csv " +
                         dir + "/reversed.csv --out " + dir);
  CHECK(r2.code == 0);
  Json fit2 = Json::parse(slurp(dir + "/fit.json"));
  CHECK(fit2.at("beta").get<double>() == fit.at("beta").get<double>());
  CHECK(fit2.at("C").get<double>() == fit.at("C").get<double>());
}

TEST_CASE("scan: strictly convex slices on the sqrt2 line pass one-sided") {
  std::string dir = fresh_dir("disk");
  RunResult r = run_cli("scan --config " + scenario("disk_sqrt2.json") + " --out " + dir);
  REQUIRE(r.code == 0);
  Json fit = Json::parse(slurp(dir + "/fit.json"));
  CHECK(fit.at("verdict").get<bool>());
  CHECK(fit.at("kind").get<std::string>() == "slice_strictly_convex");
  double beta = fit.at("beta").get<double>();
  CHECK(beta >= -0.45);
  CHECK(beta <= 0.0);
  CHECK(fit.at("predicted_power").get<double>() == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("spectrum: adiabatic counts of the square torus with eigenvalue dump") {
  std::string dir = fresh_dir("spec");
  std::string cfg_path = dir + "/axis.json";
  Json cfg;
  cfg["lattice"] = {{"dim", 2},
                    {"basis", Json::array({Json::array({1, 0}), Json::array({0, 1})})}};
  cfg["subspace"] = Json::array({Json::array({1, 0})});
  cfg["scan"] = {{"lambdas", Json::array({1})},
                 {"epsilons", Json::array({"1/10"})},
                 {"dump_eigenvalues_below", 1}};
  spit(cfg_path, cfg.dump());

  RunResult r = run_cli("spectrum --config " + cfg_path + " --out " + dir);
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = split_lines(slurp(dir + "/spectrum.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "lambda,epsilon,N,leading,remainder");
  std::vector<std::string> cells;
  {
    std::stringstream ss(lines[1]);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
  }
  REQUIRE(cells.size() == 5);
  CHECK(std::stod(cells[0]) ==
        doctest::Approx(4 * M_PI * M_PI).epsilon(1e-14));  // lambda
  CHECK(cells[1] == "1/10");
  CHECK(cells[2] == "19");  // 2*10 - 1 eigenvalues strictly below 4 pi^2
  CHECK(std::stod(cells[3]) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(std::stod(cells[4]) == doctest::Approx(-1.0).epsilon(1e-9));

  std::vector<std::string> dump = split_lines(slurp(dir + "/eigenvalues.csv"));
  REQUIRE(dump.size() == 20);  // header + 19 eigenvalues
  CHECK(dump[0] == "epsilon,lambda,k1,k2");
  CHECK(dump[1] == "1/10,0,0,0");  // ground state first
}

TEST_CASE("pdos: ball volume times the single interior dual point") {
  RunResult r = run_cli("pdos --rho 1 --dim 3 --rank 1");
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(M_PI).epsilon(1e-15));
}

TEST_CASE("lattice-info: rational, index-5 and irrational splits") {
  RunResult strip = run_cli("lattice-info --config " + scenario("strip.json"));
  REQUIRE(strip.code == 0);
  CHECK(contains(strip.out, "r = 1"));
  CHECK(contains(strip.out, "covolume identity residual = 0 (exact)"));

  fs::create_directories("cli_tmp");
  spit("cli_tmp/span12.json",
       "{\"lattice\": {\"dim\": 2, \"basis\": [[1,0],[0,1]]},"
       " \"subspace\": {\"rows\": [[1,2]]}}");
  RunResult span = run_cli("lattice-info --config cli_tmp/span12.json");
  REQUIRE(span.code == 0);
  CHECK(contains(span.out, "(squared: 5)"));
  CHECK(contains(span.out, "2.23606797749978"));

  RunResult disk = run_cli("lattice-info --config " + scenario("disk_sqrt2.json"));
  REQUIRE(disk.code == 0);
  CHECK(contains(disk.out, "r = 0"));
  CHECK(contains(disk.out, "trivial-intersection certificate (radius 8): holds"));
}

TEST_CASE("field: the sqrt2 preset prints its exact invariants") {
  RunResult r = run_cli("field --preset zsqrt2");
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "x^2 - 2"));
  CHECK(contains(r.out, "degree 2, signature (2 real, 0 complex pairs)"));
  CHECK(contains(r.out, "covolume^2 = 8"));
  CHECK(contains(r.out, "exact algebraic rows"));
  CHECK(contains(r.out, "norm -2"));
}

TEST_CASE("good-position: certified bound for sqrt2, refutation for a grid") {
  RunResult cert = run_cli("good-position --preset zsqrt2 --mode certified");
  REQUIRE(cert.code == 0);
  CHECK(contains(cert.out, "certified lower bound on |norm form|: 1"));

  fs::create_directories("cli_tmp");
  spit("cli_tmp/grid.json", "{\"lattice\": {\"dim\": 2, \"basis\": [[1,0],[0,1]]}}");
  RunResult ref = run_cli("good-position --config cli_tmp/grid.json --mode search --radius 3");
  CHECK(ref.code == 2);  // axis points annihilate the coordinate product
  CHECK(contains(ref.out, "REFUTED"));
}

TEST_CASE("errors: missing fields and malformed configs exit 1 with a message") {
  fs::create_directories("cli_tmp");
  spit("cli_tmp/nodomain.json",
       "{\"lattice\": {\"dim\": 2, \"basis\": [[1,0],[0,1]]},"
       " \"subspace\": {\"rows\": [[1,0]]},"
       " \"scan\": {\"epsilons\": [\"1/10\"]}, \"regime\": \"smooth_slices\"}");
  RunResult miss = run_cli("scan --config cli_tmp/nodomain.json");
  CHECK(miss.code == 1);
  CHECK(contains(miss.err, "missing required field \"domain\""));

  spit("cli_tmp/broken2.json", "{\"lattice\": ");
  RunResult bad = run_cli("count --config cli_tmp/broken2.json");
  CHECK(bad.code == 1);
  CHECK(contains(bad.err, "malformed JSON"));

  RunResult flag = run_cli("scan --no-such-flag");
  CHECK(flag.code == 1);

  RunResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(contains(help.out, "scan"));
}
