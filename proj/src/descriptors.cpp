#include "latgeo/descriptors.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "latgeo/error.hpp"

namespace latgeo {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ParseError, where + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    bad(where, std::string("missing required field \"") + key + "\"");
  return *it;
}

// Strict schemas: an unrecognized key is a config typo, not an extension.
void only_keys(const Json& j, std::initializer_list<const char*> keys,
               const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known) bad(where, "unknown field \"" + it.key() + "\"");
  }
}

int int_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer())
    bad(where, "expected an integer, got " + std::string(j.type_name()));
  std::int64_t v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) bad(where, "integer out of range");
  return static_cast<int>(v);
}

std::string idx(const std::string& where, size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

std::vector<Rat> rat_vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<Rat> out;
  for (size_t i = 0; i < j.size(); i++)
    out.push_back(rat_from_json(j[i], idx(where, i)));
  return out;
}

// Reads the "field"/"embedding" shorthand keys of a descriptor, if present.
ScalarContext context_of(const Json& j, const std::string& where) {
  ScalarContext ctx;
  if (!j.is_object()) return ctx;
  if (auto it = j.find("field"); it != j.end()) {
    ctx.field = field_for_minpoly(rat_vector_from_json(*it, where + ".field"));
    if (auto e = j.find("embedding"); e != j.end())
      ctx.embedding = int_from_json(*e, where + ".embedding");
  } else if (j.find("embedding") != j.end()) {
    bad(where, "\"embedding\" is only meaningful next to a \"field\"");
  }
  return ctx;
}

ModuleLattice module_preset(const std::string& name, const std::string& where) {
  if (name == "zsqrt2") return module_zsqrt2();
  if (name == "zcbrt2") return module_zcbrt2();
  if (name == "zcyclic3") return module_zcyclic3();
  bad(where, "unknown preset \"" + name +
                 "\" (available: zsqrt2, zcbrt2, zcyclic3)");
}

}  // namespace

FieldPtr field_for_minpoly(const std::vector<Rat>& minpoly) {
  static std::map<std::string, FieldPtr> cache;
  std::string key;
  for (const Rat& c : minpoly) key += rat_str(c) + ",";
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FieldPtr f = analyze_field(minpoly);
  cache.emplace(key, f);
  return f;
}

Rat rat_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) {
    return Rat(static_cast<long>(j.get<std::int64_t>()));
  }
  if (j.is_number_float()) {
    double d = j.get<double>();
    if (!std::isfinite(d)) bad(where, "non-finite number");
    return Rat(d);  // exact binary64 value
  }
  if (j.is_string()) {
    try {
      return parse_rat(j.get<std::string>());
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  bad(where, "expected a rational (integer, number, or \"p/q\" string), got " +
                 std::string(j.type_name()));
}

Scalar scalar_from_json(const Json& j, const ScalarContext& ctx,
                        const std::string& where) {
  if (j.is_object()) {
    only_keys(j, {"minpoly", "coords", "embedding"}, where);
    FieldPtr field = field_for_minpoly(
        rat_vector_from_json(need(j, "minpoly", where), where + ".minpoly"));
    std::vector<Rat> coords =
        rat_vector_from_json(need(j, "coords", where), where + ".coords");
    int emb = 0;
    if (auto it = j.find("embedding"); it != j.end())
      emb = int_from_json(*it, where + ".embedding");
    try {
      return Scalar(FieldElement(field, std::move(coords), emb));
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  if (j.is_array()) {
    if (!ctx.field)
      bad(where,
          "array-valued scalar needs a surrounding \"field\" declaration");
    std::vector<Rat> coords = rat_vector_from_json(j, where);
    try {
      return Scalar(FieldElement(ctx.field, std::move(coords), ctx.embedding));
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  return Scalar(rat_from_json(j, where));
}

VecS vector_from_json(const Json& j, const ScalarContext& ctx,
                      const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  VecS out;
  for (size_t i = 0; i < j.size(); i++)
    out.push_back(scalar_from_json(j[i], ctx, idx(where, i)));
  return out;
}

MatS matrix_from_json(const Json& j, const ScalarContext& ctx,
                      const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of rows");
  MatS out;
  for (size_t i = 0; i < j.size(); i++)
    out.push_back(vector_from_json(j[i], ctx, idx(where, i)));
  return out;
}

Lattice lattice_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  if (auto it = j.find("preset"); it != j.end()) {
    only_keys(j, {"preset"}, where);
    if (!it->is_string()) bad(where + ".preset", "expected a string");
    return module_preset(it->get<std::string>(), where + ".preset").embedded;
  }
  if (auto it = j.find("module"); it != j.end()) {
    only_keys(j, {"module"}, where);
    return module_from_json(*it, where + ".module").embedded;
  }
  only_keys(j, {"dim", "basis", "field", "embedding", "form"}, where);
  int n = int_from_json(need(j, "dim", where), where + ".dim");
  if (n <= 0) bad(where + ".dim", "dimension must be positive");
  ScalarContext ctx = context_of(j, where);
  MatS basis =
      matrix_from_json(need(j, "basis", where), ctx, where + ".basis");
  if (static_cast<int>(basis.size()) != n)
    bad(where + ".basis", "expected " + std::to_string(n) + " rows, got " +
                              std::to_string(basis.size()));
  for (size_t i = 0; i < basis.size(); i++)
    if (static_cast<int>(basis[i].size()) != n)
      bad(idx(where + ".basis", i), "expected " + std::to_string(n) +
                                        " entries, got " +
                                        std::to_string(basis[i].size()));
  MatS form;
  if (auto it = j.find("form"); it != j.end())
    form = matrix_from_json(*it, ctx, where + ".form");
  return Lattice::make(std::move(basis), std::move(form));
}

SubspaceSpec subspace_from_json(const Json& j, int ambient_dim,
                                const std::string& where) {
  MatS rows;
  if (j.is_array()) {
    rows = matrix_from_json(j, ScalarContext{}, where);
  } else {
    only_keys(j, {"rows", "field", "embedding"}, where);
    ScalarContext ctx = context_of(j, where);
    rows = matrix_from_json(need(j, "rows", where), ctx, where + ".rows");
  }
  for (size_t i = 0; i < rows.size(); i++)
    if (static_cast<int>(rows[i].size()) != ambient_dim)
      bad(idx(where + (j.is_array() ? "" : ".rows"), i),
          "expected " + std::to_string(ambient_dim) + " entries, got " +
              std::to_string(rows[i].size()));
  return SubspaceSpec::make(ambient_dim, std::move(rows));
}

Domain domain_from_json(const Json& j, const std::string& where) {
  const Json& kj = need(j, "kind", where);
  if (!kj.is_string()) bad(where + ".kind", "expected a string");
  std::string kind = kj.get<std::string>();
  ScalarContext ctx = context_of(j, where);
  if (kind == "ball") {
    only_keys(j, {"kind", "center", "radius", "field", "embedding"}, where);
    VecS center =
        vector_from_json(need(j, "center", where), ctx, where + ".center");
    Scalar radius =
        scalar_from_json(need(j, "radius", where), ctx, where + ".radius");
    return Domain::ball(std::move(center), std::move(radius));
  }
  if (kind == "ellipsoid") {
    only_keys(j, {"kind", "center", "form", "field", "embedding"}, where);
    VecS center =
        vector_from_json(need(j, "center", where), ctx, where + ".center");
    MatS form = matrix_from_json(need(j, "form", where), ctx, where + ".form");
    return Domain::ellipsoid(std::move(center), std::move(form));
  }
  if (kind == "box") {
    only_keys(j, {"kind", "center", "half_widths", "frame", "field", "embedding"},
              where);
    VecS center =
        vector_from_json(need(j, "center", where), ctx, where + ".center");
    VecS hw = vector_from_json(need(j, "half_widths", where), ctx,
                               where + ".half_widths");
    MatS frame;
    if (auto it = j.find("frame"); it != j.end())
      frame = matrix_from_json(*it, ctx, where + ".frame");
    return Domain::box(std::move(center), std::move(hw), std::move(frame));
  }
  if (kind == "product") {
    only_keys(j, {"kind", "factors", "frames", "field", "embedding"}, where);
    const Json& fj = need(j, "factors", where);
    if (!fj.is_array() || fj.empty())
      bad(where + ".factors", "expected a non-empty array");
    std::vector<Domain> factors;
    int total = 0;
    for (size_t i = 0; i < fj.size(); i++) {
      factors.push_back(domain_from_json(fj[i], idx(where + ".factors", i)));
      total += factors.back().dim;
    }
    std::vector<MatS> frames;
    if (auto it = j.find("frames"); it != j.end()) {
      if (!it->is_array() || it->size() != factors.size())
        bad(where + ".frames", "expected one frame per factor");
      for (size_t i = 0; i < it->size(); i++)
        frames.push_back(
            matrix_from_json((*it)[i], ctx, idx(where + ".frames", i)));
    } else {
      // default frames: consecutive coordinate axes per factor
      int offset = 0;
      for (const Domain& f : factors) {
        MatS fr(f.dim, VecS(total, Scalar(0)));
        for (int row = 0; row < f.dim; row++) fr[row][offset + row] = Scalar(1);
        frames.push_back(std::move(fr));
        offset += f.dim;
      }
    }
    return Domain::product(std::move(frames), std::move(factors));
  }
  if (kind == "oracle")
    bad(where + ".kind", "oracle-backed domains are not serializable");
  bad(where + ".kind", "unknown domain kind \"" + kind +
                           "\" (available: ball, ellipsoid, box, product)");
}

ModuleLattice module_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  if (auto it = j.find("preset"); it != j.end()) {
    only_keys(j, {"preset"}, where);
    if (!it->is_string()) bad(where + ".preset", "expected a string");
    return module_preset(it->get<std::string>(), where + ".preset");
  }
  only_keys(j, {"minpoly", "generators", "embedding"}, where);
  FieldPtr field = field_for_minpoly(rat_vector_from_json(
      need(j, "minpoly", where), where + ".minpoly"));
  int emb = 0;
  if (auto it = j.find("embedding"); it != j.end())
    emb = int_from_json(*it, where + ".embedding");
  const Json& gj = need(j, "generators", where);
  if (!gj.is_array() || gj.empty())
    bad(where + ".generators", "expected a non-empty array");
  std::vector<FieldElement> gens;
  for (size_t i = 0; i < gj.size(); i++) {
    std::vector<Rat> coords =
        rat_vector_from_json(gj[i], idx(where + ".generators", i));
    try {
      gens.emplace_back(field, std::move(coords), emb);
    } catch (const Error& e) {
      bad(idx(where + ".generators", i), e.what());
    }
  }
  return canonical_embedding(field, gens);
}

const char* regime_kind_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::SmoothSlices: return "smooth_slices";
    case RegimeKind::FiberStrictlyConvex: return "fiber_strictly_convex";
    case RegimeKind::SliceStrictlyConvex: return "slice_strictly_convex";
    case RegimeKind::BoxAdmissible: return "box_admissible";
    case RegimeKind::AlgebraicProduct: return "algebraic_product";
  }
  return "unknown";
}

RegimeKind regime_kind_from_name(const std::string& name,
                                 const std::string& where) {
  for (RegimeKind k :
       {RegimeKind::SmoothSlices, RegimeKind::FiberStrictlyConvex,
        RegimeKind::SliceStrictlyConvex, RegimeKind::BoxAdmissible,
        RegimeKind::AlgebraicProduct})
    if (name == regime_kind_name(k)) return k;
  bad(where, "unknown regime \"" + name +
                 "\" (available: smooth_slices, fiber_strictly_convex, "
                 "slice_strictly_convex, box_admissible, algebraic_product)");
}

ExperimentConfig experiment_from_json(const Json& j, const std::string& where) {
  only_keys(j,
            {"lattice", "subspace", "metric", "domain", "scan", "regime",
             "shift", "tol", "out", "workers", "seed", "multiplier"},
            where);
  ExperimentConfig cfg;
  cfg.tol = default_count_tol();

  if (auto it = j.find("lattice"); it != j.end()) {
    cfg.lattice = lattice_from_json(*it, where + ".lattice");
    cfg.has_lattice = true;
  }
  if (auto it = j.find("subspace"); it != j.end()) {
    if (!cfg.has_lattice)
      bad(where + ".subspace", "a subspace needs a \"lattice\" for its "
                               "ambient dimension");
    cfg.subspace =
        subspace_from_json(*it, cfg.lattice.dim(), where + ".subspace");
    cfg.has_subspace = true;
  }
  if (auto it = j.find("metric"); it != j.end())
    cfg.metric = matrix_from_json(*it, ScalarContext{}, where + ".metric");
  if (auto it = j.find("domain"); it != j.end()) {
    cfg.domain = domain_from_json(*it, where + ".domain");
    cfg.has_domain = true;
  }

  if (auto it = j.find("scan"); it != j.end()) {
    const std::string sw = where + ".scan";
    only_keys(*it, {"epsilons", "lambdas", "dump_eigenvalues_below"}, sw);
    if (auto e = it->find("epsilons"); e != it->end()) {
      cfg.epsilons = rat_vector_from_json(*e, sw + ".epsilons");
      for (size_t i = 0; i < cfg.epsilons.size(); i++)
        if (cfg.epsilons[i] <= 0)
          bad(idx(sw + ".epsilons", i), "expansion parameter must be positive");
    }
    if (auto l = it->find("lambdas"); l != it->end()) {
      cfg.lambdas = rat_vector_from_json(*l, sw + ".lambdas");
      for (size_t i = 0; i < cfg.lambdas.size(); i++)
        if (cfg.lambdas[i] <= 0)
          bad(idx(sw + ".lambdas", i), "eigenvalue threshold must be positive");
    }
    if (auto d = it->find("dump_eigenvalues_below"); d != it->end()) {
      cfg.dump_below = rat_from_json(*d, sw + ".dump_eigenvalues_below");
      if (*cfg.dump_below <= 0)
        bad(sw + ".dump_eigenvalues_below", "cutoff must be positive");
    }
  }

  if (auto it = j.find("regime"); it != j.end()) {
    const std::string rw = where + ".regime";
    cfg.has_regime = true;
    if (it->is_string()) {
      cfg.regime_kind = regime_kind_from_name(it->get<std::string>(), rw);
    } else {
      only_keys(*it,
                {"kind", "n", "p", "q", "r", "ell", "places_real",
                 "places_complex"},
                rw);
      const Json& kj = need(*it, "kind", rw);
      if (!kj.is_string()) bad(rw + ".kind", "expected a string");
      cfg.regime_kind = regime_kind_from_name(kj.get<std::string>(), rw + ".kind");
      if (auto v = it->find("n"); v != it->end())
        cfg.regime_n = int_from_json(*v, rw + ".n");
      if (auto v = it->find("p"); v != it->end())
        cfg.regime_p = int_from_json(*v, rw + ".p");
      if (auto v = it->find("q"); v != it->end())
        cfg.regime_q = int_from_json(*v, rw + ".q");
      if (auto v = it->find("r"); v != it->end())
        cfg.regime_r = int_from_json(*v, rw + ".r");
      if (auto v = it->find("ell"); v != it->end())
        cfg.regime_ell = int_from_json(*v, rw + ".ell");
      if (auto v = it->find("places_real"); v != it->end())
        cfg.regime_places_real = int_from_json(*v, rw + ".places_real");
      if (auto v = it->find("places_complex"); v != it->end())
        cfg.regime_places_complex = int_from_json(*v, rw + ".places_complex");
    }
  }

  if (auto it = j.find("shift"); it != j.end())
    cfg.shift = vector_from_json(*it, ScalarContext{}, where + ".shift");
  if (auto it = j.find("tol"); it != j.end()) {
    cfg.tol = rat_from_json(*it, where + ".tol");
    if (cfg.tol < 0) bad(where + ".tol", "tolerance must be nonnegative");
  }
  if (auto it = j.find("out"); it != j.end()) {
    if (!it->is_string()) bad(where + ".out", "expected a string");
    cfg.out_dir = it->get<std::string>();
  }
  if (auto it = j.find("workers"); it != j.end()) {
    cfg.workers = int_from_json(*it, where + ".workers");
    if (cfg.workers < 1) bad(where + ".workers", "need at least one worker");
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (it->is_number_integer()) {
      std::int64_t v = it->get<std::int64_t>();
      if (v < 0) bad(where + ".seed", "seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (it->is_string()) {
      try {
        cfg.seed = std::stoull(it->get<std::string>(), nullptr, 0);
      } catch (const std::exception&) {
        bad(where + ".seed", "malformed seed");
      }
    } else {
      bad(where + ".seed", "expected an integer or a numeric string");
    }
  }

  if (auto it = j.find("multiplier"); it != j.end()) {
    const std::string mw = where + ".multiplier";
    only_keys(*it, {"real", "complex", "field", "embedding"}, mw);
    ScalarContext ctx = context_of(*it, mw);
    Multiplier t;
    if (auto r = it->find("real"); r != it->end()) {
      const Json& arr = *r;
      if (!arr.is_array()) bad(mw + ".real", "expected an array");
      for (size_t i = 0; i < arr.size(); i++)
        t.real_parts.push_back(
            scalar_from_json(arr[i], ctx, idx(mw + ".real", i)));
    }
    if (auto c = it->find("complex"); c != it->end()) {
      const Json& arr = *c;
      if (!arr.is_array()) bad(mw + ".complex", "expected an array");
      for (size_t i = 0; i < arr.size(); i++) {
        const Json& pair = arr[i];
        if (!pair.is_array() || pair.size() != 2)
          bad(idx(mw + ".complex", i), "expected an [re, im] pair");
        t.complex_parts.emplace_back(
            scalar_from_json(pair[0], ctx, idx(mw + ".complex", i) + "[0]"),
            scalar_from_json(pair[1], ctx, idx(mw + ".complex", i) + "[1]"));
      }
    }
    if (t.dim() == 0) bad(mw, "multiplier needs at least one slot");
    cfg.multiplier = std::move(t);
  }

  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (byte > text.size()) byte = text.size();
    size_t line = 1;
    for (size_t i = 0; i < byte; i++)
      if (text[i] == '\n') line++;
    fail(ErrorCode::ParseError, path + ": malformed JSON at line " +
                                    std::to_string(line) + ": " + e.what());
  }
  return experiment_from_json(j, "config");
}

RegimeClass regime_for_split(const ExperimentConfig& cfg,
                             const SubspaceSplit& sd) {
  if (!cfg.has_regime)
    fail(ErrorCode::ParseError, "config: missing required field \"regime\"");
  RegimeClass rc;
  rc.kind = cfg.regime_kind;
  rc.n = sd.n;
  rc.p = sd.p;
  rc.q = sd.q;
  rc.r = sd.r;
  rc.ell = cfg.regime_ell;
  rc.places_real = cfg.regime_places_real;
  rc.places_complex = cfg.regime_places_complex;
  auto check = [&](const char* name, const std::optional<int>& given,
                   int actual) {
    if (given && *given != actual)
      fail(ErrorCode::InconsistentParameters,
           std::string("config regime ") + name + "=" + std::to_string(*given) +
               " disagrees with the split (" + name + "=" +
               std::to_string(actual) + ")");
  };
  check("n", cfg.regime_n, rc.n);
  check("p", cfg.regime_p, rc.p);
  check("q", cfg.regime_q, rc.q);
  check("r", cfg.regime_r, rc.r);
  return rc;
}

}  // namespace latgeo
