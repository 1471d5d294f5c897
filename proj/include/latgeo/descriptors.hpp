#pragma once

// JSON descriptors for the library's objects and the declarative experiment
// configuration consumed by the command-line driver.
//
// Scalars accept three spellings: JSON integers, rational strings "p/q" (a
// non-integer JSON number is converted from its exact binary64 value, so
// write non-dyadic values as strings), and algebraic numbers as
//   {"minpoly": [c0, ..., cd], "coords": ["p/q", ...], "embedding": i}.
// A descriptor carrying a "field" key (the minimal polynomial, with an
// optional "embedding", default 0) additionally lets plain arrays stand for
// coordinate vectors in that field, e.g. [0, 1] for the generator.
//
// Every schema violation raises Error(ParseError) whose message names the
// offending field by its path inside the document.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "latgeo/asymptotics.hpp"
#include "latgeo/counting.hpp"
#include "latgeo/domains.hpp"
#include "latgeo/lattice.hpp"
#include "latgeo/numberfield.hpp"
#include "latgeo/splitter.hpp"

namespace latgeo {

using Json = nlohmann::json;

// Optional number-field shorthand active while parsing one descriptor.
struct ScalarContext {
  FieldPtr field;  // null: no shorthand, arrays are rejected
  int embedding = 0;
};

// One analyzed field per distinct minimal polynomial, shared across all
// descriptors of a process so parsed elements interoperate cheaply.
FieldPtr field_for_minpoly(const std::vector<Rat>& minpoly);

Rat rat_from_json(const Json& j, const std::string& where);
Scalar scalar_from_json(const Json& j, const ScalarContext& ctx,
                        const std::string& where);
VecS vector_from_json(const Json& j, const ScalarContext& ctx,
                      const std::string& where);
MatS matrix_from_json(const Json& j, const ScalarContext& ctx,
                      const std::string& where);

// {"dim": n, "basis": [[..], ..]} with optional "field"/"embedding" shorthand
// and an optional exact SPD "form" for a non-standard ambient inner product;
// or {"module": <module descriptor>} / {"preset": "zsqrt2"|"zcbrt2"|"zcyclic3"}
// for canonically embedded algebraic lattices.
Lattice lattice_from_json(const Json& j, const std::string& where = "lattice");

// {"rows": [[..], ..]} with the same shorthand, or a bare array of rows.
SubspaceSpec subspace_from_json(const Json& j, int ambient_dim,
                                const std::string& where = "subspace");

// {"kind": "ball", "center": [..], "radius": r}
// {"kind": "ellipsoid", "center": [..], "form": [[..], ..]}
// {"kind": "box", "center": [..], "half_widths": [..], "frame"?: [[..], ..]}
// {"kind": "product", "factors": [..], "frames"?: [[[..], ..], ..]}
// Product frames default to consecutive coordinate axes.  Oracle-backed
// domains are not serializable.
Domain domain_from_json(const Json& j, const std::string& where = "domain");

// {"preset": name} or {"minpoly": [..], "generators": [[coords], ..],
// "embedding"?: i}.
ModuleLattice module_from_json(const Json& j, const std::string& where = "module");

const char* regime_kind_name(RegimeKind kind);
RegimeKind regime_kind_from_name(const std::string& name,
                                 const std::string& where);

struct ExperimentConfig {
  Lattice lattice;
  bool has_lattice = false;
  SubspaceSpec subspace;
  bool has_subspace = false;
  Domain domain;
  bool has_domain = false;
  MatS metric;  // empty: standard inner product

  std::vector<Rat> epsilons;
  std::vector<Rat> lambdas;             // eigenvalue thresholds / (4 pi^2)
  std::optional<Rat> dump_below;        // eigenvalue dump cutoff / (4 pi^2)
  std::optional<Multiplier> multiplier; // multiplicative counting instead of eps

  RegimeKind regime_kind = RegimeKind::SmoothSlices;
  bool has_regime = false;
  // dimensions given explicitly in the config (validated against the split)
  std::optional<int> regime_n, regime_p, regime_q, regime_r;
  int regime_ell = 0, regime_places_real = 0, regime_places_complex = 0;

  VecS shift;  // empty: no shift
  Rat tol;     // classification tolerance, default default_count_tol()
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed = 0x5EED;
};

ExperimentConfig experiment_from_json(const Json& j,
                                      const std::string& where = "config");

// Reads and parses a config file.  Malformed JSON reports line and byte
// offsets; missing files raise IoError.
ExperimentConfig load_experiment(const std::string& path);

// The config's regime completed against an actual split: dimensions absent
// from the config are taken from the split, explicit ones must agree (else
// InconsistentParameters).
RegimeClass regime_for_split(const ExperimentConfig& cfg, const SubspaceSplit& sd);

}  // namespace latgeo
