#pragma once

// Workspace configuration: one JSON document naming group models,
// representations, irrep bases, pairs, morphisms and manifold fixtures.
// The schema is documented in docs/config.md.

#include "tgact/grothendieck.hpp"
#include "tgact/manifold.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tgact {

using Json = nlohmann::json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct HomQuery {
  std::string source;
  std::string target;
  bool pairs = false;
};

struct PullbackSpec {
  std::string restriction;
  std::string target_basis;
  std::string target_base;
};

struct KGroupSpec {
  std::string name;
  std::string basis;
  std::string base;
  std::vector<PullbackSpec> pullbacks;
};

/// A grid of representations and pairs over one base object, used by the
/// adjunction and monad checks.
struct SliceFixture {
  std::string name;
  std::string base;
  std::vector<std::string> representations;
  std::vector<std::string> pairs;
};

struct ActionSpec {
  std::string name;
  std::string bundle;
  std::string section_kind;
  SectionField section;
  bool expect_valid = true;
  std::vector<std::string> parts;  // factor actions of a product section
};

struct ManifoldPullbackSpec {
  std::string name;
  std::string from;
  std::string map_kind;
  double angle = 0.0;
  std::string action;
  PointMap map;
};

template <class S>
struct Workspace {
  Tolerances tol;
  std::uint64_t seed = 0;
  int samples = 200;

  std::map<std::string, ModelPtr<S>> models;
  std::map<std::string, RepPtr<S>> reps;
  std::map<std::string, std::vector<RepPtr<S>>> summands;
  std::map<std::string, Restriction<S>> restrictions;
  std::map<std::string, BasisPtr<S>> bases;
  std::map<std::string, SlicePair<S>> pairs;
  std::map<std::string, SliceMorphism<S>> morphisms;

  std::vector<std::string> classify;
  bool classify_explicit = false;
  std::vector<HomQuery> hom;
  std::vector<KGroupSpec> kgroups;
  std::vector<SliceFixture> slice_fixtures;

  // Manifold fixtures (real field only).
  std::map<std::string, ManifoldPtr> manifolds;
  std::map<std::string, BundlePtr> bundles;
  std::vector<ActionSpec> actions;
  std::vector<ManifoldPullbackSpec> manifold_pullbacks;
  std::vector<std::string> induced_fields;

  std::set<std::string> skipped;

  const ActionSpec* find_action(const std::string& name) const {
    for (const auto& a : actions)
      if (a.name == name) return &a;
    return nullptr;
  }
};

struct LoadOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tolerance;
};

namespace config_detail {

template <class S>
S parse_scalar(const Json& j) {
  if (j.is_number()) return S(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    double re = j[0].get<double>(), im = j[1].get<double>();
    if constexpr (is_complex_v<S>) {
      return S(re, im);
    } else {
      if (im != 0.0) throw ConfigError("complex entry in a real workspace");
      return re;
    }
  }
  throw ConfigError("matrix entry must be a number or a [re, im] pair");
}

template <class S>
Mat<S> parse_matrix(const Json& j, std::optional<Eigen::Index> rows = {},
                    std::optional<Eigen::Index> cols = {}) {
  if (!j.is_array()) throw ConfigError("matrix must be a nested array");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  Eigen::Index c = r == 0 ? cols.value_or(0) : static_cast<Eigen::Index>(j[0].size());
  Mat<S> m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw ConfigError("matrix rows must have equal length");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = parse_scalar<S>(row[static_cast<std::size_t>(k)]);
  }
  if (rows && m.rows() != *rows) throw ConfigError("matrix has the wrong number of rows");
  if (cols && m.cols() != *cols) throw ConfigError("matrix has the wrong number of columns");
  return m;
}

inline std::string get_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(std::string("missing string field '") + key + "' in " + j.dump());
  return j[key].get<std::string>();
}

inline std::string name_of(const Json& j) { return get_string(j, "name"); }

template <class S>
bool field_matches(const Json& j) {
  if (!j.contains("field")) return true;
  return j["field"].get<std::string>() == field_name<S>();
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) throw ConfigError(std::string("unresolved ") + what + " reference '" + name + "'");
  return it->second;
}

/// Throws a skip marker when a referenced name was itself skipped.
struct Skip {};

template <class S>
void check_skip(const Workspace<S>& ws, const std::string& ref) {
  if (ws.skipped.count(ref)) throw Skip{};
}

template <class S>
void load_models(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    if (!field_matches<S>(j)) {
      if (!ws.models.count(name)) ws.skipped.insert(name);
      continue;
    }
    if (ws.models.count(name)) throw ConfigError("duplicate name '" + name + "'");
    ModelPtr<S> m;
    if (j.contains("builtin")) {
      auto b = get_string(j, "builtin");
      if (b == "so2") m = models::so2<S>();
      else if (b == "so3") m = models::so3<S>();
      else if (b == "cyclic") m = models::cyclic<S>(j.value("order", 2));
      else if (b == "su2") {
        if constexpr (is_complex_v<S>) m = models::su2();
        else throw ConfigError("builtin su2 needs \"field\": \"complex\"");
      } else throw ConfigError("unknown builtin model '" + b + "'");
    } else {
      auto kind = get_string(j, "kind");
      if (kind == "connected") {
        typename GroupModel<S>::ConnectedSpec spec;
        spec.name = name;
        for (const auto& b : j.at("basis")) spec.basis.push_back(parse_matrix<S>(b));
        if (j.contains("structure_constants"))
          for (const auto& c : j["structure_constants"]) spec.structure.push_back(parse_scalar<S>(c));
        spec.orthogonal = j.value("orthogonal", false);
        spec.simple_compact = j.value("simple_compact", false);
        m = GroupModel<S>::connected(std::move(spec), ws.tol);
      } else if (kind == "finite") {
        typename GroupModel<S>::FiniteSpec spec;
        spec.name = name;
        for (const auto& g : j.at("generators")) spec.generators.push_back(parse_matrix<S>(g));
        spec.closure_cap = j.value("closure_cap", std::size_t{10000});
        m = GroupModel<S>::finite(std::move(spec), ws.tol);
      } else {
        throw ConfigError("model kind must be 'connected' or 'finite'");
      }
    }
    ws.models[name] = m;
    ws.skipped.erase(name);
  }
}

template <class S>
void load_restrictions(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    try {
      if (!field_matches<S>(j)) throw Skip{};
      if (ws.restrictions.count(name)) throw ConfigError("duplicate name '" + name + "'");
      auto src = get_string(j, "source"), dst = get_string(j, "target");
      check_skip(ws, src);
      check_skip(ws, dst);
      const auto& gs = lookup(ws.models, src, "model");
      const auto& hs = lookup(ws.models, dst, "model");
      Restriction<S> r;
      if (j.value("builtin", std::string{}) == "so2_in_so3") {
        r = models::so2_in_so3<S>(gs, hs);
      } else {
        r.source = gs;
        r.target = hs;
        if (j.contains("algebra_map"))
          r.algebra_map = parse_matrix<S>(j["algebra_map"], gs->dimension(), hs->dimension());
        if (j.contains("generator_images"))
          for (const auto& g : j["generator_images"]) r.generator_images.push_back(parse_matrix<S>(g));
      }
      r.name = name;
      validate_restriction(r, ws.tol);
      ws.restrictions[name] = std::move(r);
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.restrictions.count(name)) ws.skipped.insert(name);
    }
  }
}

template <class S>
void load_representations(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    try {
      if (!field_matches<S>(j)) throw Skip{};
      if (ws.reps.count(name)) throw ConfigError("duplicate name '" + name + "'");
      RepPtr<S> rep;
      std::vector<RepPtr<S>> parts;
      if (j.contains("sum")) {
        for (const auto& p : j["sum"]) {
          auto ref = p.get<std::string>();
          check_skip(ws, ref);
          parts.push_back(lookup(ws.reps, ref, "representation"));
        }
        if (parts.empty()) throw ConfigError("representation '" + name + "': empty sum");
        rep = direct_sum(parts);
      } else if (j.contains("restrict")) {
        auto ref = get_string(j, "restrict"), along = get_string(j, "along");
        check_skip(ws, ref);
        check_skip(ws, along);
        rep = restrict_representation(lookup(ws.reps, ref, "representation"),
                                      lookup(ws.restrictions, along, "restriction"), ws.tol);
      } else {
        auto mref = get_string(j, "model");
        check_skip(ws, mref);
        const auto& m = lookup(ws.models, mref, "model");
        if (j.contains("builtin")) {
          auto b = get_string(j, "builtin");
          if (b == "trivial") rep = trivial_representation(m, j.value("dim", 1));
          else if (b == "standard") rep = standard_representation(m);
          else if (b == "adjoint") rep = adjoint_representation(m, ws.tol);
          else if (b == "zero") rep = zero_representation(m);
          else if (b == "so2_weight") rep = models::so2_weight(m, j.value("weight", 1));
          else if (b == "so2_character") {
            if constexpr (is_complex_v<S>) rep = models::so2_character(m, j.value("weight", 1));
            else throw ConfigError("so2_character needs \"field\": \"complex\"");
          } else throw ConfigError("unknown builtin representation '" + b + "'");
        } else {
          const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
          std::vector<Mat<S>> acts;
          for (const auto& a : j.at("actions")) acts.push_back(parse_matrix<S>(a, dim, dim));
          rep = Representation<S>::make(m, dim, std::move(acts), name, {}, ws.tol);
        }
      }
      // Relabel under the workspace name, keeping actions and group action.
      rep = Representation<S>::make(rep->model(), rep->dim(), rep->actions(), name,
                                    rep->group_action_fn(), ws.tol);
      ws.reps[name] = rep;
      ws.summands[name] = parts.empty() ? std::vector<RepPtr<S>>{rep} : parts;
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.reps.count(name)) ws.skipped.insert(name);
    }
  }
}

template <class S>
void load_bases(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    try {
      if (!field_matches<S>(j)) throw Skip{};
      if (ws.bases.count(name)) throw ConfigError("duplicate name '" + name + "'");
      std::vector<RepPtr<S>> irreps;
      for (const auto& r : j.at("irreps")) {
        auto ref = r.get<std::string>();
        check_skip(ws, ref);
        irreps.push_back(lookup(ws.reps, ref, "representation"));
      }
      ws.bases[name] = IrrepBasis<S>::make(name, std::move(irreps), ws.tol);
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.bases.count(name)) ws.skipped.insert(name);
    }
  }
}

/// phi given as "identity", "zero", a matrix, or {"blocks": [...]} with one
/// entry per summand of the carrier.
template <class S>
Mat<S> parse_phi(const Workspace<S>& ws, const Json& j, const std::string& carrier, const RepPtr<S>& base) {
  const auto& v = lookup(ws.reps, carrier, "representation");
  const Eigen::Index dm = base->dim();
  auto one_block = [&](const Json& b, Eigen::Index rows) -> Mat<S> {
    if (b.is_string()) {
      auto s = b.get<std::string>();
      if (s == "zero") return Mat<S>::Zero(rows, dm);
      if (s == "identity") {
        if (rows != dm) throw ConfigError("identity block needs a summand of the base dimension");
        return Mat<S>::Identity(dm, dm);
      }
      throw ConfigError("unknown phi keyword '" + s + "'");
    }
    if (b.is_number() || (b.is_array() && b.size() == 2 && b[0].is_number())) {
      if (rows != dm) throw ConfigError("scalar block needs a summand of the base dimension");
      return Mat<S>(Mat<S>::Identity(dm, dm) * parse_scalar<S>(b));
    }
    return parse_matrix<S>(b, rows, dm);
  };
  if (j.is_object() && j.contains("blocks")) {
    const auto& parts = lookup(ws.summands, carrier, "representation");
    const auto& blocks = j["blocks"];
    if (blocks.size() != parts.size())
      throw ConfigError("phi blocks must match the summands of '" + carrier + "'");
    Mat<S> out(0, dm);
    for (std::size_t i = 0; i < parts.size(); ++i) out = vstack<S>(out, one_block(blocks[i], parts[i]->dim()));
    return out;
  }
  return one_block(j, v->dim());
}

template <class S>
void load_pairs(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    try {
      if (!field_matches<S>(j)) throw Skip{};
      if (ws.pairs.count(name)) throw ConfigError("duplicate name '" + name + "'");
      auto b = get_string(j, "base"), c = get_string(j, "carrier");
      check_skip(ws, b);
      check_skip(ws, c);
      const auto& base = lookup(ws.reps, b, "representation");
      const auto& carrier = lookup(ws.reps, c, "representation");
      Mat<S> phi = parse_phi(ws, j.at("phi"), c, base);
      try {
        ws.pairs[name] = make_pair<S>(base, carrier, phi, ws.tol);
        ws.skipped.erase(name);
      } catch (const InvariantError& e) {
        throw ConfigError("pair '" + name + "': " + e.what());
      }
    } catch (const Skip&) {
      if (!ws.pairs.count(name)) ws.skipped.insert(name);
    }
  }
}

template <class S>
void load_morphisms(Workspace<S>& ws, const Json& arr) {
  for (const auto& j : arr) {
    auto name = name_of(j);
    try {
      if (!field_matches<S>(j)) throw Skip{};
      if (ws.morphisms.count(name)) throw ConfigError("duplicate name '" + name + "'");
      auto s = get_string(j, "source"), t = get_string(j, "target");
      check_skip(ws, s);
      check_skip(ws, t);
      const auto& p = lookup(ws.pairs, s, "pair");
      const auto& q = lookup(ws.pairs, t, "pair");
      Mat<S> m = parse_matrix<S>(j.at("matrix"), q.carrier->dim(), p.carrier->dim());
      try {
        ws.morphisms[name] = make_slice_morphism<S>(m, p, q, ws.tol);
        ws.skipped.erase(name);
      } catch (const InvariantError& e) {
        throw ConfigError("morphism '" + name + "': " + e.what());
      }
    } catch (const Skip&) {
      if (!ws.morphisms.count(name)) ws.skipped.insert(name);
    }
  }
}

template <class S>
bool all_resolved(const Workspace<S>& ws, const std::vector<std::string>& refs) {
  for (const auto& r : refs)
    if (ws.skipped.count(r)) return false;
  return true;
}

inline sections::PolynomialSection parse_polynomial(const Json& j, Eigen::Index fiber_dim) {
  sections::PolynomialSection p;
  p.fiber_dim = fiber_dim;
  for (const auto& table : j) {
    std::vector<sections::PolynomialTerm> terms;
    for (const auto& t : table) {
      sections::PolynomialTerm term;
      term.exponents = t.at("exponents").get<std::vector<int>>();
      auto c = t.at("coef").get<std::vector<double>>();
      term.coef = Eigen::Map<RVec>(c.data(), static_cast<Eigen::Index>(c.size()));
      terms.push_back(std::move(term));
    }
    p.per_basis.push_back(std::move(terms));
  }
  return p;
}

inline void load_manifold_fixtures(Workspace<Real>& ws, const Json& doc) {
  for (const auto& j : doc.value("manifolds", Json::array())) {
    auto name = name_of(j);
    try {
      auto mref = get_string(j, "model");
      check_skip(ws, mref);
      const auto& m = lookup(ws.models, mref, "model");
      auto b = get_string(j, "builtin");
      double radius = j.value("radius", 1.0);
      ManifoldPtr x;
      if (b == "circle") x = manifolds::circle(m, radius);
      else if (b == "sphere") x = manifolds::sphere(m, radius);
      else if (b == "point") x = manifolds::point(m);
      else if (b == "group") x = manifolds::group_manifold(m);
      else throw ConfigError("unknown builtin manifold '" + b + "'");
      ws.manifolds[name] = x;
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.manifolds.count(name)) ws.skipped.insert(name);
    }
  }
  for (const auto& j : doc.value("bundles", Json::array())) {
    auto name = name_of(j);
    try {
      auto xref = get_string(j, "manifold");
      check_skip(ws, xref);
      const auto& x = lookup(ws.manifolds, xref, "manifold");
      auto b = j.value("builtin", std::string("trivial"));
      BundlePtr bundle;
      if (b == "tangent") {
        bundle = bundles::tangent(x);
      } else if (b == "trivial") {
        auto f = get_string(j, "fiber");
        check_skip(ws, f);
        bundle = bundles::trivial(name, x, lookup(ws.reps, f, "representation"));
      } else if (b == "product") {
        auto parts = j.at("parts").get<std::vector<std::string>>();
        if (parts.size() != 2) throw ConfigError("product bundle needs two parts");
        bundle = bundles::product(lookup(ws.bundles, parts[0], "bundle"),
                                  lookup(ws.bundles, parts[1], "bundle"));
      } else {
        throw ConfigError("unknown builtin bundle '" + b + "'");
      }
      auto named = std::make_shared<EquivariantBundle>(*bundle);
      named->name = name;
      ws.bundles[name] = named;
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.bundles.count(name)) ws.skipped.insert(name);
    }
  }
  for (const auto& j : doc.value("actions", Json::array())) {
    auto name = name_of(j);
    try {
      auto bref = get_string(j, "bundle");
      check_skip(ws, bref);
      const auto& b = lookup(ws.bundles, bref, "bundle");
      ActionSpec spec;
      spec.name = name;
      spec.bundle = bref;
      spec.expect_valid = j.value("expect", std::string("valid")) == "valid";
      const auto& sec = j.at("section");
      const auto& model = b->manifold->model;
      if (sec.is_string()) {
        spec.section_kind = sec.get<std::string>();
        if (spec.section_kind == "zero") spec.section = sections::zero(b->fiber_dim());
        else if (spec.section_kind == "tautological") {
          if (b->fiber_dim() != model->dimension())
            throw ConfigError("tautological section needs a fiber of the algebra dimension");
          spec.section = sections::tautological();
        } else if (spec.section_kind == "induced") {
          if (b->fiber_dim() != b->manifold->ambient)
            throw ConfigError("induced section needs the ambient fiber");
          spec.section = sections::induced(model);
        } else throw ConfigError("unknown section keyword '" + spec.section_kind + "'");
      } else if (sec.contains("pair")) {
        auto pref = sec["pair"].get<std::string>();
        check_skip(ws, pref);
        const auto& p = lookup(ws.pairs, pref, "pair");
        if (p.carrier->dim() != b->fiber_dim()) throw ConfigError("pair carrier does not match the fiber");
        spec.section_kind = "pair:" + pref;
        spec.section = sections::constant(p.phi);
      } else if (sec.contains("product")) {
        auto refs = sec["product"].get<std::vector<std::string>>();
        if (refs.size() != 2) throw ConfigError("product section needs two factor actions");
        std::vector<SectionField> fields;
        Eigen::Index total = 0;
        for (const auto& r : refs) {
          check_skip(ws, r);
          const auto* a = ws.find_action(r);
          if (!a) throw ConfigError("unresolved action reference '" + r + "'");
          fields.push_back(a->section);
          total += lookup(ws.bundles, a->bundle, "bundle")->fiber_dim();
        }
        if (total != b->fiber_dim()) throw ConfigError("product section does not match the fiber");
        spec.section_kind = "product";
        spec.parts = refs;
        spec.section = sections::product(fields[0], fields[1]);
      } else if (sec.contains("polynomial")) {
        auto poly = parse_polynomial(sec["polynomial"], b->fiber_dim());
        sections::validate_polynomial(poly, model->dimension(), b->manifold->ambient);
        spec.section_kind = "polynomial";
        spec.section = poly.field();
      } else {
        throw ConfigError("section must be a keyword, {\"pair\": ...} or {\"polynomial\": ...}");
      }
      ws.actions.push_back(std::move(spec));
      ws.skipped.erase(name);
    } catch (const Skip&) {
      if (!ws.find_action(name)) ws.skipped.insert(name);
    }
  }
  for (const auto& j : doc.value("manifold_pullbacks", Json::array())) {
    auto name = name_of(j);
    try {
      ManifoldPullbackSpec spec;
      spec.name = name;
      spec.from = get_string(j, "from");
      spec.action = get_string(j, "action");
      spec.map_kind = get_string(j, "map");
      check_skip(ws, spec.from);
      check_skip(ws, spec.action);
      lookup(ws.manifolds, spec.from, "manifold");
      if (!ws.find_action(spec.action)) throw ConfigError("unresolved action reference '" + spec.action + "'");
      if (spec.map_kind == "collapse") {
        spec.map = [](const RVec&) { return RVec(0); };
      } else if (spec.map_kind == "identity") {
        spec.map = [](const RVec& x) { return x; };
      } else if (spec.map_kind == "rotation") {
        spec.angle = j.value("angle", 0.0);
        double th = spec.angle;
        spec.map = [th](const RVec& x) {
          if (x.size() != 2) throw InvariantError("rotation map is defined on the plane");
          RMat r(2, 2);
          r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
          return RVec(r * x);
        };
      } else {
        throw ConfigError("unknown pullback map '" + spec.map_kind + "'");
      }
      ws.manifold_pullbacks.push_back(std::move(spec));
      ws.skipped.erase(name);
    } catch (const Skip&) {
      ws.skipped.insert(name);
    }
  }
  for (const auto& j : doc.value("induced_fields", Json::array())) {
    auto ref = j.get<std::string>();
    if (ws.skipped.count(ref)) continue;
    lookup(ws.manifolds, ref, "manifold");
    ws.induced_fields.push_back(ref);
  }
}

}  // namespace config_detail

template <class S>
Workspace<S> load_workspace(const Json& doc, const LoadOptions& opts = {}) {
  using namespace config_detail;
  Workspace<S> ws;
  try {
    if (doc.contains("tolerance")) ws.tol.matrix = doc["tolerance"].get<double>();
    if (opts.tolerance) ws.tol.matrix = *opts.tolerance;
    ws.seed = opts.seed.value_or(doc.value("seed", std::uint64_t{0}));
    ws.samples = opts.samples.value_or(doc.value("samples", 200));

    load_models(ws, doc.value("models", Json::array()));
    load_restrictions(ws, doc.value("restrictions", Json::array()));
    load_representations(ws, doc.value("representations", Json::array()));
    load_bases(ws, doc.value("irrep_bases", Json::array()));
    load_pairs(ws, doc.value("pairs", Json::array()));
    load_morphisms(ws, doc.value("morphisms", Json::array()));

    if (doc.contains("classify")) {
      ws.classify_explicit = true;
      for (const auto& c : doc["classify"]) {
        auto ref = c.get<std::string>();
        if (ws.skipped.count(ref)) continue;
        lookup(ws.pairs, ref, "pair");
        ws.classify.push_back(ref);
      }
    }
    for (const auto& q : doc.value("hom", Json::array())) {
      HomQuery h{get_string(q, "source"), get_string(q, "target"), q.value("pairs", false)};
      if (ws.skipped.count(h.source) || ws.skipped.count(h.target)) continue;
      if (h.pairs) {
        lookup(ws.pairs, h.source, "pair");
        lookup(ws.pairs, h.target, "pair");
      } else {
        lookup(ws.reps, h.source, "representation");
        lookup(ws.reps, h.target, "representation");
      }
      ws.hom.push_back(h);
    }
    for (const auto& k : doc.value("kgroups", Json::array())) {
      KGroupSpec spec{name_of(k), get_string(k, "basis"), get_string(k, "base"), {}};
      if (!field_matches<S>(k) || !all_resolved(ws, {spec.basis, spec.base})) continue;
      lookup(ws.bases, spec.basis, "irrep basis");
      lookup(ws.reps, spec.base, "representation");
      for (const auto& p : k.value("pullbacks", Json::array())) {
        PullbackSpec pb{get_string(p, "restriction"), get_string(p, "target_basis"),
                        get_string(p, "target_base")};
        if (!all_resolved(ws, {pb.restriction, pb.target_basis, pb.target_base})) continue;
        lookup(ws.restrictions, pb.restriction, "restriction");
        lookup(ws.bases, pb.target_basis, "irrep basis");
        lookup(ws.reps, pb.target_base, "representation");
        spec.pullbacks.push_back(pb);
      }
      ws.kgroups.push_back(std::move(spec));
    }
    for (const auto& f : doc.value("slice_fixtures", Json::array())) {
      SliceFixture fx{name_of(f), get_string(f, "base"),
                      f.value("representations", std::vector<std::string>{}),
                      f.value("pairs", std::vector<std::string>{})};
      if (!field_matches<S>(f) || ws.skipped.count(fx.base)) continue;
      const auto& base = lookup(ws.reps, fx.base, "representation");
      std::erase_if(fx.representations, [&](const std::string& r) { return ws.skipped.count(r) > 0; });
      std::erase_if(fx.pairs, [&](const std::string& r) { return ws.skipped.count(r) > 0; });
      for (const auto& r : fx.representations)
        if (lookup(ws.reps, r, "representation")->model() != base->model())
          throw ConfigError("slice fixture '" + fx.name + "' mixes models");
      for (const auto& p : fx.pairs)
        if (!detail::same_representation(lookup(ws.pairs, p, "pair").base, base))
          throw ConfigError("slice fixture '" + fx.name + "': pair '" + p + "' has another base");
      ws.slice_fixtures.push_back(std::move(fx));
    }
    if constexpr (!is_complex_v<S>) load_manifold_fixtures(ws, doc);
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return ws;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace tgact
