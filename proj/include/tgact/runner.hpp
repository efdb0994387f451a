#pragma once

// Command runner: validate, hom, classify, kgroup, adjoint-check,
// monad-check, manifold-verify and all. Every check draws its randomness from
// a seed derived from the workspace seed and the check's own name, so
// results do not depend on the order in which checks run.

#include "tgact/config.hpp"
#include "tgact/report.hpp"

#include <chrono>
#include <functional>
#include <string_view>

namespace tgact {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_config = 2, exit_refused = 3 };

struct RunOptions {
  std::string field = "real";
  LoadOptions load;
};

struct RunResult {
  int exit_code = exit_pass;
  Report report;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"validate",    "hom",         "classify",
                                                 "kgroup",      "adjoint-check", "monad-check",
                                                 "manifold-verify", "all"};
  return names;
}

/// FNV-1a of the tag folded into the base seed with a splitmix finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace run_detail {

template <class S>
Mat<S> random_hom_element(const std::vector<Intertwiner<S>>& basis, Eigen::Index rows,
                          Eigen::Index cols, Rng& rng) {
  Mat<S> out = Mat<S>::Zero(rows, cols);
  for (const auto& b : basis) out += random_scalar<S>(rng) * b.matrix;
  return out;
}

template <class S>
Mat<S> random_affine_element(const AffineHomSet<S>& h, Rng& rng) {
  return h.element(random_vector<S>(static_cast<Eigen::Index>(h.dimension()), rng));
}

// ---------------------------------------------------------------------------

template <class S>
void validate(const Workspace<S>& ws, Report& rep) {
  const auto& tol = ws.tol;
  for (const auto& [name, m] : ws.models) {
    const std::string p = "model/" + name;
    if (m->is_connected()) {
      rep.add(p + "/bracket_closure", m->bracket_residual(), tol.matrix);
      rep.add(p + "/antisymmetry", m->antisymmetry_residual(), tol.matrix);
      rep.add(p + "/jacobi", m->jacobi_residual(), tol.matrix);
    } else {
      bool closed = true;
      for (const auto& g : m->elements())
        for (const auto& s : m->generators())
          if (!m->find_element(Mat<S>(g * s), tol.matrix)) closed = false;
      rep.flag(p + "/closure", closed, "order " + std::to_string(m->order()));
    }
  }
  for (const auto& [name, r] : ws.reps)
    rep.add("rep/" + name + "/relations", r->relation_residual(), tol.matrix);
  for (const auto& [name, r] : ws.restrictions)
    rep.add("restriction/" + name + "/relations", restriction_residual(r), tol.matrix);
  for (const auto& [name, b] : ws.bases) {
    bool ok = true;
    for (std::size_t i = 0; i < b->size(); ++i) {
      if (hom_dimension(b->irrep(i), b->irrep(i), tol) != b->endomorphism_dim(i)) ok = false;
      for (std::size_t j = 0; j < i; ++j)
        if (hom_dimension(b->irrep(j), b->irrep(i), tol) != 0) ok = false;
    }
    rep.flag("basis/" + name + "/irreducible_distinct", ok);
  }
  for (const auto& [name, p] : ws.pairs)
    rep.add("pair/" + name + "/equivariance", intertwining_residual(*p.base, *p.carrier, p.phi), tol.matrix);
  for (const auto& [name, f] : ws.morphisms) {
    rep.add("morphism/" + name + "/intertwines",
            intertwining_residual(*f.source.carrier, *f.target.carrier, f.map), tol.matrix);
    rep.add("morphism/" + name + "/preserves_structure",
            slice_morphism_residual(f.map, f.source, f.target), tol.matrix);
  }
  if constexpr (!is_complex_v<S>) {
    for (const auto& [name, b] : ws.bundles) {
      SampleOptions opt{ws.samples, derive_seed(ws.seed, "bundle/" + name)};
      for (const auto& c : verify_bundle(*b, opt, tol).checks)
        rep.add("bundle/" + name + "/" + c.name, c.residual, c.tolerance);
    }
    for (const auto& a : ws.actions) {
      const auto& b = ws.bundles.at(a.bundle);
      SampleOptions opt{ws.samples, derive_seed(ws.seed, "section/" + a.name)};
      auto r = verify_section_equivariance(*b, a.section, opt, tol);
      if (a.expect_valid) {
        for (const auto& c : r.checks)
          rep.add("section/" + a.name + "/" + c.name, c.residual, c.tolerance);
      } else {
        rep.add("section/" + a.name + "/negative_control", r.max_residual(), 1e-3, Bound::above,
                "non-equivariant section must be detected");
      }
    }
  }
  rep.artifacts["counts"] = {{"models", ws.models.size()},       {"representations", ws.reps.size()},
                             {"restrictions", ws.restrictions.size()}, {"irrep_bases", ws.bases.size()},
                             {"pairs", ws.pairs.size()},         {"morphisms", ws.morphisms.size()},
                             {"bundles", ws.bundles.size()},     {"actions", ws.actions.size()}};
  rep.artifacts["skipped"] = std::vector<std::string>(ws.skipped.begin(), ws.skipped.end());
}

// ---------------------------------------------------------------------------

template <class S>
void hom(const Workspace<S>& ws, Report& rep) {
  const auto& tol = ws.tol;
  Json out = Json::object();
  for (const auto& q : ws.hom) {
    const std::string key = q.source + "->" + q.target;
    if (!q.pairs) {
      const auto& v = ws.reps.at(q.source);
      const auto& w = ws.reps.at(q.target);
      auto basis = hom_space(v, w, tol);
      double res = 0.0;
      Json mats = Json::array();
      const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
      Mat<S> gram(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        const auto& bi = basis[static_cast<std::size_t>(i)].matrix;
        res = std::max(res, intertwining_residual(*v, *w, bi));
        mats.push_back(matrix_to_json(bi));
        for (Eigen::Index j = 0; j < k; ++j)
          gram(i, j) = (basis[static_cast<std::size_t>(j)].matrix.adjoint() * bi).trace();
      }
      rep.add("hom/" + key + "/intertwines", res, tol.matrix);
      rep.add("hom/" + key + "/orthonormal", k == 0 ? 0.0 : relative_diff(gram, Mat<S>(Mat<S>::Identity(k, k))),
              tol.matrix);
      out[key] = {{"kind", "representations"}, {"dimension", basis.size()}, {"basis", mats}};
    } else {
      const auto& p = ws.pairs.at(q.source);
      const auto& r = ws.pairs.at(q.target);
      auto h = hom_pairs(p, r, tol);
      Json entry = {{"kind", "pairs"}, {"empty", h.empty}, {"least_squares_residual", h.residual}};
      if (!h.empty) {
        double res = slice_morphism_residual(h.particular, p, r);
        res = std::max(res, intertwining_residual(*p.carrier, *r.carrier, h.particular));
        Json homog = Json::array();
        for (const auto& m : h.homogeneous) {
          res = std::max(res, intertwining_residual(*p.carrier, *r.carrier, m));
          res = std::max(res, max_abs(Mat<S>(m * p.phi)));
          homog.push_back(matrix_to_json(m));
        }
        rep.add("hom_pairs/" + key + "/solutions", res, tol.matrix);
        entry["dimension"] = h.dimension();
        entry["particular"] = matrix_to_json(h.particular);
        entry["homogeneous"] = homog;
      }
      out[key] = entry;
    }
  }
  rep.artifacts["hom"] = out;
}

// ---------------------------------------------------------------------------

template <class S>
Json canonical_record(const CanonicalForm<S>& cf) {
  return {{"n", cf.n},
          {"phi_nonzero", cf.phi_nonzero},
          {"complement_dim", cf.complement->dim()},
          {"normal_form", cf.phi_nonzero ? "(m,id)^" + std::to_string(cf.n) + " x (W,0)" : "(V,0)"},
          {"normal_phi", matrix_to_json(cf.normal.phi)}};
}

template <class S>
bool classifiable(const SlicePair<S>& p, const Tolerances& tol) {
  return p.base->model()->simple_compact() && is_absolutely_irreducible(p.base, tol);
}

template <class S>
void classify(const Workspace<S>& ws, Report& rep) {
  const auto& tol = ws.tol;
  std::vector<std::string> names;
  if (ws.classify_explicit) {
    names = ws.classify;
  } else {
    for (const auto& [name, p] : ws.pairs)
      if (classifiable(p, tol)) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  Json out = Json::object();
  for (const auto& name : names) {
    const auto& p = ws.pairs.at(name);
    auto cf = canonical_form(p, tol);  // RefusedError propagates
    const std::string c = "classify/" + name;
    const Eigen::Index d = p.carrier->dim();
    rep.add(c + "/witness", slice_morphism_residual(cf.witness.map, p, cf.normal), tol.matrix);
    rep.add(c + "/witness_inverse", slice_morphism_residual(cf.witness_inverse.map, cf.normal, p), tol.matrix);
    rep.add(c + "/witness_invertible",
            relative_diff(Mat<S>(cf.witness_inverse.map * cf.witness.map), Mat<S>(Mat<S>::Identity(d, d))),
            tol.matrix);
    rep.flag(c + "/multiplicity", cf.n == isotypic_multiplicity(p.carrier, p.base, tol));
    rep.flag(c + "/dichotomy", cf.phi_nonzero == (max_abs(p.phi) > tol.matrix));
    Json record = canonical_record(cf);
    std::vector<S> scalars = {S(2.0), S(-0.5), S(3.7)};
    if constexpr (is_complex_v<S>) scalars.push_back(S(0.0, 1.0));
    bool stable = true;
    for (const auto& s : scalars) {
      SlicePair<S> scaled{p.base, p.carrier, Mat<S>(s * p.phi)};
      if (canonical_record(canonical_form(scaled, tol)) != record) stable = false;
    }
    rep.flag(c + "/scaling_invariant", stable);
    rep.notes.push_back(name + ": n = " + std::to_string(cf.n) + ", " + (cf.phi_nonzero ? "nonzero" : "zero") +
                        ", normal form " + record["normal_form"].get<std::string>());
    record["witness"] = matrix_to_json(cf.witness.map);
    out[name] = record;
  }
  rep.artifacts["canonical_forms"] = out;
}

// ---------------------------------------------------------------------------

template <class S>
SlicePair<S> random_pair(const BasisPtr<S>& basis, const RepPtr<S>& base, Rng& rng, const Tolerances& tol) {
  std::uniform_int_distribution<int> mult(0, 2);
  std::vector<RepPtr<S>> parts;
  for (const auto& u : basis->irreps())
    for (int k = mult(rng); k > 0; --k) parts.push_back(u);
  parts.push_back(base);  // keep Hom(m, V) nonzero
  auto v = direct_sum(parts);
  auto homs = hom_space(base, v, tol);
  Mat<S> phi = random_hom_element(homs, v->dim(), base->dim(), rng);
  return make_pair<S>(base, v, phi, tol);
}

template <class S>
void kgroup(const Workspace<S>& ws, Report& rep) {
  const auto& tol = ws.tol;
  Json out = Json::object();
  for (const auto& spec : ws.kgroups) {
    const std::string k = "kgroup/" + spec.name;
    const auto& basis = ws.bases.at(spec.basis);
    const auto& base = ws.reps.at(spec.base);
    Json art;
    art["basis"] = basis->name();
    std::vector<KClass<S>> classes;

    Json rep_classes = Json::object();
    std::map<std::string, KClass<S>> by_rep;
    for (const auto& [name, v] : ws.reps) {
      if (v->model() != basis->model()) continue;
      try {
        auto c = k_class_of_rep(v, basis, tol);
        rep_classes[name] = c.to_string();
        by_rep.emplace(name, c);
        classes.push_back(c);
      } catch (const InvariantError&) {
        rep_classes[name] = "outside basis";
      }
    }
    art["representation_classes"] = rep_classes;

    // K(U) and K(sigma) on fixture classes and seeded integer classes.
    Rng rng(derive_seed(ws.seed, k + "/classes"));
    std::uniform_int_distribution<long long> coef(-3, 3);
    for (int s = 0; s < 24; ++s) {
      auto c = k_zero(basis, KGroup::representations);
      for (auto& x : c.coeffs) x = coef(rng);
      classes.push_back(c);
    }
    bool inverse = true;
    for (const auto& c : classes) {
      auto as_pair = k_of_sigma(c);
      if (!(k_of_U(as_pair) == c)) inverse = false;
      if (!(k_of_sigma(k_of_U(as_pair)) == as_pair)) inverse = false;
    }
    rep.flag(k + "/U_sigma_inverse", inverse, std::to_string(classes.size()) + " classes");
    art["U_sigma_inverse"] = inverse;
    art["inverse_classes_checked"] = classes.size();

    // Pair classes and the product witness.
    Json pair_classes = Json::object();
    double witness_res = 0.0;
    bool sum_rule = true, square_rule = true, u_rule = true;
    auto witness_check = [&](const SlicePair<S>& p) {
      auto w = witness_product_iso(p, tol);
      const Eigen::Index d = 2 * p.carrier->dim();
      witness_res = std::max({witness_res, slice_morphism_residual(w.forward.map, w.forward.source, w.forward.target),
                              slice_morphism_residual(w.backward.map, w.backward.source, w.backward.target),
                              relative_diff(Mat<S>(w.backward.map * w.forward.map), Mat<S>(Mat<S>::Identity(d, d)))});
      auto cp = k_class_of_pair(p, basis, tol);
      auto square = pair_product(p, p).product;
      auto mixed = pair_product(p, functor_sigma(functor_U(p), p.base)).product;
      if (!(k_class_of_pair(square, basis, tol) == cp + cp)) sum_rule = false;
      if (!(k_class_of_pair(square, basis, tol) == k_class_of_pair(mixed, basis, tol))) square_rule = false;
      if (!(k_of_U(cp) == k_class_of_rep(functor_U(p), basis, tol))) u_rule = false;
    };
    int checked_pairs = 0;
    for (const auto& [name, p] : ws.pairs) {
      if (!detail::same_representation(p.base, base)) continue;
      try {
        pair_classes[name] = k_class_of_pair(p, basis, tol).to_string();
      } catch (const InvariantError&) {
        pair_classes[name] = "outside basis";
        continue;
      }
      witness_check(p);
      ++checked_pairs;
    }
    Rng prng(derive_seed(ws.seed, k + "/pairs"));
    for (int s = 0; s < 20; ++s, ++checked_pairs) witness_check(random_pair(basis, base, prng, tol));
    art["pair_classes"] = pair_classes;
    rep.add(k + "/product_witness", witness_res, std::min(tol.matrix, 1e-10), Bound::at_most,
            std::to_string(checked_pairs) + " pairs");
    rep.flag(k + "/product_class_additive", sum_rule);
    rep.flag(k + "/square_equals_mixed_square", square_rule);
    rep.flag(k + "/U_on_pairs", u_rule);

    // [(m, id)] = [(m, 0)] although the pairs are not isomorphic.
    auto ext = extremal_pairs(base);
    auto zero_pair = functor_sigma(base, base);
    auto c_init = k_class_of_pair(ext.initial, basis, tol);
    auto c_zero = k_class_of_pair(zero_pair, basis, tol);
    bool equal = c_init == c_zero;
    auto iso = is_isomorphic(ext.initial, zero_pair, derive_seed(ws.seed, k + "/iso"), tol);
    rep.flag(k + "/identity_zero_classes_equal", equal, c_init.to_string() + " vs " + c_zero.to_string());
    rep.flag(k + "/identity_zero_pairs_not_isomorphic", !iso.isomorphic);
    rep.notes.push_back(spec.name + ": K(U) o K(sigma) = id " + (inverse ? "holds" : "FAILS") + " on " +
                        std::to_string(classes.size()) + " classes");
    rep.notes.push_back(spec.name + ": [(" + base->label() + ", id)] " + (equal ? "=" : "!=") + " [(" +
                        base->label() + ", 0)] = " + c_init.to_string() + "; the pairs are " +
                        (iso.isomorphic ? "isomorphic" : "not isomorphic"));
    art["identity_pair_class"] = c_init.to_string();
    art["zero_pair_class"] = c_zero.to_string();
    art["identity_zero_classes_equal"] = equal;
    art["identity_zero_pairs_isomorphic"] = iso.isomorphic;

    // K(F) on generators.
    bool f_rule = true;
    for (const auto& [name, c] : by_rep) {
      auto expected = k_class_of_pair(functor_F(ws.reps.at(name), base), basis, tol);
      if (!(k_of_F(c, base, tol) == expected)) f_rule = false;
    }
    rep.flag(k + "/F_on_generators", f_rule);

    // Pullbacks along restrictions.
    Json pbs = Json::object();
    for (const auto& pb : spec.pullbacks) {
      const std::string kp = k + "/pullback/" + pb.restriction;
      const auto& r = ws.restrictions.at(pb.restriction);
      const auto& tb = ws.bases.at(pb.target_basis);
      const auto& tbase = ws.reps.at(pb.target_base);
      try {
        auto kpb = k_pullback(r, basis, tb, tol);
        bool reps_ok = true, sigma_ok = true, pairs_ok = true;
        for (const auto& [name, c] : by_rep) {
          auto restricted = restrict_representation(ws.reps.at(name), r, tol);
          if (!(apply_pullback(kpb, c) == k_class_of_rep(restricted, tb, tol))) reps_ok = false;
          if (!(apply_pullback(kpb, k_of_sigma(c)) == k_of_sigma(apply_pullback(kpb, c)))) sigma_ok = false;
        }
        for (const auto& [name, p] : ws.pairs) {
          if (!detail::same_representation(p.base, base)) continue;
          if (!pair_classes.contains(name) || pair_classes[name] == "outside basis") continue;
          auto rp = restrict_pair(p, r, tbase, tol);
          if (!(apply_pullback(kpb, k_class_of_pair(p, basis, tol)) == k_class_of_pair(rp, tb, tol))) pairs_ok = false;
        }
        rep.flag(kp + "/representations", reps_ok);
        rep.flag(kp + "/commutes_with_sigma", sigma_ok);
        rep.flag(kp + "/pairs", pairs_ok);
        Json cols = Json::object();
        for (std::size_t i = 0; i < basis->size(); ++i) {
          KClass<S> c{tb, KGroup::representations, kpb.columns[i]};
          cols[basis->irrep(i)->label()] = c.to_string();
        }
        pbs[pb.restriction] = cols;
      } catch (const InvariantError& e) {
        rep.flag(kp + "/computed", false, e.what());
      }
    }
    if (!spec.pullbacks.empty()) art["pullbacks"] = pbs;
    out[spec.name] = art;
  }
  rep.artifacts["kgroups"] = out;
}

// ---------------------------------------------------------------------------

template <class S>
void adjoint_check(const Workspace<S>& ws, Report& rep) {
  const auto& tol = ws.tol;
  Json out = Json::object();
  for (const auto& fx : ws.slice_fixtures) {
    const std::string a = "adjunction/" + fx.name;
    const auto& base = ws.reps.at(fx.base);
    Rng rng(derive_seed(ws.seed, a));
    double roundtrip = 0.0, back = 0.0;
    std::size_t mismatches = 0, empties = 0, grid = 0;
    Json table = Json::array();
    for (const auto& vn : fx.representations) {
      const auto& v = ws.reps.at(vn);
      for (const auto& qn : fx.pairs) {
        const auto& q = ws.pairs.at(qn);
        auto homs = hom_space(v, q.carrier, tol);
        auto hp = hom_pairs(functor_F(v, base), q, tol);
        ++grid;
        if (hp.empty) ++empties;
        if (hp.dimension() != homs.size()) ++mismatches;
        table.push_back({{"V", vn}, {"pair", qn}, {"hom_dim", homs.size()}, {"hom_pairs_dim", hp.dimension()}});
        for (const auto& f : homs) {
          auto psi = adjunction_transpose(f, q, tol);
          auto f2 = adjunction_transpose_inverse(psi, v);
          roundtrip = std::max(roundtrip, relative_diff(f2.matrix, f.matrix));
        }
        if (!hp.empty) {
          for (int s = 0; s < 4; ++s) {
            Mat<S> psi = random_affine_element(hp, rng);
            SliceMorphism<S> m{psi, functor_F(v, base), q};
            auto f = adjunction_transpose_inverse(m, v);
            back = std::max(back, relative_diff(adjunction_transpose(f, q, tol).map, psi));
          }
        }
      }
    }
    rep.add(a + "/transpose_then_inverse", roundtrip, tol.matrix);
    rep.add(a + "/inverse_then_transpose", back, tol.matrix);
    rep.flag(a + "/dimensions_agree", mismatches == 0, std::to_string(mismatches) + " mismatches");
    rep.flag(a + "/hom_sets_nonempty", empties == 0);

    // U sigma = id, and any section of U sends (E) to (E, 0).
    const std::string u = "section/" + fx.name;
    bool u_sigma = true, forced = true;
    double sigma_morphisms = 0.0;
    std::size_t candidates = 0;
    for (const auto& vn : fx.representations) {
      const auto& v = ws.reps.at(vn);
      auto sv = functor_sigma(v, base);
      if (!detail::same_representation(functor_U(sv), v) || max_abs(sv.phi) != 0.0) u_sigma = false;
      for (const auto& wn : fx.representations) {
        const auto& w = ws.reps.at(wn);
        for (const auto& f : hom_space(v, w, tol))
          sigma_morphisms = std::max(sigma_morphisms,
                                     slice_morphism_residual(f.matrix, sv, functor_sigma(w, base)));
      }
      // Candidate structure maps phi; 0: (E, phi) -> (E, phi) is a morphism iff phi = 0.
      auto homs = hom_space(base, v, tol);
      std::vector<Mat<S>> phis = {Mat<S>::Zero(v->dim(), base->dim())};
      for (int s = 0; s < 6 && !homs.empty(); ++s)
        phis.push_back(random_hom_element(homs, v->dim(), base->dim(), rng));
      for (const auto& phi : phis) {
        SlicePair<S> e{base, v, phi};
        Mat<S> zero = Mat<S>::Zero(v->dim(), v->dim());
        bool zero_is_morphism = slice_morphism_residual(zero, e, e) <= tol.matrix;
        bool phi_zero = max_abs(phi) <= tol.matrix;
        if (zero_is_morphism != phi_zero) forced = false;
        ++candidates;
      }
    }
    rep.flag(u + "/U_sigma_identity", u_sigma);
    rep.add(u + "/sigma_on_morphisms", sigma_morphisms, tol.matrix);
    rep.flag(u + "/structure_maps_forced_zero", forced, std::to_string(candidates) + " candidate structure maps");
    out[fx.name] = {{"grid_size", grid}, {"grid", table}, {"section_candidates", candidates},
                    {"structure_maps_forced_zero", forced}};
  }
  rep.artifacts["adjunction"] = out;
}

// ---------------------------------------------------------------------------

template <class S>
void monad_check(const Workspace<S>& ws, Report& rep, int solutions = 50) {
  const auto& tol = ws.tol;
  Json out = Json::object();
  for (const auto& fx : ws.slice_fixtures) {
    const std::string mname = "monad/" + fx.name;
    const auto& base = ws.reps.at(fx.base);
    Rng rng(derive_seed(ws.seed, mname));
    Json carriers = Json::object();
    bool dims_ok = true, all_nonempty = true;
    double unit = 0.0, assoc = 0.0, roundtrip = 0.0;
    bool all_algebras = true;
    for (const auto& an : fx.representations) {
      const auto& a = ws.reps.at(an);
      auto t = monad_apply(a, base);
      // Unit-law solutions: intertwiners h: m + a -> a with h eta = 1.
      auto basis = hom_space(t.ta, a, tol);
      const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
      const Eigen::Index da = a->dim();
      Mat<S> system(da * da, k);
      for (Eigen::Index j = 0; j < k; ++j)
        system.col(j) = vectorize<S>(Mat<S>(basis[static_cast<std::size_t>(j)].matrix * t.eta));
      Vec<S> rhs = vectorize<S>(Mat<S>(Mat<S>::Identity(da, da)));
      auto ls = solve_least_squares<S>(system, rhs);
      bool nonempty = ls.residual <= tol.matrix;
      Mat<S> ns = k == 0 ? Mat<S>(0, 0)
                         : (system.rows() == 0 ? Mat<S>(Mat<S>::Identity(k, k)) : nullspace<S>(system, tol.nullspace));
      const std::size_t affine_dim = static_cast<std::size_t>(ns.cols());
      const std::size_t expected = hom_dimension(base, a, tol);
      if (affine_dim != expected) dims_ok = false;
      if (!nonempty) all_nonempty = false;
      carriers[an] = {{"unit_law_solution_dim", affine_dim}, {"hom_m_a_dim", expected}};
      if (!nonempty) continue;
      for (int s = 0; s < solutions; ++s) {
        Vec<S> coeffs = ls.x;
        if (ns.cols() > 0) coeffs += ns * random_vector<S>(ns.cols(), rng);
        Mat<S> h = Mat<S>::Zero(da, base->dim() + da);
        for (Eigen::Index j = 0; j < k; ++j) h += coeffs(j) * basis[static_cast<std::size_t>(j)].matrix;
        auto chk = algebra_check(a, base, h, tol);
        unit = std::max(unit, chk.unit_residual);
        assoc = std::max(assoc, chk.associativity_residual);
        if (!chk.algebra) {
          all_algebras = false;
          continue;
        }
        auto p = from_algebra(*chk.algebra);
        roundtrip = std::max(roundtrip, relative_diff(to_algebra(p).structure, h));
        if (intertwining_residual(*base, *a, p.phi) > tol.matrix) all_algebras = false;
      }
    }
    rep.flag(mname + "/unit_law_dimension", dims_ok);
    rep.flag(mname + "/unit_law_solvable", all_nonempty);
    rep.add(mname + "/unit_law", unit, tol.matrix, Bound::at_most,
            std::to_string(solutions) + " seeded solutions per carrier");
    rep.add(mname + "/associativity", assoc, tol.matrix);
    rep.flag(mname + "/solutions_are_algebras", all_algebras);

    // Comparison functor on pairs and morphisms.
    double pair_roundtrip = 0.0, alg_morph = 0.0;
    bool pair_algebras = true, equivalence = true;
    for (const auto& pn : fx.pairs) {
      const auto& p = ws.pairs.at(pn);
      pair_roundtrip = std::max(pair_roundtrip, relative_diff(comparison_roundtrip(p).phi, p.phi));
      if (!algebra_check(p.carrier, base, to_algebra(p).structure, tol).algebra) pair_algebras = false;
      for (const auto& qn : fx.pairs) {
        const auto& q = ws.pairs.at(qn);
        auto src = to_algebra(p), dst = to_algebra(q);
        auto hp = hom_pairs(p, q, tol);
        if (!hp.empty) {
          for (int s = 0; s < 3; ++s) {
            Mat<S> f = random_affine_element(hp, rng);
            alg_morph = std::max(alg_morph, algebra_morphism_residual(f, src, dst));
          }
        }
        auto homs = hom_space(p.carrier, q.carrier, tol);
        if (!homs.empty()) {
          Mat<S> f = random_hom_element(homs, q.carrier->dim(), p.carrier->dim(), rng);
          bool slice_ok = slice_morphism_residual(f, p, q) <= tol.matrix;
          bool alg_ok = algebra_morphism_residual(f, src, dst) <= tol.matrix;
          if (slice_ok != alg_ok) equivalence = false;
        }
      }
    }
    rep.add(mname + "/comparison_roundtrip", std::max(roundtrip, pair_roundtrip), tol.matrix);
    rep.flag(mname + "/pairs_give_algebras", pair_algebras);
    rep.add(mname + "/morphisms_give_algebra_morphisms", alg_morph, tol.matrix);
    rep.flag(mname + "/morphism_conditions_equivalent", equivalence);
    out[fx.name] = {{"carriers", carriers}, {"solutions_per_carrier", solutions}};
  }
  rep.artifacts["monad"] = out;
}

// ---------------------------------------------------------------------------

inline void add_sampled(Report& rep, const std::string& prefix, const SampledReport& r) {
  for (const auto& c : r.checks) rep.add(prefix + "/" + c.name, c.residual, c.tolerance);
}

/// Closed-form derivative of the ambient linear action, when known.
inline std::optional<RVec> linear_action_derivative(const EmbeddedGManifold& x_space,
                                                    const AlgebraElement<Real>& alpha, const RVec& x) {
  const Eigen::Index n = x_space.model->ambient_size();
  RMat a = alpha.matrix();
  if (x_space.ambient == 0) return RVec(0);
  if (x_space.ambient == n) return RVec(a * x);
  if (x_space.ambient == n * n) return RVec(kron<Real>(RMat::Identity(n, n), a) * x);
  return std::nullopt;
}

inline void manifold_verify(const Workspace<Real>& ws, Report& rep) {
  const auto& tol = ws.tol;
  Json out = Json::object();
  for (const auto& a : ws.actions) {
    const std::string p = "action/" + a.name;
    const auto& b = ws.bundles.at(a.bundle);
    SampleOptions opt{ws.samples, derive_seed(ws.seed, p)};
    add_sampled(rep, p + "/bundle", verify_bundle(*b, opt, tol));
    if (!a.expect_valid) {
      auto eq = verify_section_equivariance(*b, a.section, opt, tol);
      auto law = verify_action_law(reconstruct_action_unchecked(b, a.section), opt, tol);
      rep.add(p + "/negative_control/equivariance", eq.max_residual(), 1e-3, Bound::above);
      rep.add(p + "/negative_control/action_law", law.max_residual(), 1e-3, Bound::above);
      bool refused = false;
      try {
        reconstruct_action(b, a.section, opt, tol);
      } catch (const InvariantError&) {
        refused = true;
      }
      rep.flag(p + "/negative_control/reconstruction_refused", refused);
      out[a.name] = {{"expect", "invalid"}, {"equivariance_residual", eq.max_residual()},
                     {"action_law_residual", law.max_residual()}};
      continue;
    }
    add_sampled(rep, p + "/section", verify_section_equivariance(*b, a.section, opt, tol));
    AffineActionModel mu;
    try {
      mu = reconstruct_action(b, a.section, opt, tol);
    } catch (const InvariantError& e) {
      rep.flag(p + "/reconstruct", false, e.what());
      continue;
    }
    auto law = verify_action_law(mu, opt, tol);
    add_sampled(rep, p + "/law", law);
    auto dec = decompose_action(mu, false);
    double sec = compare_sections(*b, dec.section, a.section, opt);
    double grp = compare_group_parts(*b, dec.group_part, bundle_group_action(b), opt);
    auto rebuilt = reconstruct_from_parts(b, dec.group_part, dec.section);
    double act = compare_actions(rebuilt, mu, opt);
    rep.add(p + "/decompose_after_reconstruct/section", sec, tol.sample);
    rep.add(p + "/decompose_after_reconstruct/group_part", grp, tol.sample);
    rep.add(p + "/reconstruct_after_decompose", act, tol.sample);
    if (!a.parts.empty()) {
      // Product actions act diagonally.
      const auto* f1 = ws.find_action(a.parts[0]);
      const auto* f2 = ws.find_action(a.parts[1]);
      auto mu1 = reconstruct_action_unchecked(ws.bundles.at(f1->bundle), f1->section);
      auto mu2 = reconstruct_action_unchecked(ws.bundles.at(f2->bundle), f2->section);
      const Eigen::Index d1 = ws.bundles.at(f1->bundle)->fiber_dim();
      AffineActionModel diag;
      diag.bundle = b;
      diag.act = [mu1, mu2, d1](const TangentElement<Real>& u, const RVec& x, const RVec& e) {
        RVec l = mu1(u, x, RVec(e.head(d1))), r = mu2(u, x, RVec(e.tail(e.size() - d1)));
        RVec o(l.size() + r.size());
        o << l, r;
        return o;
      };
      rep.add(p + "/product_is_diagonal", compare_actions(mu, diag, opt), tol.sample);
    }
    out[a.name] = {{"expect", "valid"}, {"section", a.section_kind}, {"action_law_residual", law.max_residual()},
                   {"roundtrip_residual", std::max({sec, grp, act})}};
  }

  Json pbs = Json::object();
  for (const auto& spec : ws.manifold_pullbacks) {
    const std::string p = "pullback/" + spec.name;
    const auto* act = ws.find_action(spec.action);
    const auto& over_y = ws.bundles.at(act->bundle);
    const auto& x_space = ws.manifolds.at(spec.from);
    SampleOptions opt{ws.samples, derive_seed(ws.seed, p)};
    PulledBack pb;
    try {
      pb = pullback_pair(spec.map, x_space, over_y, act->section, opt, tol);
    } catch (const InvariantError& e) {
      rep.flag(p + "/map_equivariant", false, e.what());
      continue;
    }
    rep.add(p + "/map_equivariant", map_equivariance_residual(spec.map, *x_space, *over_y->manifold, opt),
            tol.sample);
    auto mu_x = reconstruct_action(pb.bundle, pb.section, opt, tol);
    auto mu_y = reconstruct_action_unchecked(over_y, act->section);
    add_sampled(rep, p + "/law", verify_action_law(mu_x, opt, tol));
    // v_g . (x, e) = (g x, v_g . e) with e in E_{f(x)}.
    Rng rng(opt.seed);
    double formula = 0.0;
    for (int s = 0; s < opt.samples; ++s) {
      RVec x = x_space->sample(rng);
      RVec e = pb.bundle->sample_fiber_vector(x, rng);
      auto u = random_tangent_element(x_space->model, rng);
      formula = std::max(formula, detail::vec_diff(mu_x(u, x, e), mu_y(u, spec.map(x), e)));
    }
    rep.add(p + "/pullback_formula", formula, tol.sample);
    pbs[spec.name] = {{"map", spec.map_kind}, {"from", spec.from}, {"action", spec.action}};
  }

  Json fields = Json::object();
  for (const auto& name : ws.induced_fields) {
    const std::string p = "induced/" + name;
    const auto& x_space = *ws.manifolds.at(name);
    Rng rng(derive_seed(ws.seed, p));
    double fd = 0.0, tangent = 0.0, zero = 0.0;
    bool closed_known = true;
    const bool round = x_space.ambient > 0 && x_space.ambient == x_space.model->ambient_size();
    for (int s = 0; s < ws.samples; ++s) {
      RVec x = x_space.sample(rng);
      auto alpha = random_real_algebra_element(x_space.model, rng);
      RVec v = induced_vector_field(x_space, alpha, x, tol.fd_step);
      auto closed = linear_action_derivative(x_space, alpha, x);
      if (!closed) {
        closed_known = false;
        break;
      }
      fd = std::max(fd, detail::vec_diff(v, *closed));
      if (round) tangent = std::max(tangent, std::abs(x.dot(v)) / std::max(1.0, x.norm()));
      RVec v0 = induced_vector_field(x_space, AlgebraElement<Real>::zero(x_space.model), x, tol.fd_step);
      zero = std::max(zero, v0.size() == 0 ? 0.0 : v0.cwiseAbs().maxCoeff());
    }
    if (!closed_known) {
      rep.flag(p + "/closed_form_available", false);
      continue;
    }
    rep.add(p + "/matches_linear_derivative", fd, tol.fd, Bound::at_most, "step " + std::to_string(tol.fd_step));
    rep.add(p + "/zero_algebra_element", zero, tol.fd);
    if (round) rep.add(p + "/tangent_to_orbit", tangent, tol.fd);
    fields[name] = {{"step", tol.fd_step}, {"max_error", fd}};
  }
  rep.artifacts["actions"] = out;
  rep.artifacts["pullbacks"] = pbs;
  rep.artifacts["induced_fields"] = fields;
}

template <class S>
void run_command(const std::string& command, const Workspace<S>& ws, const Json& doc,
                 const RunOptions& opts, Report& rep) {
  if (command == "validate") validate(ws, rep);
  else if (command == "hom") hom(ws, rep);
  else if (command == "classify") classify(ws, rep);
  else if (command == "kgroup") kgroup(ws, rep);
  else if (command == "adjoint-check") adjoint_check(ws, rep);
  else if (command == "monad-check") monad_check(ws, rep);
  else if (command == "manifold-verify") {
    if constexpr (is_complex_v<S>) {
      // Bundles are real; the complex suite re-runs the real manifold checks.
      auto real_ws = load_workspace<Real>(doc, opts.load);
      manifold_verify(real_ws, rep);
      rep.artifacts["note"] = "manifold checks run over the real field";
    } else {
      manifold_verify(ws, rep);
    }
  } else if (command == "all") {
    for (const auto& c : command_names()) {
      if (c == "all") continue;
      Report sub;
      run_command(c, ws, doc, opts, sub);
      rep.merge(c, sub);
    }
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

template <class S>
RunResult run_field(const std::string& command, const Json& doc, const RunOptions& opts) {
  RunResult res;
  auto& rep = res.report;
  rep.command = command;
  rep.field = field_name<S>();
  auto start = std::chrono::steady_clock::now();
  try {
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
      throw ConfigError("unknown command '" + command + "'");
    auto ws = load_workspace<S>(doc, opts.load);
    rep.seed = ws.seed;
    rep.samples = ws.samples;
    rep.tolerance = ws.tol.matrix;
    run_command(command, ws, doc, opts, rep);
    rep.sort_checks();
    res.exit_code = rep.passed() ? exit_pass : exit_fail;
  } catch (const ConfigError& e) {
    rep.error = std::string("config error: ") + e.what();
    res.exit_code = exit_config;
  } catch (const RefusedError& e) {
    rep.error = std::string("refused: ") + e.what();
    res.exit_code = exit_refused;
  } catch (const Error& e) {
    rep.error = std::string("verification error: ") + e.what();
    res.exit_code = exit_fail;
  }
  rep.sort_checks();
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace run_detail

inline RunResult run(const std::string& command, const Json& doc, const RunOptions& opts = {}) {
  if (opts.field == "real") return run_detail::run_field<Real>(command, doc, opts);
  if (opts.field == "complex") return run_detail::run_field<Complex>(command, doc, opts);
  RunResult res;
  res.report.command = command;
  res.report.field = opts.field;
  res.report.error = "config error: --field must be 'real' or 'complex'";
  res.exit_code = exit_config;
  return res;
}

inline RunResult run_file(const std::string& command, const std::string& path, const RunOptions& opts = {}) {
  Json doc;
  try {
    doc = read_json_file(path);
  } catch (const ConfigError& e) {
    RunResult res;
    res.report.command = command;
    res.report.field = opts.field;
    res.report.error = std::string("config error: ") + e.what();
    res.exit_code = exit_config;
    return res;
  }
  return run(command, doc, opts);
}

}  // namespace tgact
