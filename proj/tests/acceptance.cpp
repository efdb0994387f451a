// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace tgact;

namespace {

std::string fixture(const std::string& name) { return std::string(TGACT_FIXTURES_DIR) + "/" + name; }

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

/// Runs a CLI command on the shared fixture file and requires a clean pass.
void require_cli(Outcome& out, const std::string& command, const std::string& field) {
  RunOptions opts;
  opts.field = field;
  opts.load.seed = 0;
  auto r = run_file(command, fixture("all.json"), opts);
  out.require(r.exit_code == exit_pass, command + " [" + field + "] exit " + std::to_string(r.exit_code));
  out.detail << command << "[" << field << "]: " << r.report.checks.size() << " checks; ";
}

// ---------------------------------------------------------------------------
// Manifold fixtures shared by criteria 1, 2 and 8.

struct GeoCase {
  std::string name;
  BundlePtr bundle;
  SectionField rho;
};

std::vector<GeoCase> geometric_cases() {
  auto so2 = models::so2<Real>();
  auto so3 = models::so3<Real>();
  auto circle = manifolds::circle(so2);
  auto sphere = manifolds::sphere(so3);

  sections::PolynomialSection norm2;  // alpha |x|^2 on the circle
  norm2.fiber_dim = 1;
  norm2.per_basis = {{{{2, 0}, RVec::Ones(1)}, {{0, 2}, RVec::Ones(1)}}};
  sections::PolynomialSection pairing;  // <x, alpha> on the sphere
  pairing.fiber_dim = 1;
  for (int i = 0; i < 3; ++i) {
    std::vector<int> ex(3, 0);
    ex[static_cast<std::size_t>(i)] = 1;
    pairing.per_basis.push_back({{ex, RVec::Ones(1)}});
  }
  sections::validate_polynomial(norm2, 1, 2);
  sections::validate_polynomial(pairing, 3, 3);

  return {
      {"sigma/circle", bundles::trivial("std", circle, standard_representation(so2)), sections::zero(2)},
      {"sigma/sphere", bundles::trivial("std", sphere, standard_representation(so3)), sections::zero(3)},
      {"adjoint/circle", bundles::trivial("adj", circle, adjoint_representation(so2)), sections::tautological()},
      {"adjoint/sphere", bundles::trivial("adj", sphere, adjoint_representation(so3)), sections::tautological()},
      {"line/circle", bundles::trivial("line", circle, trivial_representation(so2)), norm2.field()},
      {"line/sphere", bundles::trivial("line", sphere, trivial_representation(so3)), pairing.field()},
  };
}

Outcome criterion1() {
  Outcome out;
  auto start = std::chrono::steady_clock::now();
  const SampleOptions opt{200, derive_seed(0, "acceptance/decomposition")};
  double worst = 0.0;
  for (const auto& c : geometric_cases()) {
    // decompose o reconstruct on the pair (mu_G, rho)
    auto mu = reconstruct_action(c.bundle, c.rho, opt);
    auto d = decompose_action(mu, true, opt);
    double r1 = std::max(compare_sections(*c.bundle, d.section, c.rho, opt),
                         compare_group_parts(*c.bundle, d.group_part, bundle_group_action(c.bundle), opt));
    // reconstruct o decompose on the action mu
    double r2 = compare_actions(reconstruct_from_parts(c.bundle, d.group_part, d.section), mu, opt);
    out.require(r1 <= 1e-8 && r2 <= 1e-8, c.name);
    worst = std::max({worst, r1, r2});
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(secs < 10.0, "runtime under 10 s");
  out.detail << "6 fixtures x 200 samples, max residual " << sci(worst) << ", " << sci(secs) << " s";
  return out;
}

Outcome criterion2() {
  Outcome out;
  const SampleOptions opt{200, derive_seed(0, "acceptance/action-law")};
  double worst = 0.0;
  for (const auto& c : geometric_cases()) {
    auto law = verify_action_law(reconstruct_action(c.bundle, c.rho, opt), opt);
    for (const auto& chk : law.checks) out.require(chk.residual <= 1e-8, c.name + "/" + chk.name);
    worst = std::max(worst, law.max_residual());
  }
  // Negative control: section keeping only the first algebra coordinate on the adjoint bundle.
  auto so3 = models::so3<Real>();
  auto bundle = bundles::trivial("adj", manifolds::sphere(so3), adjoint_representation(so3));
  SectionField broken = [](const RVec& a, const RVec&) {
    RVec v = RVec::Zero(a.size());
    v(0) = a(0);
    return v;
  };
  auto bad = verify_action_law(reconstruct_action_unchecked(bundle, broken), opt);
  double control = 0.0;
  for (const auto& chk : bad.checks)
    if (chk.name == "composition") control = chk.residual;
  out.require(control > 1e-3, "negative control residual above 1e-3");
  require_cli(out, "manifold-verify", "real");
  out.detail << "max law residual " << sci(worst) << ", negative control " << sci(control);
  return out;
}

// ---------------------------------------------------------------------------
// Algebraic criteria, templated on the field.

template <class S>
struct AlgebraicFixture {
  std::string name;
  RepPtr<S> base;
  std::vector<RepPtr<S>> reps;
  std::vector<SlicePair<S>> pairs;
};

template <class S>
std::vector<AlgebraicFixture<S>> algebraic_fixtures() {
  std::vector<AlgebraicFixture<S>> out;
  {
    auto m = models::so3<S>();
    auto adj = adjoint_representation(m), triv = trivial_representation(m);
    auto a2 = power(adj, 2);
    Mat<S> id = Mat<S>::Identity(3, 3);
    out.push_back({"so3", adj, {triv, adj, a2, direct_sum(adj, triv)},
                   {extremal_pairs(adj).initial, functor_sigma(adj, adj),
                    make_pair<S>(adj, a2, vstack<S>(id, Mat<S>(S(-2.5) * id))),
                    make_pair<S>(adj, direct_sum(adj, triv), vstack<S>(id, Mat<S>(Mat<S>::Zero(1, 3))))}});
  }
  {
    auto m = models::so2<S>();
    auto adj = adjoint_representation(m), triv = trivial_representation(m);
    auto rot1 = models::so2_weight(m, 1);
    auto v = direct_sum(rot1, triv);
    Mat<S> phi = Mat<S>::Zero(3, 1);
    phi(2, 0) = S(1.5);
    out.push_back({"so2", adj, {triv, rot1, v, power(triv, 2)},
                   {extremal_pairs(adj).initial, functor_sigma(rot1, adj), make_pair<S>(adj, v, phi),
                    make_pair<S>(adj, power(triv, 2), Mat<S>(Mat<S>::Ones(2, 1)))}});
  }
  {
    // The adjoint of a finite group is zero; the standard plane serves as a general base.
    auto m = models::cyclic<S>(4);
    auto std2 = standard_representation(m), triv = trivial_representation(m);
    auto v = direct_sum(std2, triv);
    Mat<S> j(2, 2);
    j << S(0), S(-1), S(1), S(0);
    out.push_back({"cyclic4", std2, {triv, std2, v, power(std2, 2)},
                   {extremal_pairs(std2).initial, functor_sigma(v, std2),
                    make_pair<S>(std2, v, vstack<S>(j, Mat<S>(Mat<S>::Zero(1, 2)))),
                    make_pair<S>(std2, power(std2, 2), vstack<S>(Mat<S>(Mat<S>::Identity(2, 2)), j))}});
  }
  return out;
}

template <class S>
Outcome criterion3() {
  Outcome out;
  int grid = 0;
  Rng rng(derive_seed(0, "acceptance/adjunction"));
  for (const auto& fx : algebraic_fixtures<S>())
    for (const auto& v : fx.reps)
      for (const auto& q : fx.pairs) {
        ++grid;
        auto fv = functor_F(v, fx.base);
        auto homs = hom_space(v, q.carrier);
        auto pairs = hom_pairs(fv, q);
        const std::string tag = fx.name + "/" + v->label() + "->" + q.carrier->label();
        out.require(!pairs.empty, tag + " nonempty");
        out.require(pairs.dimension() == homs.size(), tag + " dimensions");
        out.require(oracle::pair_hom_dim(fv, q) == static_cast<long>(oracle::hom_dim(v, q.carrier)),
                    tag + " oracle dimensions");
        double worst = 0.0;
        for (int s = 0; s < 5; ++s) {
          Mat<S> f = Mat<S>::Zero(q.carrier->dim(), v->dim());
          for (const auto& h : homs) f += random_scalar<S>(rng) * h.matrix;
          auto t = adjunction_transpose(Intertwiner<S>{f, v, q.carrier}, q);
          worst = std::max(worst, relative_diff(adjunction_transpose_inverse(t, v).matrix, f));
          if (pairs.empty) continue;
          SliceMorphism<S> psi{pairs.element(random_vector<S>(static_cast<Eigen::Index>(pairs.dimension()), rng)), fv,
                               q};
          auto back = adjunction_transpose(adjunction_transpose_inverse(psi, v), q);
          worst = std::max(worst, relative_diff(back.map, psi.map));
        }
        out.require(worst <= 1e-9, tag + " mutually inverse");
      }
  out.require(grid >= 12, "grid of at least 12");
  require_cli(out, "adjoint-check", field_name<S>());
  out.detail << "grid " << grid << " over so2, so3, cyclic4";
  return out;
}

template <class S>
Outcome criterion4() {
  Outcome out;
  Rng rng(derive_seed(0, "acceptance/monad"));
  double worst = 0.0;
  int carriers = 0;
  for (const auto& fx : algebraic_fixtures<S>())
    for (const auto& a : fx.reps) {
      ++carriers;
      const Eigen::Index dm = fx.base->dim(), da = a->dim();
      auto t = monad_apply(a, fx.base);
      // Unit-law solutions h: Ta -> a with h eta = 1, as a hom set of pairs under a.
      SlicePair<S> unit_src{a, t.ta, t.eta}, unit_dst{a, a, Mat<S>(Mat<S>::Identity(da, da))};
      auto sols = hom_pairs(unit_src, unit_dst);
      const std::size_t expect = hom_dimension(fx.base, a);
      const std::string tag = fx.name + "/" + a->label();
      out.require(!sols.empty, tag + " solvable");
      out.require(sols.dimension() == expect, tag + " dimension");
      out.require(oracle::pair_hom_dim(unit_src, unit_dst) == static_cast<long>(oracle::hom_dim(fx.base, a)),
                  tag + " oracle dimension");
      for (int s = 0; s < 50 && !sols.empty; ++s) {
        Mat<S> h = sols.element(random_vector<S>(static_cast<Eigen::Index>(sols.dimension()), rng));
        auto c = algebra_check(a, fx.base, h);
        out.require(c.unit_law, tag + " unit law");
        worst = std::max(worst, c.associativity_residual);
        auto p = from_algebra(MonadAlgebra<S>{fx.base, a, h});
        auto back = to_algebra(p);
        worst = std::max(worst, relative_diff(back.structure, h));
        (void)dm;
      }
    }
  for (const auto& fx : algebraic_fixtures<S>())
    for (const auto& p : fx.pairs) {
      auto r = comparison_roundtrip(p);
      out.require(r.carrier == p.carrier && relative_diff(r.phi, p.phi) == 0.0, "comparison round trip");
    }
  out.require(worst <= 1e-9, "associativity within 1e-9");
  require_cli(out, "monad-check", field_name<S>());
  out.detail << carriers << " carriers x 50 solutions, max residual " << sci(worst);
  return out;
}

template <class S>
Outcome criterion5() {
  Outcome out;
  Rng rng(derive_seed(0, "acceptance/section"));
  int forced = 0;
  for (const auto& fx : algebraic_fixtures<S>()) {
    for (const auto& v : fx.reps) out.require(functor_U(functor_sigma(v, fx.base)) == v, fx.name + " U sigma");
    // A section s of U sends the zero morphism V -> W to a morphism s(V) -> s(W),
    // which forces the structure map of s(W) to vanish.
    for (const auto& v : fx.reps)
      for (const auto& w : fx.reps) {
        auto homs = hom_space(fx.base, w);
        Mat<S> phi_w = Mat<S>::Zero(w->dim(), fx.base->dim());
        for (const auto& h : homs) phi_w += random_scalar<S>(rng) * h.matrix;
        SlicePair<S> sv = functor_sigma(v, fx.base);
        SlicePair<S> sw{fx.base, w, phi_w};
        Mat<S> zero = Mat<S>::Zero(w->dim(), v->dim());
        bool zero_is_morphism = slice_morphism_residual(zero, sv, sw) <= 1e-9;
        bool phi_is_zero = max_abs(phi_w) <= 1e-9;
        out.require(zero_is_morphism == phi_is_zero, fx.name + " zero-morphism argument");
        out.require(slice_morphism_residual(zero, sv, functor_sigma(w, fx.base)) == 0.0, fx.name + " sigma on 0");
        ++forced;
      }
  }
  require_cli(out, "adjoint-check", field_name<S>());
  out.detail << forced << " seeded structure maps checked";
  return out;
}

template <class S>
Outcome criterion6() {
  Outcome out;
  auto m = models::so3<S>();
  auto adj = adjoint_representation(m), triv = trivial_representation(m);
  auto basis = IrrepBasis<S>::make("so3", {triv, adj});
  Rng rng(derive_seed(0, "acceptance/k"));
  std::uniform_int_distribution<long long> coeff(-6, 6);
  int classes = 0;
  for (; classes < 24; ++classes) {
    KClass<S> c{basis, KGroup::representations, {coeff(rng), coeff(rng)}};
    out.require(k_of_U(k_of_sigma(c)) == c, "K(U) K(sigma)");
    auto pc = k_of_sigma(c);
    out.require(k_of_sigma(k_of_U(pc)) == pc, "K(sigma) K(U)");
  }
  double worst = 0.0;
  std::uniform_int_distribution<int> pick(0, 2);
  for (int s = 0; s < 20; ++s) {
    int a = 1 + pick(rng), t = pick(rng);
    std::vector<RepPtr<S>> parts(static_cast<std::size_t>(a), adj);
    for (int i = 0; i < t; ++i) parts.push_back(triv);
    auto v = direct_sum<S>(parts);
    Mat<S> phi = Mat<S>::Zero(v->dim(), 3);
    for (int i = 0; i < a; ++i) phi.block(3 * i, 0, 3, 3) = random_scalar<S>(rng) * Mat<S>::Identity(3, 3);
    auto p = make_pair<S>(adj, v, phi);
    auto w = witness_product_iso(p);
    worst = std::max({worst, slice_morphism_residual(w.forward.map, w.forward.source, w.forward.target),
                      slice_morphism_residual(w.backward.map, w.backward.source, w.backward.target)});
  }
  out.require(worst <= 1e-10, "witness within 1e-10");
  auto init = extremal_pairs(adj).initial;
  auto zero = functor_sigma(adj, adj);
  bool equal = k_class_of_pair(init, basis) == k_class_of_pair(zero, basis);
  bool iso = is_isomorphic(init, zero).isomorphic || is_isomorphic(zero, init).isomorphic;
  out.require(equal, "[(adj,id)] = [(adj,0)]");
  out.require(!iso, "(adj,id) and (adj,0) not isomorphic");
  require_cli(out, "kgroup", field_name<S>());
  out.detail << classes << " classes, 20 witnesses max residual " << sci(worst) << ", classes equal "
             << (equal ? "yes" : "no") << ", isomorphic " << (iso ? "yes" : "no");
  return out;
}

template <class S>
struct ClassifyFixture {
  RepPtr<S> adj;
  RepPtr<S> complement;  // a representation without adjoint constituents
};

template <class S>
std::vector<ClassifyFixture<S>> classify_fixtures() {
  std::vector<ClassifyFixture<S>> out;
  auto m = models::so3<S>();
  out.push_back({adjoint_representation(m), trivial_representation(m)});
  if constexpr (is_complex_v<S>) {
    auto su2 = models::su2();
    out.push_back({adjoint_representation(su2), direct_sum(standard_representation(su2), trivial_representation(su2))});
  }
  return out;
}

template <class S>
Outcome criterion7() {
  Outcome out;
  Rng rng(derive_seed(0, "acceptance/classification"));
  int cases = 0;
  double worst = 0.0;
  for (const auto& fx : classify_fixtures<S>())
    for (int n = 0; n <= 3; ++n)
      for (bool nonzero : {false, true}) {
        if (n == 0 && nonzero) continue;
        std::vector<RepPtr<S>> parts(static_cast<std::size_t>(n), fx.adj);
        parts.push_back(fx.complement);
        auto v = direct_sum<S>(parts);
        Mat<S> phi = Mat<S>::Zero(v->dim(), 3);
        if (nonzero)
          for (int i = 0; i < n; ++i) phi.block(3 * i, 0, 3, 3) = random_scalar<S>(rng) * Mat<S>::Identity(3, 3);
        auto p = make_pair<S>(fx.adj, v, phi);
        auto c = canonical_form(p);
        ++cases;
        const std::string tag = "n=" + std::to_string(n) + (nonzero ? " nonzero" : " zero");
        out.require(c.n == static_cast<std::size_t>(n), tag + " multiplicity");
        out.require(c.phi_nonzero == nonzero, tag + " dichotomy");
        out.require(c.complement->dim() == fx.complement->dim(), tag + " complement");
        double r = std::max(slice_morphism_residual(c.witness.map, p, c.normal),
                            slice_morphism_residual(c.witness_inverse.map, c.normal, p));
        Mat<S> prod = c.witness.map * c.witness_inverse.map;
        r = std::max(r, relative_diff(prod, Mat<S>(Mat<S>::Identity(prod.rows(), prod.cols()))));
        out.require(r <= 1e-9, tag + " witness");
        worst = std::max(worst, r);
        std::vector<S> scalars = {S(2), S(-0.5), S(3.7), S(-1e3)};
        if constexpr (is_complex_v<S>) scalars.push_back(S(0.0, 1.0));
        for (S k : scalars) {
          auto cs = canonical_form(make_pair<S>(fx.adj, v, Mat<S>(k * phi)));
          out.require(cs.n == c.n && cs.phi_nonzero == c.phi_nonzero &&
                          cs.complement->dim() == c.complement->dim(),
                      tag + " scaling");
        }
      }
  require_cli(out, "classify", field_name<S>());
  out.detail << cases << " seeded pairs, witness max residual " << sci(worst);
  return out;
}

Outcome criterion8() {
  Outcome out;
  auto so2 = models::so2<Real>();
  auto so3 = models::so3<Real>();
  Rng rng(derive_seed(0, "acceptance/induced"));
  double worst = 0.0;
  for (const auto& x_space : {manifolds::circle(so2), manifolds::sphere(so3)}) {
    for (int s = 0; s < 200; ++s) {
      RVec x = x_space->sample(rng);
      auto a = random_real_algebra_element(x_space->model, rng);
      RVec fd = induced_vector_field(*x_space, a, x, 1e-4);
      RVec closed = a.matrix() * x;
      worst = std::max(worst, max_abs(RVec(fd - closed)));
    }
  }
  out.require(worst <= 1e-6, "finite difference within 1e-6");
  require_cli(out, "manifold-verify", "real");
  out.detail << "h = 1e-4, 400 samples, max error " << sci(worst);
  return out;
}

Outcome criterion9() {
  Outcome out;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> parts = {
      {"3", criterion3<Complex>}, {"4", criterion4<Complex>}, {"5", criterion5<Complex>},
      {"6", criterion6<Complex>}, {"7", criterion7<Complex>}};
  for (const auto& [label, fn] : parts) {
    auto r = fn();
    out.require(r.ok, std::string("criterion ") + label + ": " + r.detail.str());
    out.detail << label << (r.ok ? " ok; " : " FAILED; ");
  }
  return out;
}

Outcome criterion10() {
  Outcome out;
  for (const char* field : {"real", "complex"}) {
    RunOptions opts;
    opts.field = field;
    opts.load.seed = 0;
    auto a = run_file("all", fixture("all.json"), opts);
    auto b = run_file("all", fixture("all.json"), opts);
    out.require(a.exit_code == exit_pass, std::string(field) + " run passes");
    std::string ja = a.report.to_json(false).dump(), jb = b.report.to_json(false).dump();
    out.require(ja == jb, std::string(field) + " reports identical");
    out.detail << field << ": " << a.report.checks.size() << " checks, " << ja.size() << " bytes identical; ";
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"decomposition bijection", criterion1},
      {"action law and negative control", criterion2},
      {"adjunction grid", criterion3<Real>},
      {"monad unit law and associativity", criterion4<Real>},
      {"unique section", criterion5<Real>},
      {"K-theory", criterion6<Real>},
      {"classification", criterion7<Real>},
      {"induced vector fields", criterion8},
      {"complex mode", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail << "exception: " << e.what();
    }
    std::printf("%s  criterion %zu (%s): %s\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                r.detail.str().c_str());
    if (!r.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
