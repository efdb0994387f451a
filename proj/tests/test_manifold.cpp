#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace tgact;

namespace {

struct Fixture {
  ModelPtr<Real> so2 = models::so2<Real>();
  ModelPtr<Real> so3 = models::so3<Real>();
  ManifoldPtr circle = manifolds::circle(so2);
  ManifoldPtr sphere = manifolds::sphere(so3);
  RepPtr<Real> adj3 = adjoint_representation(so3);
  RepPtr<Real> std3 = standard_representation(so3);
  RepPtr<Real> line3 = trivial_representation(so3);
  RepPtr<Real> line2 = trivial_representation(so2);

  BundlePtr sphere_adj = bundles::trivial("adj", sphere, adj3);
  BundlePtr sphere_std = bundles::trivial("std", sphere, std3);
  BundlePtr sphere_line = bundles::trivial("line", sphere, line3);
  BundlePtr circle_line = bundles::trivial("line", circle, line2);
  BundlePtr circle_tangent = bundles::tangent(circle);
  BundlePtr sphere_tangent = bundles::tangent(sphere);

  /// rho(alpha)(x) = <x, alpha> on the sphere, from the invariant function x -> <x, .>.
  SectionField sphere_pairing() const {
    sections::PolynomialSection p;
    p.fiber_dim = 1;
    for (int i = 0; i < 3; ++i) {
      std::vector<int> ex(3, 0);
      ex[static_cast<std::size_t>(i)] = 1;
      p.per_basis.push_back({{ex, RVec::Ones(1)}});
    }
    sections::validate_polynomial(p, 3, 3);
    return p.field();
  }
};

/// Non-equivariant section for negative controls: only the first algebra coordinate survives.
SectionField broken_section() {
  return [](const RVec& alpha, const RVec&) {
    RVec out = RVec::Zero(alpha.size());
    out(0) = alpha(0);
    return out;
  };
}

}  // namespace

TEST(Manifold, FixturesSatisfyMembershipAndBundleChecks) {
  Fixture f;
  for (const auto& b : {f.sphere_adj, f.sphere_std, f.sphere_line, f.circle_line, f.circle_tangent, f.sphere_tangent,
                        bundles::product(f.sphere_adj, f.sphere_line)}) {
    auto r = verify_bundle(*b);
    EXPECT_TRUE(r.passed()) << b->name << " " << r.max_residual();
  }
  auto g = manifolds::group_manifold(f.so3);
  Rng rng(51);
  for (int s = 0; s < 20; ++s) {
    RVec x = g->sample(rng);
    EXPECT_LE(g->membership(x), 1e-10);
    auto h = random_group_element(f.so3, rng);
    EXPECT_LE(g->membership(g->act(h, x)), 1e-10);
  }
  auto pt = manifolds::point(f.so3);
  EXPECT_EQ(pt->sample(rng).size(), 0);
}

TEST(Manifold, BrokenProjectorFailsBundleCheck) {
  Fixture f;
  auto b = std::make_shared<EquivariantBundle>(*f.sphere_std);
  b->projector = [](const RVec&) {
    RMat p = RMat::Zero(3, 3);
    p(0, 0) = 1.0;  // a fixed line: idempotent but not equivariant
    return p;
  };
  auto r = verify_bundle(*b);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.max_residual(), 1e-3);
}

TEST(Manifold, SigmaTypeActionIsTheBundleAction) {
  Fixture f;
  auto mu = reconstruct_action(f.sphere_std, sections::zero(3));
  Rng rng(52);
  for (int s = 0; s < 50; ++s) {
    RVec x = f.sphere->sample(rng), e = random_real_vector(3, rng);
    auto u = random_tangent_element(f.so3, rng);
    EXPECT_LE(relative_diff(mu(u, x, e), RVec(u.group.matrix * e)), 1e-14);
  }
}

TEST(Manifold, AdjointBundleActionFormula) {
  Fixture f;
  auto mu = reconstruct_action(f.sphere_adj, sections::tautological());
  Rng rng(53);
  for (int s = 0; s < 50; ++s) {
    RVec x = f.sphere->sample(rng), beta = random_real_vector(3, rng);
    auto u = random_tangent_element(f.so3, rng);
    RVec expect = oracle::conjugate(f.so3, u.group.matrix, beta) + u.algebra.coords;
    EXPECT_LE(relative_diff(mu(u, x, beta), expect), 1e-10);
  }
}

TEST(Manifold, LineBundleFromInvariantFunction) {
  Fixture f;
  auto rho = f.sphere_pairing();
  auto mu = reconstruct_action(f.sphere_line, rho);
  Rng rng(54);
  for (int s = 0; s < 50; ++s) {
    RVec x = f.sphere->sample(rng), lam = random_real_vector(1, rng);
    auto u = random_tangent_element(f.so3, rng);
    RVec gx = u.group.matrix * x;
    EXPECT_NEAR(mu(u, x, lam)(0), lam(0) + gx.dot(u.algebra.coords), 1e-12);
  }
  auto decomposed = decompose_action(mu);
  EXPECT_LE(compare_sections(*f.sphere_line, decomposed.section, rho), 1e-12);
}

TEST(Manifold, DecompositionIsABijection) {
  Fixture f;
  struct Case {
    BundlePtr b;
    SectionField rho;
  };
  std::vector<Case> cases = {{f.sphere_std, sections::zero(3)},
                             {f.sphere_adj, sections::tautological()},
                             {f.sphere_line, f.sphere_pairing()},
                             {f.circle_tangent, sections::induced(f.so2)},
                             {f.sphere_tangent, sections::induced(f.so3)}};
  SampleOptions opt{100, 7};
  for (const auto& c : cases) {
    auto mu = reconstruct_action(c.b, c.rho, opt);
    auto d = decompose_action(mu, true, opt);
    EXPECT_LE(compare_sections(*c.b, d.section, c.rho, opt), 1e-8) << c.b->name;
    EXPECT_LE(compare_group_parts(*c.b, d.group_part, bundle_group_action(c.b), opt), 1e-8) << c.b->name;
    auto again = reconstruct_from_parts(c.b, d.group_part, d.section);
    EXPECT_LE(compare_actions(mu, again, opt), 1e-8) << c.b->name;
  }
  // Recovered sections of the sigma-type and adjoint actions, by direct evaluation.
  auto d0 = decompose_action(reconstruct_action(f.sphere_std, sections::zero(3)));
  auto d1 = decompose_action(reconstruct_action(f.sphere_adj, sections::tautological()));
  Rng rng(55);
  for (int s = 0; s < 20; ++s) {
    RVec x = f.sphere->sample(rng), a = random_real_vector(3, rng);
    EXPECT_LE(max_abs(d0.section(a, x)), 0.0);
    EXPECT_LE(relative_diff(d1.section(a, x), a), 1e-14);
  }
}

TEST(Manifold, ActionLawsHoldOnReconstructedActions) {
  Fixture f;
  std::vector<std::pair<BundlePtr, SectionField>> cases = {
      {f.sphere_std, sections::zero(3)},
      {f.sphere_adj, sections::tautological()},
      {f.sphere_line, f.sphere_pairing()},
      {f.circle_tangent, sections::induced(f.so2)},
      {f.circle_line, sections::constant(RMat::Constant(1, 1, 2.0))},
      {bundles::product(f.sphere_adj, f.sphere_line), sections::product(sections::tautological(), f.sphere_pairing())}};
  for (const auto& [b, rho] : cases) {
    auto r = verify_action_law(reconstruct_action(b, rho));
    for (const auto& c : r.checks) EXPECT_LE(c.residual, 1e-8) << b->name << " " << c.name;
  }
}

TEST(Manifold, TangentCircleCompositionAgainstFiniteDifferenceOracle) {
  Fixture f;
  auto mu = reconstruct_action(f.circle_tangent, sections::induced(f.so2));
  auto law = verify_action_law(mu, {200, 0});
  EXPECT_LE(law.max_residual(), 1e-8);
  Rng rng(56);
  for (int s = 0; s < 200; ++s) {
    RVec x = f.circle->sample(rng);
    RVec v = f.circle_tangent->sample_fiber_vector(x, rng);
    auto g = random_group_element(f.so2, rng);
    // The group part of mu is the derivative of the group action, computed here by differences.
    RVec push = oracle::tangent_push(g.matrix, x, v, 1e-4);
    TangentElement<Real> u{AlgebraElement<Real>::zero(f.so2), g};
    ASSERT_LE(relative_diff(mu(u, x, v), push), 1e-6);
    // and the section part is the orbit derivative.
    RVec a = random_real_vector(1, rng);
    TangentElement<Real> w{AlgebraElement<Real>{f.so2, a}, GroupElement<Real>::identity(f.so2)};
    RVec fd = oracle::fd_orbit_derivative(f.so2->realize(a), x, 1e-4);
    ASSERT_LE(relative_diff(mu(w, x, RVec(RVec::Zero(2))), fd), 1e-6);
  }
}

TEST(Manifold, NegativeControlsFail) {
  Fixture f;
  auto broken = broken_section();
  auto eq = verify_section_equivariance(*f.sphere_adj, broken);
  EXPECT_GT(eq.max_residual(), 1e-3);
  EXPECT_THROW(reconstruct_action(f.sphere_adj, broken), InvariantError);
  auto mu = reconstruct_action_unchecked(f.sphere_adj, broken);
  auto law = verify_action_law(mu);
  EXPECT_GT(law.max_residual(), 1e-3);
  EXPECT_THROW(decompose_action(mu), InvariantError);

  // A tangent-bundle section that is not tangent fails the fiber check.
  SectionField radial = [](const RVec& alpha, const RVec& x) { return RVec(alpha(0) * x); };
  EXPECT_FALSE(verify_section_equivariance(*f.circle_tangent, radial).passed());
}

TEST(Manifold, SectionEquivarianceIdentity) {
  Fixture f;
  auto rho = sections::induced(f.so3);
  Rng rng(57);
  for (int s = 0; s < 50; ++s) {
    RVec x = f.sphere->sample(rng);
    auto g = random_group_element(f.so3, rng);
    auto a = random_algebra_element(f.so3, rng);
    RVec lhs = rho(adjoint_group(g, a).coords, x);
    RVec rhs = g.matrix * rho(a.coords, RVec(g.matrix.transpose() * x));
    EXPECT_LE(relative_diff(lhs, rhs), 1e-10);
  }
}

TEST(Manifold, ProductActionIsDiagonal) {
  Fixture f;
  auto ba = f.sphere_adj, bl = f.sphere_line;
  auto rho_a = sections::tautological(), rho_l = f.sphere_pairing();
  auto prod = reconstruct_action(bundles::product(ba, bl), sections::product(rho_a, rho_l));
  auto mua = reconstruct_action(ba, rho_a), mul = reconstruct_action(bl, rho_l);
  Rng rng(58);
  for (int s = 0; s < 50; ++s) {
    RVec x = f.sphere->sample(rng);
    RVec e = random_real_vector(4, rng);
    auto u = random_tangent_element(f.so3, rng);
    RVec out = prod(u, x, e);
    EXPECT_LE(relative_diff(RVec(out.head(3)), mua(u, x, RVec(e.head(3)))), 1e-12);
    EXPECT_LE(relative_diff(RVec(out.tail(1)), mul(u, x, RVec(e.tail(1)))), 1e-12);
  }
}

TEST(Manifold, InducedVectorFieldExamples) {
  Fixture f;
  Rng rng(59);
  RVec x = f.sphere->sample(rng);
  EXPECT_LE(max_abs(induced_vector_field(*f.sphere, AlgebraElement<Real>::zero(f.so3), x, 1e-4)), 0.0);

  RVec p(2);
  p << 1.0, 0.0;
  RVec v = induced_vector_field(*f.circle, AlgebraElement<Real>::basis_vector(f.so2, 0), p, 1e-4);
  // Closed form: derivative of (cos t, sin t) at t = 0; central difference error is sin(h)/h - 1.
  EXPECT_NEAR(v(0), 0.0, 1e-15);
  EXPECT_NEAR(v(1), 1.0, 2e-9);
  EXPECT_NEAR(v(1), std::sin(1e-4) / 1e-4, 1e-11);

  for (int s = 0; s < 100; ++s) {
    RVec y = f.sphere->sample(rng);
    auto a = random_real_algebra_element(f.so3, rng);
    RVec fd = induced_vector_field(*f.sphere, a, y, 1e-4);
    RVec closed = a.matrix() * y;
    EXPECT_LE(max_abs(RVec(fd - closed)), 1e-6);
    EXPECT_LE(max_abs(RVec(fd - oracle::fd_orbit_derivative(a.matrix(), y, 1e-4))), 1e-8);
    EXPECT_LE(max_abs(RVec(f.sphere_tangent->projector(y) * fd - fd)), 1e-6);
  }
}

TEST(Manifold, InducedVectorFieldOnGroup) {
  Fixture f;
  auto g = manifolds::group_manifold(f.so3);
  Rng rng(60);
  for (int s = 0; s < 20; ++s) {
    RVec x = g->sample(rng);
    auto a = random_real_algebra_element(f.so3, rng);
    RVec fd = induced_vector_field(*g, a, x, 1e-4);
    RVec closed = g->action(GroupElement<Real>{f.so3, a.matrix()}) * x;  // left translation is linear in g
    EXPECT_LE(max_abs(RVec(fd - closed)), 1e-6);
  }
}

TEST(Manifold, PullbackExamples) {
  Fixture f;
  // Identity map: pair unchanged.
  PointMap id = [](const RVec& x) { return x; };
  auto rho = sections::induced(f.so2);
  auto same = pullback_pair(id, f.circle, f.circle_tangent, rho);
  EXPECT_LE(compare_sections(*f.circle_tangent, same.section, rho), 0.0);
  EXPECT_LE(compare_actions(reconstruct_action(same.bundle, same.section),
                            reconstruct_action(f.circle_tangent, rho)),
            1e-14);

  // A fixed central element: the section composes with the rotation.
  const double th = 0.7;
  RMat c = oracle::rotation2(th);
  PointMap rot = [c](const RVec& x) { return RVec(c * x); };
  auto pulled = pullback_pair(rot, f.circle, f.circle_tangent, rho);
  Rng rng(61);
  for (int s = 0; s < 30; ++s) {
    RVec x = f.circle->sample(rng), a = random_real_vector(1, rng);
    EXPECT_LE(relative_diff(pulled.section(a, x), rho(a, RVec(c * x))), 0.0);
  }
  auto mu = reconstruct_action(pulled.bundle, pulled.section);
  EXPECT_LE(verify_action_law(mu).max_residual(), 1e-8);
  // Remark formula: v_g . (x, e) = (g x, v_g . e) read in the fiber over f(g x).
  auto muy = reconstruct_action(f.circle_tangent, rho);
  for (int s = 0; s < 30; ++s) {
    RVec x = f.circle->sample(rng);
    RVec e = pulled.bundle->sample_fiber_vector(x, rng);
    auto u = random_tangent_element(f.so2, rng);
    EXPECT_LE(relative_diff(mu(u, x, e), muy(u, RVec(c * x), e)), 1e-12);
  }

  // Collapse to a point: a constant G-module extends to the constant pair over the sphere.
  auto pt = manifolds::point(f.so3);
  auto over_pt = bundles::trivial("adj", pt, f.adj3);
  PointMap collapse = [](const RVec&) { return RVec(0); };
  auto taut = sections::tautological();
  auto constant = pullback_pair(collapse, f.sphere, over_pt, taut);
  EXPECT_LE(compare_sections(*f.sphere_adj, constant.section, taut), 0.0);
  EXPECT_LE(compare_actions(reconstruct_action(constant.bundle, constant.section),
                            reconstruct_action(f.sphere_adj, taut)),
            1e-14);

  // Non-equivariant maps are rejected.
  PointMap flip = [](const RVec& x) {
    RVec y = x;
    y(0) = -y(0);
    return y;
  };
  EXPECT_THROW(pullback_pair(flip, f.circle, f.circle_tangent, rho), InvariantError);
  EXPECT_THROW(pullback_pair(id, f.sphere, f.circle_tangent, rho), InvariantError);
}

TEST(Manifold, PolynomialValidation) {
  sections::PolynomialSection p;
  p.fiber_dim = 1;
  p.per_basis = {{{{5, 0, 0}, RVec::Ones(1)}}, {}, {}};
  EXPECT_THROW(sections::validate_polynomial(p, 3, 3), InvariantError);
  p.per_basis = {{{{1, 0}, RVec::Ones(1)}}, {}, {}};
  EXPECT_THROW(sections::validate_polynomial(p, 3, 3), InvariantError);
  p.per_basis = {{}, {}};
  EXPECT_THROW(sections::validate_polynomial(p, 3, 3), InvariantError);
  p.per_basis = {{{{0, -1, 0}, RVec::Ones(1)}}, {}, {}};
  EXPECT_THROW(sections::validate_polynomial(p, 3, 3), InvariantError);
  p.per_basis = {{{{2, 1, 1}, RVec::Ones(2)}}, {}, {}};
  EXPECT_THROW(sections::validate_polynomial(p, 3, 3), InvariantError);
  p.per_basis = {{{{2, 1, 1}, RVec::Ones(1)}}, {}, {}};
  EXPECT_NO_THROW(sections::validate_polynomial(p, 3, 3));
}
