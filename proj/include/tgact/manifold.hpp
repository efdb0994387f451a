#pragma once

// Affine actions of the tangent group on concrete bundles over embedded
// G-manifolds. Bundles are sub-bundles of trivial bundles X x V cut out by
// equivariant projector fields; everything is checked on seeded samples.
//
// In (alpha, g) coordinates an affine action reads
//   (alpha, g) . e_x = g . e_x + rho(alpha)_{g.x}.

#include "tgact/rep.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tgact {

using RVec = Vec<Real>;
using RMat = Mat<Real>;

struct EmbeddedGManifold {
  std::string name;
  ModelPtr<Real> model;
  Eigen::Index ambient = 0;
  std::function<double(const RVec&)> membership;    // residual, 0 on the manifold
  std::function<RVec(Rng&)> sample;
  std::function<RMat(const GroupElement<Real>&)> action;  // ambient linear action

  RVec act(const GroupElement<Real>& g, const RVec& x) const { return action(g) * x; }
};

using ManifoldPtr = std::shared_ptr<const EmbeddedGManifold>;

struct EquivariantBundle {
  std::string name;
  ManifoldPtr manifold;
  RepPtr<Real> fiber;
  std::function<RMat(const RVec&)> projector;  // idempotent, image = E_x

  Eigen::Index fiber_dim() const { return fiber->dim(); }
  RMat fiber_action(const GroupElement<Real>& g) const { return fiber->group_action(g); }
  RVec sample_fiber_vector(const RVec& x, Rng& rng) const {
    return projector(x) * random_real_vector(fiber_dim(), rng);
  }
};

using BundlePtr = std::shared_ptr<const EquivariantBundle>;

/// rho: g -> Gamma(E), evaluated as (alpha coordinates, x) -> fiber vector;
/// linear in alpha.
using SectionField = std::function<RVec(const RVec& alpha, const RVec& x)>;

/// mu((alpha, g), x, e) -> fiber vector over g.x.
struct AffineActionModel {
  BundlePtr bundle;
  std::function<RVec(const TangentElement<Real>&, const RVec&, const RVec&)> act;

  RVec operator()(const TangentElement<Real>& u, const RVec& x, const RVec& e) const {
    return act(u, x, e);
  }
};

using FiberGroupAction = std::function<RVec(const GroupElement<Real>&, const RVec& x, const RVec& e)>;

struct SampledCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct SampledReport {
  std::vector<SampledCheck> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }
  double max_residual() const {
    double r = 0.0;
    for (const auto& c : checks) r = std::max(r, c.residual);
    return r;
  }
};

struct SampleOptions {
  int samples = 200;
  std::uint64_t seed = 0;
};

namespace detail {
inline double vec_diff(const RVec& a, const RVec& b) {
  return relative_diff(a, b);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Bundled manifolds.

namespace manifolds {

inline ManifoldPtr sphere_like(std::string name, const ModelPtr<Real>& model, double radius) {
  const Eigen::Index n = model->ambient_size();
  auto m = std::make_shared<EmbeddedGManifold>();
  m->name = std::move(name);
  m->model = model;
  m->ambient = n;
  m->membership = [radius](const RVec& x) { return std::abs(x.norm() - radius); };
  m->sample = [n, radius](Rng& rng) {
    RVec v = random_real_vector(n, rng);
    return RVec(radius * v / v.norm());
  };
  m->action = [](const GroupElement<Real>& g) { return g.matrix; };
  return m;
}

/// Circle of the given radius under SO(2).
inline ManifoldPtr circle(const ModelPtr<Real>& so2, double radius = 1.0) {
  if (so2->ambient_size() != 2) throw InvariantError("circle needs a model acting on R^2");
  return sphere_like("circle", so2, radius);
}

/// Round sphere in R^3 under SO(3).
inline ManifoldPtr sphere(const ModelPtr<Real>& so3, double radius = 1.0) {
  if (so3->ambient_size() != 3) throw InvariantError("sphere needs a model acting on R^3");
  return sphere_like("sphere", so3, radius);
}

/// The one-point G-space (ambient dimension 0).
inline ManifoldPtr point(const ModelPtr<Real>& model) {
  auto m = std::make_shared<EmbeddedGManifold>();
  m->name = "point";
  m->model = model;
  m->ambient = 0;
  m->membership = [](const RVec& x) { return x.size() == 0 ? 0.0 : 1.0; };
  m->sample = [](Rng&) { return RVec(0); };
  m->action = [](const GroupElement<Real>&) { return RMat(0, 0); };
  return m;
}

/// G under left translation, embedded as vec(h) in R^{N^2}. A free G-space.
inline ManifoldPtr group_manifold(const ModelPtr<Real>& model) {
  const Eigen::Index n = model->ambient_size();
  auto m = std::make_shared<EmbeddedGManifold>();
  m->name = "group";
  m->model = model;
  m->ambient = n * n;
  m->membership = [n](const RVec& x) {
    RMat h = Eigen::Map<const RMat>(x.data(), n, n);
    return max_abs(RMat(h.transpose() * h - RMat::Identity(n, n))) + std::abs(h.determinant() - 1.0);
  };
  m->sample = [model](Rng& rng) {
    auto g = random_group_element(model, rng);
    return vectorize<Real>(g.matrix);
  };
  m->action = [n](const GroupElement<Real>& g) {
    return kron<Real>(RMat::Identity(n, n), g.matrix);
  };
  return m;
}

}  // namespace manifolds

// ---------------------------------------------------------------------------
// Bundled bundles and section fields.

namespace bundles {

/// X x V with the diagonal action.
inline BundlePtr trivial(std::string name, const ManifoldPtr& x, const RepPtr<Real>& fiber) {
  if (fiber->model() != x->model) throw InvariantError("bundle fiber and manifold over different models");
  if (!fiber->has_group_action())
    throw RefusedError("fiber '" + fiber->label() + "' has no group-level action");
  const Eigen::Index d = fiber->dim();
  auto b = std::make_shared<EquivariantBundle>();
  b->name = std::move(name);
  b->manifold = x;
  b->fiber = fiber;
  b->projector = [d](const RVec&) { return RMat(RMat::Identity(d, d)); };
  return b;
}

/// TX inside X x R^N for a round sphere or circle: P(x) = I - x x^T / |x|^2.
inline BundlePtr tangent(const ManifoldPtr& x) {
  auto fiber = standard_representation(x->model);
  auto b = std::make_shared<EquivariantBundle>();
  b->name = "T" + x->name;
  b->manifold = x;
  b->fiber = fiber;
  const Eigen::Index n = x->ambient;
  b->projector = [n](const RVec& p) {
    return RMat(RMat::Identity(n, n) - p * p.transpose() / p.squaredNorm());
  };
  return b;
}

inline BundlePtr product(const BundlePtr& a, const BundlePtr& b) {
  if (a->manifold != b->manifold) throw InvariantError("product of bundles over different manifolds");
  auto out = std::make_shared<EquivariantBundle>();
  out->name = a->name + "x" + b->name;
  out->manifold = a->manifold;
  out->fiber = direct_sum(a->fiber, b->fiber);
  out->projector = [a, b](const RVec& x) {
    return block_diagonal<Real>({a->projector(x), b->projector(x)});
  };
  return out;
}

}  // namespace bundles

namespace sections {

inline SectionField zero(Eigen::Index fiber_dim) {
  return [fiber_dim](const RVec&, const RVec&) { return RVec(RVec::Zero(fiber_dim)); };
}

/// rho(alpha)(x) = alpha on g_X.
inline SectionField tautological() {
  return [](const RVec& alpha, const RVec&) { return alpha; };
}

/// rho(alpha)(x) = A(alpha) x, the induced vector field of a linear action.
inline SectionField induced(const ModelPtr<Real>& model) {
  return [model](const RVec& alpha, const RVec& x) { return RVec(model->realize(alpha) * x); };
}

/// Constant section rho(alpha)(x) = phi alpha, from an equivariant phi: g -> V.
inline SectionField constant(const RMat& phi) {
  return [phi](const RVec& alpha, const RVec&) { return RVec(phi * alpha); };
}

inline SectionField product(const SectionField& a, const SectionField& b) {
  return [a, b](const RVec& alpha, const RVec& x) {
    RVec u = a(alpha, x), v = b(alpha, x);
    RVec out(u.size() + v.size());
    out << u, v;
    return out;
  };
}

/// One monomial coef * prod_j x_j^{exponents_j}.
struct PolynomialTerm {
  std::vector<int> exponents;
  RVec coef;
};

/// rho(alpha)(x) = sum_i alpha_i p_i(x), each p_i a vector-valued polynomial
/// in the ambient coordinates.
struct PolynomialSection {
  Eigen::Index fiber_dim = 0;
  std::vector<std::vector<PolynomialTerm>> per_basis;

  RVec evaluate_component(std::size_t i, const RVec& x) const {
    RVec out = RVec::Zero(fiber_dim);
    for (const auto& t : per_basis[i]) {
      double mono = 1.0;
      for (std::size_t j = 0; j < t.exponents.size(); ++j)
        mono *= std::pow(x(static_cast<Eigen::Index>(j)), t.exponents[j]);
      out += mono * t.coef;
    }
    return out;
  }

  SectionField field() const {
    auto self = *this;
    return [self](const RVec& alpha, const RVec& x) {
      RVec out = RVec::Zero(self.fiber_dim);
      for (std::size_t i = 0; i < self.per_basis.size(); ++i)
        out += alpha(static_cast<Eigen::Index>(i)) * self.evaluate_component(i, x);
      return out;
    };
  }
};

inline void validate_polynomial(const PolynomialSection& p, Eigen::Index algebra_dim,
                                Eigen::Index ambient, int max_degree = 4) {
  if (static_cast<Eigen::Index>(p.per_basis.size()) != algebra_dim)
    throw InvariantError("polynomial section needs one table per algebra basis element");
  for (const auto& terms : p.per_basis)
    for (const auto& t : terms) {
      if (static_cast<Eigen::Index>(t.exponents.size()) != ambient)
        throw InvariantError("polynomial term has the wrong number of exponents");
      int deg = 0;
      for (int e : t.exponents) {
        if (e < 0) throw InvariantError("negative exponent in polynomial section");
        deg += e;
      }
      if (deg > max_degree) throw InvariantError("polynomial section exceeds degree 4");
      if (t.coef.size() != p.fiber_dim)
        throw InvariantError("polynomial coefficient has the wrong fiber dimension");
    }
}

}  // namespace sections

// ---------------------------------------------------------------------------
// Checks.

/// Idempotence of P and P(g.x) = rho(g) P(x) rho(g)^-1 on samples.
inline SampledReport verify_bundle(const EquivariantBundle& b, const SampleOptions& opt = {},
                                   const Tolerances& tol = default_tolerances()) {
  Rng rng(opt.seed);
  SampledCheck member{"membership", 0.0, tol.sample}, idem{"projector_idempotent", 0.0, tol.sample},
      equiv{"projector_equivariant", 0.0, tol.sample}, preserve{"action_preserves_manifold", 0.0, tol.sample};
  const auto& x_space = *b.manifold;
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    auto g = random_group_element(x_space.model, rng);
    RMat p = b.projector(x);
    RVec gx = x_space.act(g, x);
    RMat rg = b.fiber_action(g);
    member.residual = std::max(member.residual, x_space.membership(x));
    preserve.residual = std::max(preserve.residual, x_space.membership(gx));
    idem.residual = std::max(idem.residual, relative_diff(RMat(p * p), p));
    equiv.residual = std::max(equiv.residual,
                              relative_diff(b.projector(gx), RMat(rg * p * rg.inverse())));
  }
  return {{member, preserve, idem, equiv}};
}

/// rho(Ad_g alpha)(x) = g . rho(alpha)(g^-1 x), rho(alpha)(x) in E_x, and
/// linearity in alpha.
inline SampledReport verify_section_equivariance(const EquivariantBundle& b, const SectionField& rho,
                                                 const SampleOptions& opt = {},
                                                 const Tolerances& tol = default_tolerances()) {
  Rng rng(opt.seed);
  const auto& x_space = *b.manifold;
  const auto& model = x_space.model;
  SampledCheck equiv{"section_equivariance", 0.0, tol.sample},
      fiber{"section_in_fiber", 0.0, tol.sample}, linear{"section_linearity", 0.0, tol.sample};
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    auto g = random_group_element(model, rng);
    auto a = random_real_algebra_element(model, rng);
    auto c = random_real_algebra_element(model, rng);
    double lambda = random_scalar<Real>(rng);
    RVec ad = adjoint_group(g, a, tol).coords;
    RVec lhs = rho(ad, x);
    RVec rhs = b.fiber_action(g) * rho(a.coords, x_space.act(g.inverse(), x));
    equiv.residual = std::max(equiv.residual, detail::vec_diff(lhs, rhs));
    RVec v = rho(a.coords, x);
    fiber.residual = std::max(fiber.residual, detail::vec_diff(RVec(b.projector(x) * v), v));
    RVec comb = rho(RVec(lambda * a.coords + c.coords), x);
    linear.residual =
        std::max(linear.residual, detail::vec_diff(comb, RVec(lambda * v + rho(c.coords, x))));
  }
  return {{equiv, fiber, linear}};
}

/// mu from an arbitrary G-action on fibers and a section field.
inline AffineActionModel reconstruct_from_parts(const BundlePtr& b, FiberGroupAction group_part,
                                                SectionField rho) {
  AffineActionModel mu;
  mu.bundle = b;
  mu.act = [b, group_part = std::move(group_part), rho = std::move(rho)](
               const TangentElement<Real>& u, const RVec& x, const RVec& e) {
    RVec gx = b->manifold->act(u.group, x);
    return RVec(group_part(u.group, x, e) + b->projector(gx) * rho(u.algebra.coords, gx));
  };
  return mu;
}

inline FiberGroupAction bundle_group_action(const BundlePtr& b) {
  return [b](const GroupElement<Real>& g, const RVec&, const RVec& e) {
    return RVec(b->fiber_action(g) * e);
  };
}

/// Reconstruction without the equivariance pre-check (negative controls).
inline AffineActionModel reconstruct_action_unchecked(const BundlePtr& b, SectionField rho) {
  return reconstruct_from_parts(b, bundle_group_action(b), std::move(rho));
}

inline AffineActionModel reconstruct_action(const BundlePtr& b, SectionField rho,
                                            const SampleOptions& opt = {},
                                            const Tolerances& tol = default_tolerances()) {
  auto rep = verify_section_equivariance(*b, rho, opt, tol);
  if (!rep.passed())
    throw InvariantError("section field on '" + b->name + "' is not equivariant (residual " +
                         std::to_string(rep.max_residual()) + ")");
  return reconstruct_action_unchecked(b, std::move(rho));
}

/// Composition, identity, joint fiberwise linearity, affine-linearity and
/// covering on samples.
inline SampledReport verify_action_law(const AffineActionModel& mu, const SampleOptions& opt = {},
                                       const Tolerances& tol = default_tolerances()) {
  Rng rng(opt.seed);
  const auto& b = *mu.bundle;
  const auto& x_space = *b.manifold;
  const auto& model = x_space.model;
  SampledCheck comp{"composition", 0.0, tol.sample}, ident{"identity", 0.0, tol.sample},
      linear{"fiberwise_linearity", 0.0, tol.sample}, affine{"affine_linearity", 0.0, tol.sample},
      cover{"covering", 0.0, tol.sample};
  auto id = TangentElement<Real>::identity(model);
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    RVec e = b.sample_fiber_vector(x, rng);
    RVec e2 = b.sample_fiber_vector(x, rng);
    auto u = random_tangent_element(model, rng);
    auto w = random_tangent_element(model, rng);
    auto other = random_algebra_element(model, rng);
    double lambda = random_scalar<Real>(rng);

    RVec wx = x_space.act(w.group, x);
    RVec lhs = mu(tangent_multiply(u, w, tol), x, e);
    RVec rhs = mu(u, wx, mu(w, x, e));
    comp.residual = std::max(comp.residual, detail::vec_diff(lhs, rhs));

    ident.residual = std::max(ident.residual, detail::vec_diff(mu(id, x, e), e));

    TangentElement<Real> mixed{u.algebra * lambda + other, u.group};
    TangentElement<Real> just_other{other, u.group};
    RVec joint = mu(mixed, x, RVec(lambda * e + e2));
    RVec split = lambda * mu(u, x, e) + mu(just_other, x, e2);
    linear.residual = std::max(linear.residual, detail::vec_diff(joint, split));

    TangentElement<Real> bare{AlgebraElement<Real>::zero(model), u.group};
    RVec d1 = mu(u, x, e) - mu(bare, x, e);
    RVec d2 = mu(u, x, e2) - mu(bare, x, e2);
    affine.residual = std::max(affine.residual, detail::vec_diff(d1, d2));

    RVec ux = x_space.act(u.group, x);
    RVec out = mu(u, x, e);
    cover.residual = std::max({cover.residual, x_space.membership(ux),
                               detail::vec_diff(RVec(b.projector(ux) * out), out)});
  }
  return {{comp, ident, linear, affine, cover}};
}

struct DecomposedAction {
  FiberGroupAction group_part;  // mu((0, g), x, e)
  SectionField section;         // x -> mu((alpha, e), x, 0)
};

/// mu_G(g, e_x) = mu(0_g, e_x),  rho(alpha)_x = mu(alpha, 0_x).
inline DecomposedAction decompose_action(const AffineActionModel& mu, bool check = true,
                                         const SampleOptions& opt = {},
                                         const Tolerances& tol = default_tolerances()) {
  if (check) {
    auto rep = verify_action_law(mu, opt, tol);
    if (!rep.passed())
      throw InvariantError("decompose_action: not an affine action (residual " +
                           std::to_string(rep.max_residual()) + ")");
  }
  const auto& model = mu.bundle->manifold->model;
  const Eigen::Index d = mu.bundle->fiber_dim();
  DecomposedAction out;
  out.group_part = [mu, model](const GroupElement<Real>& g, const RVec& x, const RVec& e) {
    return mu(TangentElement<Real>{AlgebraElement<Real>::zero(model), g}, x, e);
  };
  out.section = [mu, model, d](const RVec& alpha, const RVec& x) {
    return mu(TangentElement<Real>{AlgebraElement<Real>{model, alpha}, GroupElement<Real>::identity(model)},
              x, RVec(RVec::Zero(d)));
  };
  return out;
}

inline double compare_actions(const AffineActionModel& a, const AffineActionModel& b,
                              const SampleOptions& opt = {}) {
  Rng rng(opt.seed);
  const auto& x_space = *a.bundle->manifold;
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    RVec e = a.bundle->sample_fiber_vector(x, rng);
    auto u = random_tangent_element(x_space.model, rng);
    worst = std::max(worst, detail::vec_diff(a(u, x, e), b(u, x, e)));
  }
  return worst;
}

inline double compare_sections(const EquivariantBundle& b, const SectionField& r1,
                               const SectionField& r2, const SampleOptions& opt = {}) {
  Rng rng(opt.seed);
  const auto& x_space = *b.manifold;
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    RVec a = random_real_vector(x_space.model->dimension(), rng);
    worst = std::max(worst, detail::vec_diff(r1(a, x), r2(a, x)));
  }
  return worst;
}

inline double compare_group_parts(const EquivariantBundle& b, const FiberGroupAction& g1,
                                  const FiberGroupAction& g2, const SampleOptions& opt = {}) {
  Rng rng(opt.seed);
  const auto& x_space = *b.manifold;
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    RVec e = b.sample_fiber_vector(x, rng);
    auto g = random_group_element(x_space.model, rng);
    worst = std::max(worst, detail::vec_diff(g1(g, x, e), g2(g, x, e)));
  }
  return worst;
}

/// alpha#_x = d/dt exp(t alpha) . x at t = 0, by central differences.
inline RVec induced_vector_field(const EmbeddedGManifold& x_space, const AlgebraElement<Real>& alpha,
                                 const RVec& x, double step) {
  RVec plus = x_space.act(exp_curve(alpha, step), x);
  RVec minus = x_space.act(exp_curve(alpha, -step), x);
  return (plus - minus) / (2.0 * step);
}

// ---------------------------------------------------------------------------
// Pullback along an equivariant map f: X -> Y.

using PointMap = std::function<RVec(const RVec&)>;

struct PulledBack {
  BundlePtr bundle;
  SectionField section;
};

inline double map_equivariance_residual(const PointMap& f, const EmbeddedGManifold& x_space,
                                        const EmbeddedGManifold& y_space,
                                        const SampleOptions& opt = {}) {
  Rng rng(opt.seed);
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    RVec x = x_space.sample(rng);
    auto g = random_group_element(x_space.model, rng);
    worst = std::max({worst, detail::vec_diff(f(x_space.act(g, x)), y_space.act(g, f(x))),
                      y_space.membership(f(x))});
  }
  return worst;
}

/// f^*E with fiber unchanged, projector P o f, section rho_Y(alpha)(f(x)).
inline PulledBack pullback_pair(const PointMap& f, const ManifoldPtr& x_space, const BundlePtr& over_y,
                                const SectionField& rho_y, const SampleOptions& opt = {},
                                const Tolerances& tol = default_tolerances()) {
  if (x_space->model != over_y->manifold->model)
    throw InvariantError("pullback between spaces of different groups");
  double r = map_equivariance_residual(f, *x_space, *over_y->manifold, opt);
  if (r > tol.sample)
    throw InvariantError("pullback map is not equivariant (residual " + std::to_string(r) + ")");
  auto b = std::make_shared<EquivariantBundle>();
  b->name = over_y->name + "^*";
  b->manifold = x_space;
  b->fiber = over_y->fiber;
  auto proj = over_y->projector;
  b->projector = [proj, f](const RVec& x) { return proj(f(x)); };
  return {b, [rho_y, f](const RVec& alpha, const RVec& x) { return rho_y(alpha, f(x)); }};
}

}  // namespace tgact
