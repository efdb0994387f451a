#pragma once

// The slice category m\Rep(H): objects are pairs (V, phi: m -> V) with phi
// equivariant, morphisms are intertwiners psi: V -> V' with psi phi = phi'.
// Over a point (m = adjoint) or a homogeneous space G/H (m = adjoint
// restricted to H) these pairs are exactly the affine actions of the
// tangent group.

#include "tgact/rep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tgact {

template <class S>
struct SlicePair {
  RepPtr<S> base;     // m
  RepPtr<S> carrier;  // V
  Mat<S> phi;         // dim V x dim m

  Intertwiner<S> structure_map() const { return {phi, base, carrier}; }
};

template <class S>
struct SliceMorphism {
  Mat<S> map;  // target.carrier.dim x source.carrier.dim
  SlicePair<S> source;
  SlicePair<S> target;
};

namespace detail {

template <class S>
bool same_representation(const RepPtr<S>& a, const RepPtr<S>& b) {
  if (a == b) return true;
  if (a->model() != b->model() || a->dim() != b->dim()) return false;
  for (std::size_t i = 0; i < a->actions().size(); ++i)
    if (relative_diff(a->action(i), b->action(i)) > 1e-12) return false;
  return true;
}

template <class S>
void require_same_base(const SlicePair<S>& p, const SlicePair<S>& q, const char* what) {
  if (!same_representation(p.base, q.base))
    throw InvariantError(std::string(what) + ": pairs have different base objects");
}

}  // namespace detail

template <class S>
SlicePair<S> make_pair(RepPtr<S> base, RepPtr<S> carrier, Mat<S> phi,
                       const Tolerances& tol = default_tolerances()) {
  auto f = make_intertwiner(base, carrier, std::move(phi), tol);
  return {std::move(base), std::move(carrier), std::move(f.matrix)};
}

template <class S>
double slice_morphism_residual(const Mat<S>& psi, const SlicePair<S>& p, const SlicePair<S>& q) {
  double r = intertwining_residual(*p.carrier, *q.carrier, psi);
  if (!std::isfinite(r)) return r;
  return std::max(r, relative_diff(Mat<S>(psi * p.phi), q.phi));
}

template <class S>
SliceMorphism<S> make_slice_morphism(Mat<S> psi, SlicePair<S> p, SlicePair<S> q,
                                     const Tolerances& tol = default_tolerances()) {
  detail::require_same_base(p, q, "slice morphism");
  double r = slice_morphism_residual(psi, p, q);
  if (r > tol.matrix)
    throw InvariantError("not a morphism of pairs (residual " + std::to_string(r) + ")");
  return {std::move(psi), std::move(p), std::move(q)};
}

template <class S>
SliceMorphism<S> compose(const SliceMorphism<S>& outer, const SliceMorphism<S>& inner,
                         const Tolerances& tol = default_tolerances()) {
  return make_slice_morphism<S>(Mat<S>(outer.map * inner.map), inner.source, outer.target, tol);
}

template <class S>
SliceMorphism<S> identity_morphism(const SlicePair<S>& p) {
  return {Mat<S>::Identity(p.carrier->dim(), p.carrier->dim()), p, p};
}

// ---------------------------------------------------------------------------
// Products, initial and terminal objects.

template <class S>
struct PairProduct {
  SlicePair<S> product;
  SliceMorphism<S> project_first;
  SliceMorphism<S> project_second;
};

/// (V + V', (phi, phi')) with its canonical projections.
template <class S>
PairProduct<S> pair_product(const SlicePair<S>& p, const SlicePair<S>& q) {
  detail::require_same_base(p, q, "pair_product");
  auto sum = direct_sum(p.carrier, q.carrier);
  Mat<S> phi = vstack<S>(p.phi, q.phi);
  if (phi.cols() != p.base->dim()) phi = Mat<S>::Zero(sum->dim(), p.base->dim());
  SlicePair<S> prod{p.base, sum, phi};
  std::vector<Eigen::Index> dims{p.carrier->dim(), q.carrier->dim()};
  return {prod,
          {block_projection<S>(dims, 0), prod, p},
          {block_projection<S>(dims, 1), prod, q}};
}

template <class S>
SlicePair<S> pair_power(const SlicePair<S>& p, int n) {
  if (n <= 0) {
    auto z = zero_representation(p.base->model());
    return {p.base, z, Mat<S>(0, p.base->dim())};
  }
  SlicePair<S> out = p;
  for (int i = 1; i < n; ++i) out = pair_product(out, p).product;
  return out;
}

/// Unique morphism r -> p x q induced by f: r -> p and g: r -> q.
template <class S>
SliceMorphism<S> mediating_morphism(const SliceMorphism<S>& f, const SliceMorphism<S>& g,
                                    const PairProduct<S>& prod,
                                    const Tolerances& tol = default_tolerances()) {
  return make_slice_morphism<S>(vstack<S>(f.map, g.map), f.source, prod.product, tol);
}

template <class S>
struct ExtremalPairs {
  SlicePair<S> initial;   // (m, id)
  SlicePair<S> terminal;  // (0, 0)
};

template <class S>
ExtremalPairs<S> extremal_pairs(const RepPtr<S>& base) {
  const Eigen::Index d = base->dim();
  return {{base, base, Mat<S>::Identity(d, d)},
          {base, zero_representation(base->model()), Mat<S>(0, d)}};
}

// ---------------------------------------------------------------------------
// Functors U, sigma, F.

template <class S>
RepPtr<S> functor_U(const SlicePair<S>& p) {
  return p.carrier;
}

/// sigma(V) = (V, 0).
template <class S>
SlicePair<S> functor_sigma(const RepPtr<S>& v, const RepPtr<S>& base) {
  return {base, v, Mat<S>::Zero(v->dim(), base->dim())};
}

/// F(V) = (m + V, i_m).
template <class S>
SlicePair<S> functor_F(const RepPtr<S>& v, const RepPtr<S>& base) {
  auto sum = direct_sum(base, v);
  return {base, sum, block_injection<S>({base->dim(), v->dim()}, 0)};
}

/// F(f) = 1_m + f.
template <class S>
SliceMorphism<S> functor_F_on(const Intertwiner<S>& f, const RepPtr<S>& base) {
  Mat<S> id = Mat<S>::Identity(base->dim(), base->dim());
  return {block_diagonal<S>({id, f.matrix}), functor_F(f.source, base), functor_F(f.target, base)};
}

// ---------------------------------------------------------------------------
// Hom sets of pairs.

/// Solution set {psi intertwiner : psi phi_p = phi_q}, an affine subspace of
/// Hom(V, V') given by a particular solution and a homogeneous basis.
template <class S>
struct AffineHomSet {
  bool empty = true;
  Mat<S> particular;
  std::vector<Mat<S>> homogeneous;
  double residual = 0.0;

  std::size_t dimension() const { return homogeneous.size(); }
  Mat<S> element(const Vec<S>& coeffs) const {
    Mat<S> out = particular;
    for (std::size_t i = 0; i < homogeneous.size(); ++i)
      out += coeffs(static_cast<Eigen::Index>(i)) * homogeneous[i];
    return out;
  }
};

template <class S>
AffineHomSet<S> hom_pairs(const SlicePair<S>& p, const SlicePair<S>& q,
                          const Tolerances& tol = default_tolerances()) {
  detail::require_same_base(p, q, "hom_pairs");
  auto basis = hom_space(p.carrier, q.carrier, tol);
  const Eigen::Index rows = q.carrier->dim(), cols = p.carrier->dim();
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  Mat<S> system(q.phi.size(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    system.col(j) = vectorize<S>(Mat<S>(basis[static_cast<std::size_t>(j)].matrix * p.phi));
  Vec<S> rhs = vectorize<S>(q.phi);

  AffineHomSet<S> out;
  auto ls = solve_least_squares<S>(system, rhs);
  out.residual = ls.residual;
  out.empty = ls.residual > tol.matrix;
  if (out.empty) return out;
  out.particular = Mat<S>::Zero(rows, cols);
  for (Eigen::Index j = 0; j < k; ++j)
    out.particular += ls.x(j) * basis[static_cast<std::size_t>(j)].matrix;
  if (k == 0) return out;
  Mat<S> ns = system.rows() == 0 ? Mat<S>(Mat<S>::Identity(k, k))
                                 : nullspace<S>(system, tol.nullspace);
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    Mat<S> h = Mat<S>::Zero(rows, cols);
    for (Eigen::Index j = 0; j < k; ++j) h += ns(j, c) * basis[static_cast<std::size_t>(j)].matrix;
    out.homogeneous.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The adjunction F -| U:  Hom(V, V') = Hom(F(V), (V', phi')),  f <-> (phi', f).

template <class S>
SliceMorphism<S> adjunction_transpose(const Intertwiner<S>& f, const SlicePair<S>& target,
                                      const Tolerances& tol = default_tolerances()) {
  if (!detail::same_representation(f.target, target.carrier))
    throw InvariantError("adjunction_transpose: codomain of f is not the target carrier");
  if (intertwining_residual(*f.source, *f.target, f.matrix) > tol.matrix)
    throw InvariantError("adjunction_transpose: f is not an intertwiner");
  return make_slice_morphism<S>(hstack<S>(target.phi, f.matrix), functor_F(f.source, target.base),
                                target, tol);
}

/// Restriction of psi: F(V) -> (V', phi') to the V block.
template <class S>
Intertwiner<S> adjunction_transpose_inverse(const SliceMorphism<S>& psi, const RepPtr<S>& v) {
  const Eigen::Index dm = psi.source.base->dim();
  if (psi.map.cols() != dm + v->dim())
    throw InvariantError("adjunction_transpose_inverse: source is not F(V)");
  return {Mat<S>(psi.map.rightCols(v->dim())), v, psi.target.carrier};
}

// ---------------------------------------------------------------------------
// Isomorphism testing.

template <class S>
struct IsoResult {
  bool isomorphic = false;
  std::optional<SliceMorphism<S>> witness;
  std::optional<SliceMorphism<S>> inverse;
  double best_det = 0.0;  // |det| over the Hadamard bound of the best sample
};

namespace detail {
template <class S>
double normalized_det(const Mat<S>& m) {
  if (m.rows() == 0) return 1.0;
  double bound = 1.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) bound *= m.col(c).norm();
  if (bound == 0.0) return 0.0;
  return std::abs(m.determinant()) / bound;
}
}  // namespace detail

/// Decides whether hom_pairs(p, q) contains an invertible element by
/// sampling the determinant polynomial at 32 seeded Gaussian points of the
/// affine solution space.
template <class S>
IsoResult<S> is_isomorphic(const SlicePair<S>& p, const SlicePair<S>& q, std::uint64_t seed = 0,
                           const Tolerances& tol = default_tolerances(), int samples = 32) {
  IsoResult<S> out;
  if (p.carrier->dim() != q.carrier->dim()) return out;
  auto homs = hom_pairs(p, q, tol);
  if (homs.empty) return out;
  Rng rng(seed);
  Mat<S> best = homs.particular;
  out.best_det = detail::normalized_det(best);
  const int rounds = homs.dimension() == 0 ? 0 : samples;
  for (int s = 0; s < rounds; ++s) {
    Mat<S> cand =
        homs.element(random_vector<S>(static_cast<Eigen::Index>(homs.dimension()), rng));
    double d = detail::normalized_det(cand);
    if (d > out.best_det) {
      out.best_det = d;
      best = std::move(cand);
    }
  }
  if (out.best_det <= tol.det) return out;
  Mat<S> inv = best.rows() == 0 ? best : Mat<S>(best.inverse());
  out.isomorphic = true;
  out.witness = make_slice_morphism<S>(best, p, q, tol);
  out.inverse = make_slice_morphism<S>(inv, q, p, tol);
  return out;
}

// ---------------------------------------------------------------------------
// The monad T = U F:  T a = m + a,  eta_a = i_a,  chi_a = (i_m, 1_{m+a}).

template <class S>
struct MonadData {
  RepPtr<S> ta;
  Mat<S> eta;  // a -> m + a
  Mat<S> chi;  // m + (m + a) -> m + a
};

template <class S>
MonadData<S> monad_apply(const RepPtr<S>& a, const RepPtr<S>& base) {
  const Eigen::Index dm = base->dim(), da = a->dim();
  MonadData<S> out;
  out.ta = direct_sum(base, a);
  out.eta = block_injection<S>({dm, da}, 1);
  out.chi = hstack<S>(block_injection<S>({dm, da}, 0), Mat<S>(Mat<S>::Identity(dm + da, dm + da)));
  return out;
}

/// T(f) = 1_m + f.
template <class S>
Mat<S> monad_on_morphism(const Mat<S>& f, Eigen::Index base_dim) {
  return block_diagonal<S>({Mat<S>(Mat<S>::Identity(base_dim, base_dim)), f});
}

template <class S>
struct MonadAlgebra {
  RepPtr<S> base;
  RepPtr<S> carrier;
  Mat<S> structure;  // a x (m + a)
};

template <class S>
struct AlgebraCheck {
  bool equivariant = false;
  bool unit_law = false;
  bool associativity = false;
  double unit_residual = 0.0;
  double associativity_residual = 0.0;
  std::string diagnostic;
  std::optional<MonadAlgebra<S>> algebra;
  Mat<S> hbar;  // h restricted to m
};

/// Checks h: m + a -> a against the algebra laws. The unit law forces
/// h = (hbar, 1_a); associativity then holds automatically and is verified
/// numerically.
template <class S>
AlgebraCheck<S> algebra_check(const RepPtr<S>& a, const RepPtr<S>& base, const Mat<S>& h,
                              const Tolerances& tol = default_tolerances()) {
  AlgebraCheck<S> out;
  const Eigen::Index dm = base->dim(), da = a->dim();
  auto t = monad_apply(a, base);
  if (h.rows() != da || h.cols() != dm + da) {
    out.diagnostic = "structure map has the wrong shape";
    return out;
  }
  out.equivariant = intertwining_residual(*t.ta, *a, h) <= tol.matrix;
  if (!out.equivariant) {
    out.diagnostic = "structure map is not an intertwiner";
    return out;
  }
  out.unit_residual = relative_diff(Mat<S>(h * t.eta), Mat<S>(Mat<S>::Identity(da, da)));
  out.unit_law = out.unit_residual <= tol.matrix;
  out.hbar = h.leftCols(dm);
  Mat<S> lhs = h * monad_on_morphism<S>(h, dm);
  Mat<S> rhs = h * t.chi;
  out.associativity_residual = relative_diff(lhs, rhs);
  out.associativity = out.associativity_residual <= tol.matrix;
  if (!out.unit_law) {
    out.diagnostic = "unit law fails: the a-block of h is not the identity";
    return out;
  }
  if (!out.associativity) {
    out.diagnostic = "associativity fails";
    return out;
  }
  out.algebra = MonadAlgebra<S>{base, a, h};
  return out;
}

/// Comparison functor K: (a, hbar) -> <a, (hbar, 1_a)>.
template <class S>
MonadAlgebra<S> to_algebra(const SlicePair<S>& p) {
  const Eigen::Index da = p.carrier->dim();
  return {p.base, p.carrier, hstack<S>(p.phi, Mat<S>(Mat<S>::Identity(da, da)))};
}

template <class S>
SlicePair<S> from_algebra(const MonadAlgebra<S>& alg) {
  return {alg.base, alg.carrier, Mat<S>(alg.structure.leftCols(alg.base->dim()))};
}

template <class S>
SlicePair<S> comparison_roundtrip(const SlicePair<S>& p) {
  return from_algebra(to_algebra(p));
}

/// h' T(f) = f h.
template <class S>
double algebra_morphism_residual(const Mat<S>& f, const MonadAlgebra<S>& src,
                                 const MonadAlgebra<S>& dst) {
  Mat<S> lhs = dst.structure * monad_on_morphism<S>(f, src.base->dim());
  Mat<S> rhs = f * src.structure;
  return relative_diff(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Classification over a simple compact group.

template <class S>
struct CanonicalForm {
  std::size_t n = 0;     // multiplicity of m in V
  bool phi_nonzero = false;
  RepPtr<S> complement;  // W
  SlicePair<S> normal;   // (m, id)^n x (W, 0), or (V, 0)
  SliceMorphism<S> witness;
  SliceMorphism<S> witness_inverse;
};

namespace detail {
/// Invertible A with A * lambda = (1, ..., 1).
template <class S>
Mat<S> move_to_ones(const Vec<S>& lambda, double tol) {
  const Eigen::Index n = lambda.size();
  auto complete = [tol](const Vec<S>& v) {
    Mat<S> row = v.adjoint();
    Mat<S> rest = nullspace<S>(row, tol);
    return hstack<S>(Mat<S>(v), rest);
  };
  Mat<S> from = complete(lambda);
  Mat<S> to = complete(Vec<S>::Ones(n));
  return to * from.inverse();
}
}  // namespace detail

template <class S>
CanonicalForm<S> canonical_form(const SlicePair<S>& p, const Tolerances& tol = default_tolerances()) {
  const auto& m = p.base;
  if (!m->model()->simple_compact())
    throw RefusedError("classification needs a model flagged simple-compact, got '" +
                       m->model()->name() + "'");
  require_absolutely_irreducible(m, tol);

  CanonicalForm<S> out;
  const Eigen::Index dm = m->dim(), dv = p.carrier->dim();
  auto embeddings = hom_space(m, p.carrier, tol);
  out.n = embeddings.size();
  auto split = isotypic_complement(p.carrier, m, tol);
  out.complement = subrepresentation(p.carrier, split.complement, p.carrier->label() + "/m", tol);
  out.phi_nonzero = max_abs(p.phi) > tol.matrix;

  if (!out.phi_nonzero) {
    out.normal = functor_sigma(p.carrier, m);
    out.witness = make_slice_morphism<S>(Mat<S>::Identity(dv, dv), p, out.normal, tol);
    out.witness_inverse = make_slice_morphism<S>(Mat<S>::Identity(dv, dv), out.normal, p, tol);
    return out;
  }

  const Eigen::Index n = static_cast<Eigen::Index>(out.n);
  const Eigen::Index dw = out.complement->dim();
  // D: m^n + W -> V, (x_1..x_n, w) -> sum iota_i x_i + C w.
  Mat<S> d(dv, n * dm + dw);
  Vec<S> lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& iota = embeddings[static_cast<std::size_t>(i)].matrix;
    d.block(0, i * dm, dv, dm) = iota;
    lambda(i) = (iota.adjoint() * p.phi).trace();
  }
  d.rightCols(dw) = split.complement;
  Mat<S> a = detail::move_to_ones<S>(lambda, tol.nullspace);
  Mat<S> change = block_diagonal<S>({kron<S>(a, Mat<S>(Mat<S>::Identity(dm, dm))),
                                     Mat<S>(Mat<S>::Identity(dw, dw))});
  Mat<S> psi = change * d.inverse();

  auto ext = extremal_pairs(m);
  SlicePair<S> normal = pair_power(ext.initial, static_cast<int>(n));
  out.normal = pair_product(normal, functor_sigma(out.complement, m)).product;
  out.witness = make_slice_morphism<S>(psi, p, out.normal, tol);
  out.witness_inverse = make_slice_morphism<S>(Mat<S>(psi.inverse()), out.normal, p, tol);
  return out;
}

// ---------------------------------------------------------------------------
// Restriction of pairs along H1 -> H2 (pullback along G/H1 -> G/H2).

template <class S>
SlicePair<S> restrict_pair(const SlicePair<S>& p, const Restriction<S>& r, const RepPtr<S>& new_base,
                           const Tolerances& tol = default_tolerances()) {
  auto carrier = restrict_representation(p.carrier, r, tol);
  return make_pair<S>(new_base, carrier, p.phi, tol);
}

}  // namespace tgact
