#pragma once

// Split Grothendieck groups of Rep(H) and m\Rep(H) relative to a finite list
// of irreducibles, the induced maps K(U), K(sigma), K(F), K(pullback), and the
// product isomorphism  (a, f) x (a, f) = (a, f) x (a, 0)  that identifies
// [(a, f)] with [(a, 0)].

#include "tgact/slice.hpp"

#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace tgact {

/// Ordered list of pairwise non-isomorphic irreducibles over one model.
/// Over the reals an irreducible may have End of dimension 2 or 4 (complex or
/// quaternionic type); multiplicities are then dim Hom(U, V) / dim End(U).
template <class S>
class IrrepBasis {
 public:
  static std::shared_ptr<const IrrepBasis> make(std::string name, std::vector<RepPtr<S>> irreps,
                                                const Tolerances& tol = default_tolerances()) {
    auto b = std::shared_ptr<IrrepBasis>(new IrrepBasis());
    b->name_ = std::move(name);
    b->irreps_ = std::move(irreps);
    if (b->irreps_.empty()) throw InvariantError("irrep basis '" + b->name_ + "' is empty");
    const auto& model = b->irreps_.front()->model();
    for (std::size_t i = 0; i < b->irreps_.size(); ++i) {
      const auto& u = b->irreps_[i];
      if (u->model() != model)
        throw InvariantError("irrep basis '" + b->name_ + "' mixes models");
      if (u->dim() == 0)
        throw InvariantError("irrep basis '" + b->name_ + "' contains a zero representation");
      std::size_t e = hom_dimension(u, u, tol);
      bool ok = is_complex_v<S> ? e == 1 : (e == 1 || ((e == 2 || e == 4) && is_division_algebra(u, tol)));
      if (!ok)
        throw InvariantError("'" + u->label() + "' in basis '" + b->name_ +
                             "' is not irreducible (dim End = " + std::to_string(e) + ")");
      b->endo_.push_back(e);
      for (std::size_t j = 0; j < i; ++j)
        if (hom_dimension(b->irreps_[j], u, tol) != 0)
          throw InvariantError("basis '" + b->name_ + "' lists isomorphic irreducibles '" +
                               b->irreps_[j]->label() + "' and '" + u->label() + "'");
    }
    return b;
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return irreps_.size(); }
  const std::vector<RepPtr<S>>& irreps() const { return irreps_; }
  const RepPtr<S>& irrep(std::size_t i) const { return irreps_[i]; }
  std::size_t endomorphism_dim(std::size_t i) const { return endo_[i]; }
  const ModelPtr<S>& model() const { return irreps_.front()->model(); }

 private:
  IrrepBasis() = default;

  // Real endomorphism algebra is R, C or H exactly when its traceless part
  // anticommutes to scalars under a negative definite form.
  static bool is_division_algebra(const RepPtr<S>& u, const Tolerances& tol) {
    const Eigen::Index n = u->dim();
    Mat<S> id = Mat<S>::Identity(n, n);
    std::vector<Mat<S>> traceless;
    for (const auto& h : hom_space(u, u, tol)) traceless.push_back(h.matrix - (h.matrix.trace() / S(n)) * id);
    Mat<S> stacked(n * n, static_cast<Eigen::Index>(traceless.size()));
    for (std::size_t k = 0; k < traceless.size(); ++k)
      stacked.col(static_cast<Eigen::Index>(k)) = vectorize<S>(traceless[k]);
    Mat<S> span = column_span<S>(stacked, tol.basis);
    const Eigen::Index r = span.cols();
    Mat<S> form(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) {
        Mat<S> x = unvectorize<S>(span.col(i), n, n), y = unvectorize<S>(span.col(j), n, n);
        Mat<S> anti = x * y + y * x;
        S beta = anti.trace() / S(2 * n);
        if (max_abs(Mat<S>(anti - S(2) * beta * id)) > tol.matrix * std::max<double>(1.0, max_abs(anti))) return false;
        form(i, j) = beta;
      }
    Eigen::SelfAdjointEigenSolver<Mat<S>> eig(form);
    return r == 0 || eig.eigenvalues().maxCoeff() < -tol.matrix;
  }
  std::string name_;
  std::vector<RepPtr<S>> irreps_;
  std::vector<std::size_t> endo_;
};

template <class S>
using BasisPtr = std::shared_ptr<const IrrepBasis<S>>;

/// Which Grothendieck group a class lives in.
enum class KGroup { representations, pairs };

template <class S>
struct KClass {
  BasisPtr<S> basis;
  KGroup group = KGroup::representations;
  std::vector<long long> coeffs;

  KClass operator+(const KClass& o) const { return combine(o, 1); }
  KClass operator-(const KClass& o) const { return combine(o, -1); }
  bool operator==(const KClass& o) const {
    return basis == o.basis && group == o.group && coeffs == o.coeffs;
  }

  /// Formal sum over irrep labels, e.g. "1*triv + 2*adj".
  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0) continue;
      if (!first) os << (coeffs[i] < 0 ? " - " : " + ");
      else if (coeffs[i] < 0) os << "-";
      os << std::llabs(coeffs[i]) << "*" << basis->irrep(i)->label();
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  KClass combine(const KClass& o, long long sign) const {
    if (basis != o.basis || group != o.group)
      throw InvariantError("K-classes over different bases or groups");
    KClass out = *this;
    for (std::size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] += sign * o.coeffs[i];
    return out;
  }
};

template <class S>
KClass<S> k_zero(const BasisPtr<S>& basis, KGroup group) {
  return {basis, group, std::vector<long long>(basis->size(), 0)};
}

template <class S>
KClass<S> k_class_of_rep(const RepPtr<S>& v, const BasisPtr<S>& basis,
                         const Tolerances& tol = default_tolerances()) {
  if (v->model() != basis->model())
    throw InvariantError("k_class_of_rep: representation and basis over different models");
  KClass<S> out = k_zero(basis, KGroup::representations);
  Eigen::Index accounted = 0;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    std::size_t h = hom_dimension(basis->irrep(i), v, tol);
    std::size_t e = basis->endomorphism_dim(i);
    if (h % e != 0)
      throw InvariantError("k_class_of_rep: dim Hom not divisible by dim End for '" +
                           basis->irrep(i)->label() + "'");
    out.coeffs[i] = static_cast<long long>(h / e);
    accounted += out.coeffs[i] * basis->irrep(i)->dim();
  }
  if (accounted != v->dim())
    throw InvariantError("'" + v->label() + "' has a constituent outside basis '" + basis->name() +
                         "' (accounted " + std::to_string(accounted) + " of " +
                         std::to_string(v->dim()) + " dimensions)");
  return out;
}

/// [p] in K(m\Rep): the class of its carrier, justified by the product
/// isomorphism of witness_product_iso.
template <class S>
KClass<S> k_class_of_pair(const SlicePair<S>& p, const BasisPtr<S>& basis,
                          const Tolerances& tol = default_tolerances()) {
  KClass<S> c = k_class_of_rep(p.carrier, basis, tol);
  c.group = KGroup::pairs;
  return c;
}

template <class S>
struct ProductWitness {
  SliceMorphism<S> forward;   // p x p -> p x sigma(U(p)),  (e1, e2) -> (e1, e2 - e1)
  SliceMorphism<S> backward;  // (e1, e2) -> (e1, e2 + e1)
};

template <class S>
ProductWitness<S> witness_product_iso(const SlicePair<S>& p,
                                      const Tolerances& tol = default_tolerances()) {
  const Eigen::Index d = p.carrier->dim();
  Mat<S> id = Mat<S>::Identity(d, d);
  Mat<S> fwd = Mat<S>::Zero(2 * d, 2 * d);
  fwd.topLeftCorner(d, d) = id;
  fwd.bottomLeftCorner(d, d) = -id;
  fwd.bottomRightCorner(d, d) = id;
  Mat<S> bwd = fwd;
  bwd.bottomLeftCorner(d, d) = id;
  auto square = pair_product(p, p).product;
  auto mixed = pair_product(p, functor_sigma(functor_U(p), p.base)).product;
  return {make_slice_morphism<S>(fwd, square, mixed, tol),
          make_slice_morphism<S>(bwd, mixed, square, tol)};
}

// ---------------------------------------------------------------------------
// Induced maps.

template <class S>
KClass<S> k_of_U(const KClass<S>& c) {
  if (c.group != KGroup::pairs) throw InvariantError("K(U) expects a class of pairs");
  KClass<S> out = c;
  out.group = KGroup::representations;
  return out;
}

template <class S>
KClass<S> k_of_sigma(const KClass<S>& c) {
  if (c.group != KGroup::representations)
    throw InvariantError("K(sigma) expects a class of representations");
  KClass<S> out = c;
  out.group = KGroup::pairs;
  return out;
}

/// On generators F(V) = (m + V, i_m), so [F(V)] = [V] + [m]. F does not
/// preserve products and this is not a group homomorphism unless m = 0.
template <class S>
KClass<S> k_of_F(const KClass<S>& c, const RepPtr<S>& base,
                 const Tolerances& tol = default_tolerances()) {
  if (c.group != KGroup::representations)
    throw InvariantError("K(F) expects a class of representations");
  KClass<S> out = c + k_class_of_rep(base, c.basis, tol);
  out.group = KGroup::pairs;
  return out;
}

/// Matrix of K(restriction): column i is the class of the restriction of the
/// i-th source irreducible in the target basis.
template <class S>
struct KPullback {
  BasisPtr<S> source;
  BasisPtr<S> target;
  std::vector<std::vector<long long>> columns;
};

template <class S>
KPullback<S> k_pullback(const Restriction<S>& r, const BasisPtr<S>& source,
                        const BasisPtr<S>& target, const Tolerances& tol = default_tolerances()) {
  if (source->model() != r.source || target->model() != r.target)
    throw InvariantError("k_pullback: bases do not match the restriction '" + r.name + "'");
  KPullback<S> out{source, target, {}};
  for (const auto& u : source->irreps())
    out.columns.push_back(k_class_of_rep(restrict_representation(u, r, tol), target, tol).coeffs);
  return out;
}

template <class S>
KClass<S> apply_pullback(const KPullback<S>& pb, const KClass<S>& c) {
  if (c.basis != pb.source) throw InvariantError("K(pullback): class over the wrong basis");
  KClass<S> out = k_zero(pb.target, c.group);
  for (std::size_t i = 0; i < pb.columns.size(); ++i)
    for (std::size_t j = 0; j < out.coeffs.size(); ++j)
      out.coeffs[j] += pb.columns[i][j] * c.coeffs[i];
  return out;
}

enum class FunctorTag { U, sigma, F, pullback };

template <class S>
struct FunctorContext {
  RepPtr<S> base;                         // for F
  std::optional<KPullback<S>> pullback;   // for pullback
};

template <class S>
KClass<S> k_of_functor(FunctorTag tag, const KClass<S>& c, const FunctorContext<S>& ctx = {},
                       const Tolerances& tol = default_tolerances()) {
  switch (tag) {
    case FunctorTag::U:
      return k_of_U(c);
    case FunctorTag::sigma:
      return k_of_sigma(c);
    case FunctorTag::F:
      if (!ctx.base) throw InvariantError("K(F) needs the base object");
      return k_of_F(c, ctx.base, tol);
    case FunctorTag::pullback:
      if (!ctx.pullback) throw InvariantError("K(pullback) needs restriction data");
      return apply_pullback(*ctx.pullback, c);
  }
  throw InvariantError("unknown functor tag");
}

}  // namespace tgact
