#pragma once

// Finite-dimensional representations and intertwiner linear algebra.
//
// Connected models are handled at the Lie-algebra level: a representation is
// one matrix per algebra basis element and an intertwiner commutes with all of
// them. Finite models use one matrix per generator.

#include "tgact/lie.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tgact {

template <class S>
class Representation;

template <class S>
using RepPtr = std::shared_ptr<const Representation<S>>;

template <class S>
using GroupActionFn = std::function<Mat<S>(const GroupElement<S>&)>;

template <class S>
class Representation {
 public:
  /// Validates the bracket relations (connected) or the Cayley-graph
  /// relations of the enumerated group (finite).
  static RepPtr<S> make(ModelPtr<S> model, Eigen::Index dim, std::vector<Mat<S>> actions,
                        std::string label = {}, GroupActionFn<S> group_action = {},
                        const Tolerances& tol = default_tolerances()) {
    auto r = std::shared_ptr<Representation>(new Representation());
    r->model_ = std::move(model);
    r->dim_ = dim;
    r->actions_ = std::move(actions);
    r->label_ = std::move(label);
    r->group_action_ = std::move(group_action);
    r->validate(tol);
    return r;
  }

  const ModelPtr<S>& model() const { return model_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<Mat<S>>& actions() const { return actions_; }
  const Mat<S>& action(std::size_t i) const { return actions_[i]; }
  const std::string& label() const { return label_; }
  bool has_group_action() const {
    return !model_->is_connected() || static_cast<bool>(group_action_);
  }

  /// rho(g). Finite models multiply generator matrices along the word of g;
  /// connected models need a group-level action supplied at construction.
  Mat<S> group_action(const GroupElement<S>& g) const {
    if (g.model != model_) throw InvariantError("group_action: model mismatch");
    if (!model_->is_connected()) {
      auto idx = model_->find_element(g.matrix);
      if (!idx) throw InvariantError("group_action: element not in finite group");
      Mat<S> out = Mat<S>::Identity(dim_, dim_);
      for (std::size_t k : model_->word(*idx)) out = out * actions_[k];
      return out;
    }
    if (!group_action_)
      throw RefusedError("representation '" + label_ + "' has no group-level action");
    return group_action_(g);
  }

  /// rho(d exp(t a)) = exp(t rho(a)) for connected models.
  Mat<S> exp_action(const AlgebraElement<S>& a, double t) const {
    return matrix_exp<S>(Mat<S>(algebra_action(a) * S(t)));
  }

  Mat<S> algebra_action(const AlgebraElement<S>& a) const {
    Mat<S> out = Mat<S>::Zero(dim_, dim_);
    for (std::size_t i = 0; i < actions_.size(); ++i)
      out += a.coords(static_cast<Eigen::Index>(i)) * actions_[i];
    return out;
  }

  const GroupActionFn<S>& group_action_fn() const { return group_action_; }

  double relation_residual() const {
    double worst = 0.0;
    if (model_->is_connected()) {
      const Eigen::Index d = model_->dimension();
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          const auto& ri = actions_[static_cast<std::size_t>(i)];
          const auto& rj = actions_[static_cast<std::size_t>(j)];
          Mat<S> expect = Mat<S>::Zero(dim_, dim_);
          for (Eigen::Index k = 0; k < d; ++k)
            expect += model_->structure(i, j, k) * actions_[static_cast<std::size_t>(k)];
          worst = std::max(worst, relative_diff(Mat<S>(ri * rj - rj * ri), expect));
        }
      return worst;
    }
    const auto& elems = model_->elements();
    std::vector<Mat<S>> images(elems.size());
    for (std::size_t e = 0; e < elems.size(); ++e) {
      images[e] = Mat<S>::Identity(dim_, dim_);
      for (std::size_t k : model_->word(e)) images[e] = images[e] * actions_[k];
    }
    for (std::size_t e = 0; e < elems.size(); ++e)
      for (std::size_t k = 0; k < actions_.size(); ++k) {
        auto target = model_->find_element(Mat<S>(elems[e] * model_->generators()[k]));
        worst = std::max(worst, relative_diff(Mat<S>(images[e] * actions_[k]), images[*target]));
      }
    return worst;
  }

 private:
  Representation() = default;

  void validate(const Tolerances& tol) const {
    const std::size_t expected = model_->is_connected()
                                     ? static_cast<std::size_t>(model_->dimension())
                                     : model_->generators().size();
    if (actions_.size() != expected)
      throw InvariantError("representation '" + label_ + "' needs " + std::to_string(expected) +
                           " action matrices, got " + std::to_string(actions_.size()));
    for (const auto& a : actions_)
      if (a.rows() != dim_ || a.cols() != dim_)
        throw InvariantError("representation '" + label_ + "' has a mis-shaped action matrix");
    double r = relation_residual();
    if (r > tol.matrix)
      throw InvariantError("representation '" + label_ + "' violates the group relations (residual " +
                           std::to_string(r) + ")");
  }

  ModelPtr<S> model_;
  Eigen::Index dim_ = 0;
  std::vector<Mat<S>> actions_;
  std::string label_;
  GroupActionFn<S> group_action_;
};

template <class S>
struct Intertwiner {
  Mat<S> matrix;  // target.dim x source.dim
  RepPtr<S> source;
  RepPtr<S> target;
};

template <class S>
double intertwining_residual(const Representation<S>& source, const Representation<S>& target,
                             const Mat<S>& psi) {
  if (psi.rows() != target.dim() || psi.cols() != source.dim())
    return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < source.actions().size(); ++i)
    worst = std::max(worst, relative_diff(Mat<S>(target.action(i) * psi),
                                          Mat<S>(psi * source.action(i))));
  return worst;
}

template <class S>
Intertwiner<S> make_intertwiner(RepPtr<S> source, RepPtr<S> target, Mat<S> psi,
                                const Tolerances& tol = default_tolerances()) {
  if (source->model() != target->model())
    throw InvariantError("intertwiner between representations of different models");
  if (psi.rows() != target->dim() || psi.cols() != source->dim())
    throw InvariantError("intertwiner has shape " + std::to_string(psi.rows()) + "x" +
                         std::to_string(psi.cols()) + ", expected " +
                         std::to_string(target->dim()) + "x" + std::to_string(source->dim()));
  double r = intertwining_residual(*source, *target, psi);
  if (r > tol.matrix)
    throw InvariantError("map is not equivariant (residual " + std::to_string(r) + ")");
  return {std::move(psi), std::move(source), std::move(target)};
}

// ---------------------------------------------------------------------------
// Constructors.

template <class S>
RepPtr<S> trivial_representation(const ModelPtr<S>& m, Eigen::Index dim = 1) {
  std::size_t count = m->is_connected() ? static_cast<std::size_t>(m->dimension())
                                        : m->generators().size();
  std::vector<Mat<S>> acts;
  for (std::size_t i = 0; i < count; ++i)
    acts.push_back(m->is_connected() ? Mat<S>(Mat<S>::Zero(dim, dim)) : Mat<S>(Mat<S>::Identity(dim, dim)));
  GroupActionFn<S> ga = [dim](const GroupElement<S>&) { return Mat<S>(Mat<S>::Identity(dim, dim)); };
  return Representation<S>::make(m, dim, std::move(acts),
                                 dim == 1 ? "triv" : "triv" + std::to_string(dim), ga);
}

template <class S>
RepPtr<S> zero_representation(const ModelPtr<S>& m) {
  std::size_t count = m->is_connected() ? static_cast<std::size_t>(m->dimension())
                                        : m->generators().size();
  GroupActionFn<S> ga = [](const GroupElement<S>&) { return Mat<S>(0, 0); };
  return Representation<S>::make(m, 0, std::vector<Mat<S>>(count, Mat<S>(0, 0)), "0", ga);
}

/// Defining matrix representation.
template <class S>
RepPtr<S> standard_representation(const ModelPtr<S>& m) {
  GroupActionFn<S> ga = [](const GroupElement<S>& g) { return g.matrix; };
  return Representation<S>::make(m, m->ambient_size(),
                                 m->is_connected() ? m->basis() : m->generators(), "std", ga);
}

/// ad(X_i)_{kj} = c[i][j][k]; zero-dimensional for finite models.
template <class S>
RepPtr<S> adjoint_representation(const ModelPtr<S>& m,
                                 const Tolerances& tol = default_tolerances()) {
  if (!m->is_connected()) {
    auto z = zero_representation(m);
    return Representation<S>::make(m, 0, z->actions(), "adj", z->group_action_fn());
  }
  const Eigen::Index d = m->dimension();
  std::vector<Mat<S>> acts;
  for (Eigen::Index i = 0; i < d; ++i) {
    Mat<S> a(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index j = 0; j < d; ++j) a(k, j) = m->structure(i, j, k);
    acts.push_back(std::move(a));
  }
  GroupActionFn<S> ga = [tol](const GroupElement<S>& g) { return adjoint_matrix(g, tol); };
  return Representation<S>::make(m, d, std::move(acts), "adj", ga, tol);
}

template <class S>
RepPtr<S> direct_sum(const std::vector<RepPtr<S>>& parts) {
  if (parts.empty()) throw InvariantError("direct_sum of an empty list");
  const auto& m = parts.front()->model();
  for (const auto& p : parts)
    if (p->model() != m) throw InvariantError("direct_sum: model mismatch");
  Eigen::Index dim = 0;
  std::string label;
  bool grouped = true;
  for (const auto& p : parts) {
    dim += p->dim();
    label += (label.empty() ? "" : "+") + p->label();
    grouped = grouped && p->has_group_action();
  }
  std::vector<Mat<S>> acts;
  for (std::size_t i = 0; i < parts.front()->actions().size(); ++i) {
    std::vector<Mat<S>> blocks;
    for (const auto& p : parts) blocks.push_back(p->action(i));
    acts.push_back(block_diagonal(blocks));
  }
  GroupActionFn<S> ga;
  if (grouped && m->is_connected())
    ga = [parts](const GroupElement<S>& g) {
      std::vector<Mat<S>> blocks;
      for (const auto& p : parts) blocks.push_back(p->group_action(g));
      return block_diagonal(blocks);
    };
  return Representation<S>::make(m, dim, std::move(acts), label, ga);
}

template <class S>
RepPtr<S> direct_sum(const RepPtr<S>& v, const RepPtr<S>& w) {
  return direct_sum<S>(std::vector<RepPtr<S>>{v, w});
}

template <class S>
RepPtr<S> power(const RepPtr<S>& v, int n) {
  if (n == 0) return zero_representation(v->model());
  return direct_sum<S>(std::vector<RepPtr<S>>(static_cast<std::size_t>(n), v));
}

/// Block injection of the k-th summand (of the given dims) into the sum.
template <class S>
Mat<S> block_injection(const std::vector<Eigen::Index>& dims, std::size_t k) {
  Eigen::Index total = 0, offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i < k) offset += dims[i];
    total += dims[i];
  }
  Mat<S> out = Mat<S>::Zero(total, dims[k]);
  out.block(offset, 0, dims[k], dims[k]).setIdentity();
  return out;
}

template <class S>
Mat<S> block_projection(const std::vector<Eigen::Index>& dims, std::size_t k) {
  return block_injection<S>(dims, k).transpose();
}

/// Canonical injections and projections of V + W.
template <class S>
struct SumMaps {
  RepPtr<S> sum;
  Intertwiner<S> inject_first, inject_second, project_first, project_second;
};

template <class S>
SumMaps<S> direct_sum_maps(const RepPtr<S>& v, const RepPtr<S>& w) {
  auto s = direct_sum(v, w);
  std::vector<Eigen::Index> dims{v->dim(), w->dim()};
  return {s,
          {block_injection<S>(dims, 0), v, s},
          {block_injection<S>(dims, 1), w, s},
          {block_projection<S>(dims, 0), s, v},
          {block_projection<S>(dims, 1), s, w}};
}

// ---------------------------------------------------------------------------
// Hom spaces.

/// Stacked linear constraints on vec(psi) for psi in Hom(V, W).
template <class S>
Mat<S> intertwining_constraints(const Representation<S>& v, const Representation<S>& w) {
  const Eigen::Index n = v.dim(), m = w.dim();
  const std::size_t count = v.actions().size();
  Mat<S> out(static_cast<Eigen::Index>(count) * m * n, m * n);
  Mat<S> in = Mat<S>::Identity(n, n), im = Mat<S>::Identity(m, m);
  for (std::size_t i = 0; i < count; ++i)
    out.block(static_cast<Eigen::Index>(i) * m * n, 0, m * n, m * n) =
        kron<S>(in, w.action(i)) - kron<S>(Mat<S>(v.action(i).transpose()), im);
  return out;
}

/// Frobenius-orthonormal basis of Hom_G(V, W).
template <class S>
std::vector<Intertwiner<S>> hom_space(const RepPtr<S>& v, const RepPtr<S>& w,
                                      const Tolerances& tol = default_tolerances()) {
  if (v->model() != w->model()) throw InvariantError("hom_space: model mismatch");
  std::vector<Intertwiner<S>> out;
  const Eigen::Index n = v->dim(), m = w->dim();
  if (n == 0 || m == 0) return out;
  Mat<S> ns = nullspace<S>(intertwining_constraints(*v, *w), tol.nullspace);
  for (Eigen::Index c = 0; c < ns.cols(); ++c)
    out.push_back({unvectorize<S>(Vec<S>(ns.col(c)), m, n), v, w});
  return out;
}

template <class S>
std::size_t hom_dimension(const RepPtr<S>& v, const RepPtr<S>& w,
                          const Tolerances& tol = default_tolerances()) {
  return hom_space(v, w, tol).size();
}

template <class S>
bool is_absolutely_irreducible(const RepPtr<S>& u, const Tolerances& tol = default_tolerances()) {
  return u->dim() > 0 && hom_dimension(u, u, tol) == 1;
}

template <class S>
void require_absolutely_irreducible(const RepPtr<S>& u, const Tolerances& tol) {
  if (!is_absolutely_irreducible(u, tol))
    throw RefusedError("representation '" + u->label() +
                       "' is not absolutely irreducible (dim End != 1)");
}

/// Multiplicity of the absolutely irreducible U in V, i.e. dim Hom(U, V).
template <class S>
std::size_t isotypic_multiplicity(const RepPtr<S>& v, const RepPtr<S>& u,
                                  const Tolerances& tol = default_tolerances()) {
  require_absolutely_irreducible(u, tol);
  return hom_dimension(u, v, tol);
}

template <class S>
struct IsotypicSplit {
  Mat<S> isotypic;    // dim V x k, orthonormal columns
  Mat<S> complement;  // dim V x (dim V - k), orthonormal columns
};

/// U-isotypic subspace (sum of images of Hom(U, V)) and its invariant
/// complement (common kernel of Hom(V, U)).
template <class S>
IsotypicSplit<S> isotypic_complement(const RepPtr<S>& v, const RepPtr<S>& u,
                                     const Tolerances& tol = default_tolerances()) {
  require_absolutely_irreducible(u, tol);
  const Eigen::Index n = v->dim();
  IsotypicSplit<S> out;
  auto into = hom_space(u, v, tol);
  Mat<S> images(n, 0);
  for (const auto& f : into) images = hstack<S>(images, f.matrix);
  out.isotypic = column_span<S>(images, tol.nullspace);

  auto outof = hom_space(v, u, tol);
  Mat<S> kernels(0, n);
  for (const auto& f : outof) kernels = vstack<S>(kernels, f.matrix);
  out.complement = kernels.rows() == 0 ? Mat<S>(Mat<S>::Identity(n, n))
                                       : nullspace<S>(kernels, tol.nullspace);
  return out;
}

/// Representation on an invariant subspace with orthonormal basis columns.
template <class S>
RepPtr<S> subrepresentation(const RepPtr<S>& v, const Mat<S>& basis, std::string label,
                            const Tolerances& tol = default_tolerances()) {
  const Eigen::Index k = basis.cols();
  std::vector<Mat<S>> acts;
  Mat<S> left = basis.adjoint();
  for (const auto& a : v->actions()) {
    Mat<S> image = a * basis;
    Mat<S> restricted = left * image;
    if (relative_diff(image, Mat<S>(basis * restricted)) > tol.matrix)
      throw InvariantError("subspace is not invariant under '" + v->label() + "'");
    acts.push_back(std::move(restricted));
  }
  GroupActionFn<S> ga;
  if (v->has_group_action() && v->model()->is_connected())
    ga = [v, basis, left](const GroupElement<S>& g) {
      return Mat<S>(left * v->group_action(g) * basis);
    };
  return Representation<S>::make(v->model(), k, std::move(acts), std::move(label), ga, tol);
}

// ---------------------------------------------------------------------------
// Restriction along a group morphism H -> G.

/// A morphism from a model H into a model G. For connected H, column i of
/// `algebra_map` holds the G-coordinates of the image of the i-th basis
/// element of H. For finite H, `generator_images` lists G-elements.
template <class S>
struct Restriction {
  std::string name;
  ModelPtr<S> source;  // G, the group being restricted from
  ModelPtr<S> target;  // H
  Mat<S> algebra_map;
  std::vector<Mat<S>> generator_images;
  std::function<Mat<S>(const Mat<S>&)> group_map;  // optional, H matrix -> G matrix
};

template <class S>
double restriction_residual(const Restriction<S>& r) {
  if (!r.target->is_connected()) return 0.0;
  const Eigen::Index dh = r.target->dimension();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dh; ++i)
    for (Eigen::Index j = 0; j < dh; ++j) {
      Mat<S> xi = r.source->realize(r.algebra_map.col(i));
      Mat<S> xj = r.source->realize(r.algebra_map.col(j));
      Vec<S> expect = Vec<S>::Zero(r.source->dimension());
      for (Eigen::Index k = 0; k < dh; ++k)
        expect += r.target->structure(i, j, k) * r.algebra_map.col(k);
      worst = std::max(worst,
                       relative_diff(Mat<S>(xi * xj - xj * xi), Mat<S>(r.source->realize(expect))));
    }
  return worst;
}

template <class S>
void validate_restriction(const Restriction<S>& r, const Tolerances& tol = default_tolerances()) {
  if (r.target->is_connected()) {
    if (!r.source->is_connected())
      throw InvariantError("restriction '" + r.name + "': connected subgroup of a finite group");
    if (r.algebra_map.rows() != r.source->dimension() ||
        r.algebra_map.cols() != r.target->dimension())
      throw InvariantError("restriction '" + r.name + "': algebra map has wrong shape");
    if (restriction_residual(r) > tol.matrix)
      throw InvariantError("restriction '" + r.name + "' does not preserve brackets");
  } else if (r.generator_images.size() != r.target->generators().size()) {
    throw InvariantError("restriction '" + r.name + "': one image per generator required");
  }
}

template <class S>
RepPtr<S> restrict_representation(const RepPtr<S>& v, const Restriction<S>& r,
                                  const Tolerances& tol = default_tolerances()) {
  if (v->model() != r.source) throw InvariantError("restrict: representation of the wrong model");
  std::vector<Mat<S>> acts;
  GroupActionFn<S> ga;
  if (r.target->is_connected()) {
    for (Eigen::Index i = 0; i < r.target->dimension(); ++i)
      acts.push_back(v->algebra_action(AlgebraElement<S>{r.source, r.algebra_map.col(i)}));
    if (r.group_map && v->has_group_action()) {
      auto gmap = r.group_map;
      auto src = r.source;
      ga = [v, gmap, src](const GroupElement<S>& h) {
        return v->group_action(GroupElement<S>{src, gmap(h.matrix)});
      };
    }
  } else {
    for (const auto& img : r.generator_images)
      acts.push_back(v->group_action(GroupElement<S>{r.source, img}));
  }
  return Representation<S>::make(r.target, v->dim(), std::move(acts), v->label() + "|" + r.target->name(),
                                 ga, tol);
}

namespace models {

/// SO(2) -> SO(3) as rotations about the z-axis.
template <class S>
Restriction<S> so2_in_so3(const ModelPtr<S>& so3, const ModelPtr<S>& so2) {
  Mat<S> map = Mat<S>::Zero(3, 1);
  map(2, 0) = S(1);
  auto gm = [](const Mat<S>& h) {
    Mat<S> g = Mat<S>::Identity(3, 3);
    g.topLeftCorner(2, 2) = h;
    return g;
  };
  return {"so2_in_so3", so3, so2, map, {}, gm};
}

/// Real SO(2) representation of weight k: rotation by k*theta on the plane.
template <class S>
RepPtr<S> so2_weight(const ModelPtr<S>& so2, int k) {
  Mat<S> a = Mat<S>::Zero(2, 2);
  a(0, 1) = S(-k);
  a(1, 0) = S(k);
  GroupActionFn<S> ga = [k](const GroupElement<S>& g) {
    double th = std::arg(std::complex<double>(std::real(g.matrix(0, 0)), std::real(g.matrix(1, 0))));
    Mat<S> r(2, 2);
    r << S(std::cos(k * th)), S(-std::sin(k * th)), S(std::sin(k * th)), S(std::cos(k * th));
    return r;
  };
  return Representation<S>::make(so2, 2, {a}, "rot" + std::to_string(k), ga);
}

/// Complex one-dimensional SO(2) character of weight k: J acts by i*k.
inline RepPtr<Complex> so2_character(const ModelPtr<Complex>& so2, int k) {
  Mat<Complex> a(1, 1);
  a(0, 0) = Complex(0.0, k);
  GroupActionFn<Complex> ga = [k](const GroupElement<Complex>& g) {
    double th = std::arg(std::complex<double>(std::real(g.matrix(0, 0)), std::real(g.matrix(1, 0))));
    Mat<Complex> r(1, 1);
    r(0, 0) = std::polar(1.0, k * th);
    return r;
  };
  return Representation<Complex>::make(so2, 1, {a}, "chi" + std::to_string(k), ga);
}

}  // namespace models

}  // namespace tgact
