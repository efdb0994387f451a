#pragma once

// Matrix Lie groups, their Lie algebras, finite groups, and the tangent group
// realized as the semidirect product  g x| G  with multiplication
//   (a, g) * (b, h) = (a + Ad_g b, g h).

#include "tgact/linalg.hpp"

#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace tgact {

enum class GroupKind { finite, connected };

template <class S>
class GroupModel;

template <class S>
using ModelPtr = std::shared_ptr<const GroupModel<S>>;

/// Immutable description of a group: either a connected matrix Lie group
/// given by a Lie-algebra basis, or a finite matrix group given by
/// generators (closed once at construction).
template <class S>
class GroupModel : public std::enable_shared_from_this<GroupModel<S>> {
 public:
  struct ConnectedSpec {
    std::string name;
    std::vector<Mat<S>> basis;
    // c[i][j][k], flattened as (i*d + j)*d + k; derived from the basis if empty.
    std::vector<S> structure;
    bool orthogonal = false;
    bool simple_compact = false;
  };

  struct FiniteSpec {
    std::string name;
    std::vector<Mat<S>> generators;
    std::size_t closure_cap = 10000;
  };

  static ModelPtr<S> connected(ConnectedSpec spec,
                               const Tolerances& tol = default_tolerances()) {
    auto m = std::shared_ptr<GroupModel>(new GroupModel());
    m->kind_ = GroupKind::connected;
    m->name_ = std::move(spec.name);
    m->orthogonal_ = spec.orthogonal;
    m->simple_compact_ = spec.simple_compact;
    m->init_connected(std::move(spec.basis), std::move(spec.structure), tol);
    return m;
  }

  static ModelPtr<S> finite(FiniteSpec spec,
                            const Tolerances& tol = default_tolerances()) {
    auto m = std::shared_ptr<GroupModel>(new GroupModel());
    m->kind_ = GroupKind::finite;
    m->name_ = std::move(spec.name);
    m->orthogonal_ = false;
    m->init_finite(std::move(spec.generators), spec.closure_cap, tol);
    return m;
  }

  GroupKind kind() const { return kind_; }
  bool is_connected() const { return kind_ == GroupKind::connected; }
  const std::string& name() const { return name_; }
  Eigen::Index ambient_size() const { return ambient_; }
  /// Dimension of the Lie algebra (0 for finite groups).
  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(basis_.size());
  }
  const std::vector<Mat<S>>& basis() const { return basis_; }
  bool orthogonal() const { return orthogonal_; }
  bool simple_compact() const { return simple_compact_; }

  S structure(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    const Eigen::Index d = dimension();
    return structure_[static_cast<std::size_t>((i * d + j) * d + k)];
  }
  const std::vector<S>& structure_constants() const { return structure_; }

  const std::vector<Mat<S>>& generators() const { return generators_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Mat<S>>& elements() const { return elements_; }
  /// Generator indices whose ordered product is element `index`.
  std::vector<std::size_t> word(std::size_t index) const {
    std::vector<std::size_t> w;
    while (index != 0) {
      w.push_back(last_generator_[index]);
      index = parent_[index];
    }
    std::reverse(w.begin(), w.end());
    return w;
  }
  std::optional<std::size_t> find_element(const Mat<S>& g,
                                          double tol = 1e-9) const {
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (approx_equal(elements_[i], g, tol)) return i;
    return std::nullopt;
  }

  /// Matrix realization of algebra coordinates.
  Mat<S> realize(const Vec<S>& coords) const {
    Mat<S> out = Mat<S>::Zero(ambient_, ambient_);
    for (Eigen::Index i = 0; i < dimension(); ++i)
      out += coords(i) * basis_[static_cast<std::size_t>(i)];
    return out;
  }

  /// Coordinates of `m` in the algebra basis; throws when `m` leaves the span.
  Vec<S> coordinates(const Mat<S>& m, double tol) const {
    Vec<S> flat = vectorize<S>(m);
    Vec<S> coords = pinv_ * flat;
    double residual = relative_diff(flat_basis_ * coords, flat);
    if (residual > tol)
      throw InvariantError("matrix is not in the span of the algebra basis of '" +
                           name_ + "' (residual " + std::to_string(residual) +
                           ")");
    return coords;
  }

  /// Largest bracket residual |[X_i, X_j] - sum_k c_ijk X_k|.
  double bracket_residual() const {
    double worst = 0.0;
    const Eigen::Index d = dimension();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& xi = basis_[static_cast<std::size_t>(i)];
        const auto& xj = basis_[static_cast<std::size_t>(j)];
        Mat<S> comm = xi * xj - xj * xi;
        Mat<S> expect = Mat<S>::Zero(ambient_, ambient_);
        for (Eigen::Index k = 0; k < d; ++k)
          expect += structure(i, j, k) * basis_[static_cast<std::size_t>(k)];
        worst = std::max(worst, relative_diff(comm, expect));
      }
    return worst;
  }

  double antisymmetry_residual() const {
    double worst = 0.0;
    const Eigen::Index d = dimension();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
          worst = std::max(worst, std::abs(structure(i, j, k) + structure(j, i, k)));
    return worst;
  }

  double jacobi_residual() const {
    double worst = 0.0;
    const Eigen::Index d = dimension();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
          for (Eigen::Index m = 0; m < d; ++m) {
            S sum = 0;
            for (Eigen::Index l = 0; l < d; ++l)
              sum += structure(i, j, l) * structure(l, k, m) +
                     structure(j, k, l) * structure(l, i, m) +
                     structure(k, i, l) * structure(l, j, m);
            worst = std::max(worst, std::abs(sum));
          }
    return worst;
  }

 private:
  GroupModel() = default;

  void init_connected(std::vector<Mat<S>> basis, std::vector<S> structure,
                      const Tolerances& tol) {
    if (basis.empty())
      throw InvariantError("connected model '" + name_ + "' needs a non-empty basis");
    ambient_ = basis.front().rows();
    for (const auto& b : basis)
      if (b.rows() != ambient_ || b.cols() != ambient_)
        throw InvariantError("algebra basis of '" + name_ +
                             "' must consist of square matrices of equal size");
    basis_ = std::move(basis);
    const Eigen::Index d = dimension();
    flat_basis_.resize(ambient_ * ambient_, d);
    for (Eigen::Index i = 0; i < d; ++i)
      flat_basis_.col(i) = vectorize<S>(basis_[static_cast<std::size_t>(i)]);
    if (numerical_rank<S>(flat_basis_, 1e-12) != d)
      throw InvariantError("algebra basis of '" + name_ + "' is linearly dependent");
    pinv_ = Eigen::CompleteOrthogonalDecomposition<Mat<S>>(flat_basis_).pseudoInverse();

    if (structure.empty()) {
      structure.assign(static_cast<std::size_t>(d * d * d), S(0));
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
          const auto& xi = basis_[static_cast<std::size_t>(i)];
          const auto& xj = basis_[static_cast<std::size_t>(j)];
          Vec<S> c = coordinates(xi * xj - xj * xi, tol.basis);
          for (Eigen::Index k = 0; k < d; ++k)
            structure[static_cast<std::size_t>((i * d + j) * d + k)] = c(k);
        }
    }
    if (structure.size() != static_cast<std::size_t>(d * d * d))
      throw InvariantError("structure constants of '" + name_ + "' have wrong size");
    structure_ = std::move(structure);

    if (antisymmetry_residual() > tol.matrix)
      throw InvariantError("structure constants of '" + name_ + "' are not antisymmetric");
    if (jacobi_residual() > tol.matrix)
      throw InvariantError("structure constants of '" + name_ + "' violate Jacobi");
    if (bracket_residual() > tol.matrix)
      throw InvariantError("basis commutators of '" + name_ +
                           "' do not reproduce the structure constants");
  }

  void init_finite(std::vector<Mat<S>> generators, std::size_t cap,
                   const Tolerances& tol) {
    if (generators.empty())
      throw InvariantError("finite model '" + name_ + "' needs generators");
    ambient_ = generators.front().rows();
    for (const auto& g : generators) {
      if (g.rows() != ambient_ || g.cols() != ambient_)
        throw InvariantError("generators of '" + name_ + "' must be square of equal size");
      if (std::abs(g.determinant()) < 1e-12)
        throw InvariantError("generator of '" + name_ + "' is singular");
    }
    generators_ = std::move(generators);
    elements_.push_back(Mat<S>::Identity(ambient_, ambient_));
    parent_.push_back(0);
    last_generator_.push_back(0);
    for (std::size_t head = 0; head < elements_.size(); ++head) {
      for (std::size_t k = 0; k < generators_.size(); ++k) {
        Mat<S> next = elements_[head] * generators_[k];
        if (find_element(next, tol.matrix)) continue;
        if (elements_.size() >= cap)
          throw InvariantError("closure of '" + name_ + "' exceeds " +
                               std::to_string(cap) + " elements");
        elements_.push_back(std::move(next));
        parent_.push_back(head);
        last_generator_.push_back(k);
      }
    }
  }

  GroupKind kind_ = GroupKind::connected;
  std::string name_;
  Eigen::Index ambient_ = 0;
  bool orthogonal_ = false;
  bool simple_compact_ = false;
  std::vector<Mat<S>> basis_;
  std::vector<S> structure_;
  Mat<S> flat_basis_;
  Mat<S> pinv_;
  std::vector<Mat<S>> generators_;
  std::vector<Mat<S>> elements_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> last_generator_;
};

// ---------------------------------------------------------------------------
// Elements.

template <class S>
struct GroupElement {
  ModelPtr<S> model;
  Mat<S> matrix;

  static GroupElement identity(ModelPtr<S> m) {
    Eigen::Index n = m->ambient_size();
    return {std::move(m), Mat<S>::Identity(n, n)};
  }

  GroupElement operator*(const GroupElement& other) const {
    if (model != other.model)
      throw InvariantError("group elements belong to different models");
    return {model, matrix * other.matrix};
  }

  GroupElement inverse() const {
    if (std::abs(matrix.determinant()) < 1e-300)
      throw InvariantError("group element is singular");
    if (model->orthogonal()) return {model, matrix.adjoint()};
    return {model, matrix.inverse()};
  }

  /// |g^* g - I| for unitary/orthogonal models, 0 otherwise.
  double orthogonality_residual() const {
    if (!model->orthogonal()) return 0.0;
    Mat<S> id = Mat<S>::Identity(matrix.rows(), matrix.cols());
    return max_abs(Mat<S>(matrix.adjoint() * matrix - id));
  }
};

template <class S>
struct AlgebraElement {
  ModelPtr<S> model;
  Vec<S> coords;

  static AlgebraElement zero(ModelPtr<S> m) {
    Eigen::Index d = m->dimension();
    return {std::move(m), Vec<S>::Zero(d)};
  }
  static AlgebraElement basis_vector(ModelPtr<S> m, Eigen::Index i) {
    AlgebraElement a = zero(std::move(m));
    a.coords(i) = S(1);
    return a;
  }

  AlgebraElement operator+(const AlgebraElement& o) const {
    if (model != o.model) throw InvariantError("algebra elements belong to different models");
    return {model, coords + o.coords};
  }
  AlgebraElement operator-(const AlgebraElement& o) const {
    if (model != o.model) throw InvariantError("algebra elements belong to different models");
    return {model, coords - o.coords};
  }
  AlgebraElement operator-() const { return {model, -coords}; }
  AlgebraElement operator*(S s) const { return {model, s * coords}; }

  Mat<S> matrix() const { return model->realize(coords); }
};

template <class S>
struct TangentElement {
  AlgebraElement<S> algebra;
  GroupElement<S> group;

  static TangentElement identity(const ModelPtr<S>& m) {
    return {AlgebraElement<S>::zero(m), GroupElement<S>::identity(m)};
  }
};

// ---------------------------------------------------------------------------
// Operations.

namespace detail {
template <class S>
void require_connected(const GroupModel<S>& m, const char* what) {
  if (!m.is_connected())
    throw InvariantError(std::string(what) + " requires a connected matrix model, got '" +
                         m.name() + "'");
}
}  // namespace detail

/// Ad_g(a): coordinates of g A(a) g^-1. Finite groups have a zero algebra,
/// so the result there is the empty vector.
template <class S>
AlgebraElement<S> adjoint_group(const GroupElement<S>& g, const AlgebraElement<S>& a,
                                const Tolerances& tol = default_tolerances()) {
  if (g.model != a.model) throw InvariantError("adjoint_group: model mismatch");
  if (!g.model->is_connected()) return a;
  Mat<S> conj = g.matrix * a.matrix() * g.inverse().matrix;
  return {a.model, g.model->coordinates(conj, tol.basis)};
}

/// Matrix of Ad_g in the algebra basis (column j = Ad_g e_j).
template <class S>
Mat<S> adjoint_matrix(const GroupElement<S>& g, const Tolerances& tol = default_tolerances()) {
  const Eigen::Index d = g.model->dimension();
  Mat<S> out(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    out.col(j) = adjoint_group(g, AlgebraElement<S>::basis_vector(g.model, j), tol).coords;
  return out;
}

template <class S>
TangentElement<S> tangent_multiply(const TangentElement<S>& u, const TangentElement<S>& w,
                                   const Tolerances& tol = default_tolerances()) {
  if (u.group.model != w.group.model || u.algebra.model != u.group.model ||
      w.algebra.model != w.group.model)
    throw InvariantError("tangent_multiply: model mismatch");
  return {u.algebra + adjoint_group(u.group, w.algebra, tol), u.group * w.group};
}

template <class S>
TangentElement<S> tangent_inverse(const TangentElement<S>& u,
                                  const Tolerances& tol = default_tolerances()) {
  GroupElement<S> inv = u.group.inverse();
  return {-adjoint_group(inv, u.algebra, tol), inv};
}

/// exp(A) by scaling and squaring with a Taylor core.
template <class S>
Mat<S> matrix_exp(const Mat<S>& a) {
  const Eigen::Index n = a.rows();
  Mat<S> id = Mat<S>::Identity(n, n);
  if (n == 0) return id;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  Mat<S> scaled = a / std::pow(2.0, squarings);
  Mat<S> sum = id;
  Mat<S> term = id;
  for (int k = 1; k < 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
    if (max_abs(term) <= 1e-18 * max_abs(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

template <class S>
GroupElement<S> exp_curve(const AlgebraElement<S>& a, double t) {
  detail::require_connected(*a.model, "exp_curve");
  Mat<S> m = matrix_exp<S>(Mat<S>(a.matrix() * S(t)));
  return {a.model, std::move(m)};
}

/// Group element sampled as exp of a real Gaussian algebra element, or a
/// uniformly chosen element of a finite group.
template <class S>
GroupElement<S> random_group_element(const ModelPtr<S>& m, Rng& rng, double scale = 1.0) {
  if (!m->is_connected()) {
    std::uniform_int_distribution<std::size_t> pick(0, m->order() - 1);
    return {m, m->elements()[pick(rng)]};
  }
  Vec<S> c = random_real_vector(m->dimension(), rng).template cast<S>() * S(scale);
  return exp_curve(AlgebraElement<S>{m, c}, 1.0);
}

template <class S>
AlgebraElement<S> random_algebra_element(const ModelPtr<S>& m, Rng& rng) {
  return {m, random_vector<S>(m->dimension(), rng)};
}

/// Algebra element with real coordinates (keeps exp on a compact real form).
template <class S>
AlgebraElement<S> random_real_algebra_element(const ModelPtr<S>& m, Rng& rng) {
  return {m, random_real_vector(m->dimension(), rng).template cast<S>()};
}

template <class S>
TangentElement<S> random_tangent_element(const ModelPtr<S>& m, Rng& rng) {
  AlgebraElement<S> a = random_algebra_element(m, rng);
  GroupElement<S> g = random_group_element(m, rng);
  return {std::move(a), std::move(g)};
}

// ---------------------------------------------------------------------------
// Bundled models.

namespace models {

inline Mat<Real> so3_generator(int axis) {
  Mat<Real> m = Mat<Real>::Zero(3, 3);
  int i = (axis + 1) % 3;
  int j = (axis + 2) % 3;
  m(j, i) = 1.0;
  m(i, j) = -1.0;
  return m;
}

/// SO(2) with generator J = [[0, -1], [1, 0]].
template <class S>
ModelPtr<S> so2() {
  Mat<Real> j(2, 2);
  j << 0, -1, 1, 0;
  return GroupModel<S>::connected({"so2", {promote<S>(j)}, {}, true, false});
}

/// SO(3) with basis L_x, L_y, L_z, [L_x, L_y] = L_z cyclically.
template <class S>
ModelPtr<S> so3() {
  return GroupModel<S>::connected({"so3",
                                   {promote<S>(so3_generator(0)), promote<S>(so3_generator(1)),
                                    promote<S>(so3_generator(2))},
                                   {},
                                   true,
                                   true});
}

/// SU(2) with basis X_k = -(i/2) sigma_k, [X_1, X_2] = X_3 cyclically.
inline ModelPtr<Complex> su2() {
  const Complex i(0.0, 1.0);
  Mat<Complex> s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;
  const Complex f(0.0, -0.5);
  return GroupModel<Complex>::connected(
      {"su2", {Mat<Complex>(f * s1), Mat<Complex>(f * s2), Mat<Complex>(f * s3)}, {}, true, true});
}

/// Cyclic group of the given order acting on the plane by rotations.
template <class S>
ModelPtr<S> cyclic(int order) {
  if (order < 1) throw InvariantError("cyclic group order must be positive");
  const double th = 2.0 * std::numbers::pi / order;
  Mat<Real> r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return GroupModel<S>::finite({"cyclic" + std::to_string(order), {promote<S>(r)}});
}

}  // namespace models

}  // namespace tgact
