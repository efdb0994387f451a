#pragma once

// Dense linear-algebra helpers shared by every module: matrix aliases,
// tolerance handling, nullspaces, vectorization and seeded sampling.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace tgact {

using Real = double;
using Complex = std::complex<double>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
inline constexpr bool is_complex_v = !std::is_same_v<S, Real>;

template <class S>
constexpr const char* field_name() {
  return is_complex_v<S> ? "complex" : "real";
}

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A declared invariant of a value failed to hold (bad model, non-equivariant
/// map, malformed matrix shape, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// The operation is well-posed but deliberately unsupported for this input.
class RefusedError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances.

struct Tolerances {
  double matrix = 1e-9;      // relative max-abs equality of matrices
  double basis = 1e-9;       // residual of re-expression in an algebra basis
  double nullspace = 1e-9;   // singular-value cut, relative to the largest
  double sample = 1e-8;      // sampled identities on manifolds
  double fd = 1e-6;          // finite-difference comparisons
  double fd_step = 1e-4;
  double det = 1e-8;         // normalized determinant threshold
};

inline Tolerances& default_tolerances() {
  static Tolerances tol;
  return tol;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// max|a - b| relative to max(1, |a|, |b|).
template <class DA, class DB>
double relative_diff(const Eigen::MatrixBase<DA>& a,
                     const Eigen::MatrixBase<DB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  double scale = std::max({1.0, max_abs(a), max_abs(b)});
  return max_abs(a - b) / scale;
}

template <class DA, class DB>
bool approx_equal(const Eigen::MatrixBase<DA>& a,
                  const Eigen::MatrixBase<DB>& b, double tol) {
  return relative_diff(a, b) <= tol;
}

// ---------------------------------------------------------------------------
// Nullspaces and ranks by singular-value thresholding.

/// Orthonormal basis (as columns) of the nullspace of `m`. Singular values
/// at or below `rel_tol * sigma_max` count as zero.
template <class S>
Mat<S> nullspace(const Mat<S>& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Mat<S>(0, 0);
  if (m.rows() == 0 || max_abs(m) == 0.0) return Mat<S>::Identity(n, n);
  Eigen::JacobiSVD<Mat<S>, Eigen::ColPivHouseholderQRPreconditioner> svd(
      m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

template <class S>
Eigen::Index numerical_rank(const Mat<S>& m, double rel_tol) {
  if (m.size() == 0 || max_abs(m) == 0.0) return 0;
  Eigen::JacobiSVD<Mat<S>, Eigen::ColPivHouseholderQRPreconditioner> svd(m);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return rank;
}

/// Ratio of largest to smallest singular value; infinity when rank-deficient.
template <class S>
double condition_number(const Mat<S>& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat<S>> svd(m);
  const auto& sv = svd.singularValues();
  double lo = sv(sv.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / lo;
}

/// Orthonormal basis of the column span of `m`.
template <class S>
Mat<S> column_span(const Mat<S>& m, double rel_tol) {
  if (m.cols() == 0 || m.rows() == 0 || max_abs(m) == 0.0)
    return Mat<S>(m.rows(), 0);
  Eigen::JacobiSVD<Mat<S>> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Least-squares solution of a x = b together with the relative residual.
template <class S>
struct LeastSquares {
  Vec<S> x;
  double residual = 0.0;
};

template <class S>
LeastSquares<S> solve_least_squares(const Mat<S>& a, const Vec<S>& b) {
  LeastSquares<S> out;
  if (a.cols() == 0) {
    out.x = Vec<S>(0);
    out.residual = max_abs(b) / std::max(1.0, max_abs(b));
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat<S>> cod(a);
  out.x = cod.solve(b);
  out.residual = relative_diff(a * out.x, b);
  return out;
}

// ---------------------------------------------------------------------------
// Vectorization (column-major): vec(A X B) = (B^T kron A) vec(X).

template <class S>
Mat<S> kron(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class S>
Vec<S> vectorize(const Mat<S>& m) {
  return Eigen::Map<const Vec<S>>(m.data(), m.size());
}

template <class S>
Mat<S> unvectorize(const Vec<S>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat<S>>(v.data(), rows, cols);
}

template <class S>
Mat<S> block_diagonal(const std::vector<Mat<S>>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Mat<S> out = Mat<S>::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

template <class S>
Mat<S> vstack(const Mat<S>& top, const Mat<S>& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  Mat<S> out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

template <class S>
Mat<S> hstack(const Mat<S>& left, const Mat<S>& right) {
  Mat<S> out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

// ---------------------------------------------------------------------------
// Seeded sampling.

template <class S>
S random_scalar(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if constexpr (is_complex_v<S>) {
    double re = normal(rng);
    double im = normal(rng);
    return S(re, im);
  } else {
    return normal(rng);
  }
}

template <class S>
Mat<S> random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat<S> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = random_scalar<S>(rng);
  return m;
}

template <class S>
Vec<S> random_vector(Eigen::Index n, Rng& rng) {
  Vec<S> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = random_scalar<S>(rng);
  return v;
}

/// Real Gaussian vector regardless of field; used for real-valued
/// parameters (times, manifold points, real algebra coordinates).
inline Vec<Real> random_real_vector(Eigen::Index n, Rng& rng) {
  return random_vector<Real>(n, rng);
}

template <class S>
Mat<S> promote(const Mat<Real>& m) {
  return m.template cast<S>();
}

}  // namespace tgact
