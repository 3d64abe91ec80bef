#pragma once

// Dense real-matrix substrate. Storage and arithmetic are Eigen's; this header
// adds the pieces the rest of the library relies on with a fixed contract:
// a partial-pivoting LU that refuses near-singular input with a scale-relative
// threshold, finite-checked solves/inverses, integer powers and the diagonal /
// rank-one helpers used throughout the passage-time formulas.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <sstream>

#include "mcgi/error.hpp"

namespace mcgi {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Relative pivot threshold: a pivot below this times the largest |a_ij| is singular.
inline constexpr double kSingularityThreshold = 1e-12;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.derived().array().isFinite().all();
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? typename Derived::Scalar(0) : x.cwiseAbs().maxCoeff();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar max_abs_diff(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "max_abs_diff: operands differ in shape");
  }
  return max_abs(a - b);
}

namespace detail {
template <typename Derived>
void require_usable(const Eigen::MatrixBase<Derived>& a, const char* op) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": empty matrix");
  }
  if (!all_finite(a)) {
    throw Error(ErrorCode::NonFinite, std::string(op) + ": non-finite entry");
  }
}
}  // namespace detail

/// PLU factorization with partial pivoting.
template <typename Scalar>
class LuFactor {
 public:
  using MatrixType = MatrixX<Scalar>;

  template <typename Derived>
  explicit LuFactor(const Eigen::MatrixBase<Derived>& a) {
    detail::require_usable(a, "lu_factor");
    if (a.rows() != a.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "lu_factor: matrix is not square");
    }
    scale_ = max_abs(a);
    lu_.compute(MatrixType(a));
    const auto pivots = lu_.matrixLU().diagonal().cwiseAbs();
    min_pivot_ = pivots.minCoeff();
    if (!(min_pivot_ >= Scalar(kSingularityThreshold) * scale_) || scale_ == Scalar(0)) {
      std::ostringstream msg;
      msg << "pivot magnitude " << min_pivot_ << " below " << kSingularityThreshold
          << " x scale " << scale_;
      throw Error(ErrorCode::SingularMatrix, msg.str());
    }
  }

  Eigen::Index size() const { return lu_.rows(); }
  Scalar min_pivot() const { return min_pivot_; }
  Scalar determinant() const { return lu_.determinant(); }

  template <typename Derived>
  MatrixType solve(const Eigen::MatrixBase<Derived>& rhs) const {
    if (rhs.rows() != size()) {
      throw Error(ErrorCode::ShapeMismatch, "solve: right-hand side row count mismatch");
    }
    MatrixType x = lu_.solve(MatrixType(rhs));
    if (!all_finite(x)) throw Error(ErrorCode::NonFinite, "solve: non-finite solution");
    return x;
  }

  /// Solves xᵀ a = rhsᵀ, i.e. aᵀ x = rhs, reusing the factorization.
  template <typename Derived>
  MatrixType solve_transposed(const Eigen::MatrixBase<Derived>& rhs) const {
    if (rhs.rows() != size()) {
      throw Error(ErrorCode::ShapeMismatch, "solve_transposed: row count mismatch");
    }
    MatrixType x = lu_.transpose().solve(MatrixType(rhs));
    if (!all_finite(x)) throw Error(ErrorCode::NonFinite, "solve: non-finite solution");
    return x;
  }

  MatrixType inverse() const { return solve(MatrixType::Identity(size(), size())); }

 private:
  Eigen::PartialPivLU<MatrixType> lu_;
  Scalar scale_{};
  Scalar min_pivot_{};
};

template <typename Derived>
LuFactor<typename Derived::Scalar> lu_factor(const Eigen::MatrixBase<Derived>& a) {
  return LuFactor<typename Derived::Scalar>(a);
}

template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> solve(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& rhs) {
  return lu_factor(a).solve(rhs);
}

template <typename Derived>
MatrixX<typename Derived::Scalar> inverse(const Eigen::MatrixBase<Derived>& a) {
  return lu_factor(a).inverse();
}

/// aⁿ by repeated squaring; a⁰ = I.
template <typename Derived>
MatrixX<typename Derived::Scalar> mat_power(const Eigen::MatrixBase<Derived>& a, unsigned long n) {
  using M = MatrixX<typename Derived::Scalar>;
  detail::require_usable(a, "mat_power");
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "mat_power: not square");
  M result = M::Identity(a.rows(), a.cols());
  M base = a;
  while (n > 0) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  if (!all_finite(result)) throw Error(ErrorCode::NonFinite, "mat_power: overflow");
  return result;
}

/// X_d: keeps the diagonal, zeroes everything else.
template <typename Derived>
MatrixX<typename Derived::Scalar> diag_of(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "diag_of: not square");
  MatrixX<typename Derived::Scalar> d = MatrixX<typename Derived::Scalar>::Zero(a.rows(), a.cols());
  d.diagonal() = a.diagonal();
  return d;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> make_diag(const Eigen::MatrixBase<Derived>& v) {
  if (v.cols() != 1 || v.rows() < 1) throw Error(ErrorCode::ShapeMismatch, "make_diag: not a vector");
  MatrixX<typename Derived::Scalar> d = MatrixX<typename Derived::Scalar>::Zero(v.rows(), v.rows());
  d.diagonal() = v;
  return d;
}

/// Outer product t uᵀ.
template <typename DerivedT, typename DerivedU>
MatrixX<typename DerivedT::Scalar> rank1(const Eigen::MatrixBase<DerivedT>& t,
                                         const Eigen::MatrixBase<DerivedU>& u) {
  if (t.cols() != 1 || u.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "rank1: not vectors");
  return t * u.transpose();
}

}  // namespace mcgi
