#pragma once

#include <cstddef>
#include <string>

#include "mcgi/linalg.hpp"

namespace mcgi {

/// 1-based state index, as used at every public interface.
class StateIndex {
 public:
  explicit StateIndex(std::size_t one_based) : one_based_(one_based) {}

  std::size_t one_based() const { return one_based_; }
  /// Throws IndexOutOfRange unless 1 <= index <= m.
  Eigen::Index zero_based(Eigen::Index m) const;

  friend bool operator==(StateIndex, StateIndex) = default;

 private:
  std::size_t one_based_;
};

inline constexpr double kRowSumTolerance = 1e-12;

struct ValidateOptions {
  /// Rescale each row to sum to one instead of rejecting row-sum drift.
  bool normalize = false;
};

/// Row-stochastic transition matrix of an irreducible finite chain.
class TransitionMatrix {
 public:
  static TransitionMatrix validate(const Matrix& p, ValidateOptions options = {});

  Eigen::Index size() const { return p_.rows(); }
  const Matrix& matrix() const { return p_; }
  /// I - P
  Matrix kernel() const;
  bool was_normalized() const { return normalized_; }

 private:
  TransitionMatrix(Matrix p, bool normalized) : p_(std::move(p)), normalized_(normalized) {}

  Matrix p_;
  bool normalized_ = false;
};

/// Stationary distribution πᵀ(I−P) = 0ᵀ, πᵀe = 1, strictly positive.
class StationaryVector {
 public:
  /// Validates positivity and normalisation, records ‖πᵀ(I−P)‖_max.
  StationaryVector(const TransitionMatrix& p, Vector pi, std::string route = {});

  const Vector& values() const { return pi_; }
  double operator()(Eigen::Index j) const { return pi_(j); }
  Eigen::Index size() const { return pi_.size(); }
  double residual() const { return residual_; }
  const std::string& route() const { return route_; }

 private:
  Vector pi_;
  double residual_ = 0.0;
  std::string route_;
};

/// gcd of the cycle lengths through state 1; 1 means aperiodic.
std::size_t period(const TransitionMatrix& p);

Vector ones_vector(Eigen::Index m);
Vector unit_vector(Eigen::Index m, StateIndex i);
/// E = e eᵀ
Matrix ones_matrix(Eigen::Index m);
/// Π = e πᵀ
Matrix pi_matrix(const StationaryVector& pi);
/// D = diag(1/π_i) = (Π_d)⁻¹
Matrix big_d(const StationaryVector& pi);

/// Column a of P, p_a^(c) = P e_a.
Vector column_of(const TransitionMatrix& p, StateIndex a);
/// Row b of P as a column vector, p_b^(r) = Pᵀ e_b.
Vector row_of(const TransitionMatrix& p, StateIndex b);

}  // namespace mcgi
