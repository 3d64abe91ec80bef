#include "mcgi/chain.hpp"

#include <numeric>
#include <queue>
#include <sstream>
#include <vector>

namespace mcgi {

Eigen::Index StateIndex::zero_based(Eigen::Index m) const {
  if (one_based_ < 1 || one_based_ > static_cast<std::size_t>(m)) {
    std::ostringstream msg;
    msg << "state index " << one_based_ << " outside [1, " << m << "]";
    throw Error(ErrorCode::IndexOutOfRange, msg.str());
  }
  return static_cast<Eigen::Index>(one_based_ - 1);
}

namespace {

// Reachability from state 0 over the support graph, forward (i -> j when
// p_ij > 0) or reversed. Returns the first state not reached, or -1.
Eigen::Index first_unreached(const Matrix& p, bool reverse) {
  const Eigen::Index m = p.rows();
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      const double w = reverse ? p(v, u) : p(u, v);
      if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        frontier.push(v);
      }
    }
  }
  for (Eigen::Index v = 0; v < m; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) return v;
  }
  return -1;
}

}  // namespace

TransitionMatrix TransitionMatrix::validate(const Matrix& raw, ValidateOptions options) {
  if (raw.rows() < 1 || raw.rows() != raw.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "transition matrix must be square and non-empty");
  }
  if (!all_finite(raw)) throw Error(ErrorCode::NonFinite, "transition matrix has a non-finite entry");

  Matrix p = raw;
  const Eigen::Index m = p.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (p(i, j) < 0.0 || (!options.normalize && p(i, j) > 1.0)) {
        std::ostringstream msg;
        msg << "row " << i + 1 << ": entry " << j + 1 << " = " << p(i, j) << " outside [0, 1]";
        throw Error(ErrorCode::NotStochastic, msg.str());
      }
    }
    const double sum = p.row(i).sum();
    if (options.normalize) {
      if (!(sum > 0.0)) {
        std::ostringstream msg;
        msg << "row " << i + 1 << " sums to " << sum << " and cannot be normalized";
        throw Error(ErrorCode::NotStochastic, msg.str());
      }
      p.row(i) /= sum;
    } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i + 1 << " sums to " << sum;
      throw Error(ErrorCode::NotStochastic, msg.str());
    }
  }

  if (const Eigen::Index v = first_unreached(p, false); v >= 0) {
    std::ostringstream msg;
    msg << "state " << v + 1 << " is unreachable from state 1";
    throw Error(ErrorCode::NotIrreducible, msg.str());
  }
  if (const Eigen::Index v = first_unreached(p, true); v >= 0) {
    std::ostringstream msg;
    msg << "state 1 is unreachable from state " << v + 1;
    throw Error(ErrorCode::NotIrreducible, msg.str());
  }
  return TransitionMatrix(std::move(p), options.normalize);
}

Matrix TransitionMatrix::kernel() const { return Matrix::Identity(size(), size()) - p_; }

StationaryVector::StationaryVector(const TransitionMatrix& p, Vector pi, std::string route)
    : pi_(std::move(pi)), route_(std::move(route)) {
  if (pi_.size() != p.size()) throw Error(ErrorCode::ShapeMismatch, "stationary vector length != m");
  if (!all_finite(pi_)) throw Error(ErrorCode::InvalidStationary, "non-finite stationary entry");
  if (!(pi_.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "stationary vector has non-positive entry " << pi_.minCoeff();
    throw Error(ErrorCode::InvalidStationary, msg.str());
  }
  if (std::abs(pi_.sum() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "stationary vector sums to " << pi_.sum();
    throw Error(ErrorCode::InvalidStationary, msg.str());
  }
  residual_ = max_abs(pi_.transpose() * p.kernel());
}

std::size_t period(const TransitionMatrix& p) {
  const Eigen::Index m = p.size();
  const Matrix& pm = p.matrix();
  std::vector<long> level(static_cast<std::size_t>(m), -1);
  std::queue<Eigen::Index> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      if (pm(u, v) > 0.0 && level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  // Every edge u -> v closes a walk through state 1 of length level[u] + 1 - level[v]
  // modulo the period; the gcd over all edges is the period.
  long g = 0;
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < m; ++v) {
      if (pm(u, v) > 0.0) {
        g = std::gcd(g, std::labs(level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)]));
      }
    }
  }
  return static_cast<std::size_t>(g == 0 ? 1 : g);
}

Vector ones_vector(Eigen::Index m) { return Vector::Ones(m); }

Vector unit_vector(Eigen::Index m, StateIndex i) {
  Vector v = Vector::Zero(m);
  v(i.zero_based(m)) = 1.0;
  return v;
}

Matrix ones_matrix(Eigen::Index m) { return Matrix::Ones(m, m); }

Matrix pi_matrix(const StationaryVector& pi) {
  return Vector::Ones(pi.size()) * pi.values().transpose();
}

Matrix big_d(const StationaryVector& pi) { return make_diag(pi.values().cwiseInverse()); }

Vector column_of(const TransitionMatrix& p, StateIndex a) {
  return p.matrix().col(a.zero_based(p.size()));
}

Vector row_of(const TransitionMatrix& p, StateIndex b) {
  return p.matrix().row(b.zero_based(p.size())).transpose();
}

}  // namespace mcgi
