#include "mcgi/occupation.hpp"

#include <sstream>

namespace mcgi {

namespace {

void require_horizon(unsigned long n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "horizon n must be >= 1");
}

void require_aperiodic(const TransitionMatrix& p) {
  if (const std::size_t d = period(p); d > 1) {
    std::ostringstream msg;
    msg << "chain has period " << d << "; Pⁿ does not converge";
    throw Error(ErrorCode::PeriodicChain, msg.str());
  }
}

}  // namespace

std::string_view to_string(OccupationRoute route) {
  switch (route) {
    case OccupationRoute::Explicit: return "explicit";
    case OccupationRoute::ClosedLeft: return "closed_left";
    case OccupationRoute::ClosedRight: return "closed_right";
  }
  return "unknown";
}

OccupationResult occupation_explicit(const TransitionMatrix& p, unsigned long n) {
  require_horizon(n);
  const Eigen::Index m = p.size();
  Matrix power = Matrix::Identity(m, m);
  Matrix sum = power;
  for (unsigned long k = 1; k < n; ++k) {
    power = power * p.matrix();
    sum += power;
  }
  return {n, std::move(sum), OccupationRoute::Explicit};
}

OccupationResult occupation_closed(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                                   unsigned long n, Side side) {
  require_horizon(n);
  const Eigen::Index m = p.size();
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  const Matrix id = Matrix::Identity(m, m);
  const Matrix big_pi = pi_matrix(pi);
  const Matrix tail = id - mat_power(p.matrix(), n);
  const double scale = static_cast<double>(n);
  if (side == Side::Left) {
    return {n, scale * big_pi + (id - big_pi) * g * tail, OccupationRoute::ClosedLeft};
  }
  return {n, scale * big_pi + tail * g * (id - big_pi), OccupationRoute::ClosedRight};
}

Matrix occupation_asymptotic(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                             unsigned long n) {
  require_aperiodic(p);
  return static_cast<double>(n) * pi_matrix(pi) + group_inverse_via_invariance(g, pi);
}

Matrix expected_visits_asymptotic(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                                  unsigned long n) {
  require_aperiodic(p);
  return static_cast<double>(n + 1) * pi_matrix(pi) + group_inverse_via_invariance(g, pi);
}

}  // namespace mcgi
