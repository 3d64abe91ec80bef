#pragma once

// Expected occupation counts A_n = Σ_{k=0}^{n−1} Pᵏ: entry (i, j) is the
// expected number of visits to j among times 0..n−1 starting from i.

#include "mcgi/ginv.hpp"

namespace mcgi {

enum class OccupationRoute { Explicit, ClosedLeft, ClosedRight };

enum class Side { Left, Right };

struct OccupationResult {
  unsigned long n = 0;
  Matrix a_n;
  OccupationRoute route = OccupationRoute::Explicit;
};

std::string_view to_string(OccupationRoute route);

/// Literal power sum by iterated multiplication.
OccupationResult occupation_explicit(const TransitionMatrix& p, unsigned long n);

/// nΠ + (I − Π)G(I − Pⁿ) (left) or nΠ + (I − Pⁿ)G(I − Π) (right), for any g-inverse G.
OccupationResult occupation_closed(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                                   unsigned long n, Side side);

/// nΠ + A#, the large-n approximation of A_n; aperiodic chains only.
Matrix occupation_asymptotic(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                             unsigned long n);

/// (n + 1)Π + A#, the large-n approximation of the expected visit counts over times 0..n.
Matrix expected_visits_asymptotic(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                                  unsigned long n);

}  // namespace mcgi
