#pragma once

// Stationary distribution from a g-inverse of I − P.
//
// Three families of routes: through A = I − (I−P)G (always usable, since
// A = α πᵀ), through B = I − G(I−P) (needs γ ≠ −1 or a (1,5) inverse), and
// directly from G when its multi-condition class or its (t, u) recipe is known.

#include <optional>

#include "mcgi/ginv.hpp"

namespace mcgi {

/// πᵀ = vᵀA / vᵀAe; without v, the first row of A with a usable sum
/// (row 1 directly for recipes known to be (1,3) or (1,5)).
StationaryVector pi_from_A(const TransitionMatrix& p, const GInverse& g,
                           const std::optional<Vector>& v = std::nullopt);

/// πᵀ ∝ eᵀAᵀA, cross-checked against eᵀA for (1,3) and row 1 of A for (1,5) inverses.
StationaryVector pi_from_A_symmetric(const TransitionMatrix& p, const GInverse& g);

/// πᵀ = vᵀBG / vᵀBGe (v defaults to e); rejects (1,2) inverses.
StationaryVector pi_from_B(const TransitionMatrix& p, const GInverse& g,
                           const std::optional<Vector>& v = std::nullopt);

/// πᵀ = row i of B, for (1,5) inverses only.
StationaryVector pi_from_B_15(const TransitionMatrix& p, const GInverse& g, StateIndex i);

/// Normalized column sums of G, for (1,4) inverses only; falls back to the A
/// route when the column sums vanish (γ = −1).
StationaryVector pi_from_G_14(const TransitionMatrix& p, const GInverse& g);

/// πᵀ = uᵀG / uᵀGe for G = [I − P + t uᵀ]⁻¹.
StationaryVector pi_from_tu(const TransitionMatrix& p, const GInverse& g);

/// Partitioned formula: (βᵀ(I − P₁₁)⁻¹, 1) normalized, with βᵀ the last row of P minus p_mm.
StationaryVector pi_rhode(const TransitionMatrix& p);

/// Default: row 1 of [I − P + e e₁ᵀ]⁻¹.
StationaryVector stationary(const TransitionMatrix& p);

}  // namespace mcgi
