#pragma once

// First passage time moments of an irreducible chain from any g-inverse G
// of I − P. M is unique even though G is not; every formula below can be
// fed any recipe and must return the same M and M⁽²⁾.

#include <optional>
#include <string>
#include <utility>

#include "mcgi/ginv.hpp"

namespace mcgi {

struct PassageMoments {
  Matrix m1;                 // mean first passage times (steps)
  std::optional<Matrix> m2;  // second moments (steps²)
  std::optional<Matrix> var;
  Matrix d;                  // D = M_d = diag(1/π_j)
  std::string route;
  /// Set when a variance in [−tolerance, 0) was reported as 0.
  bool variance_clamped = false;
};

/// Full M from the elemental form m_ij = (g_jj − g_ij + δ_ij)/π_j + (g_i• − g_j•).
Matrix mfpt(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi);

/// Row-sum spread of G: max_i (G e)_i − min_i (G e)_i.
double row_sum_spread(const Matrix& g);

/// Truth values of the three equivalent conditions for the short M formula:
/// (i) Ge = g e, (ii) GE − E(GΠ)_d D = 0, (iii) GΠ − E(GΠ)_d = 0.
std::array<bool, 3> ge_conditions(const Matrix& g, const StationaryVector& pi, double tol = 1e-8);

/// M = [I − G + E G_d] D, valid only when G has constant row sums.
Matrix mfpt_ge_condition(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                         double tol = 1e-8);

/// π and M together from the first usable row of A and the entries of G.
std::pair<StationaryVector, Matrix> mfpt_joint(const TransitionMatrix& p, const GInverse& g);

/// π = row b of G_eb and M = (δ_ij + g_jj − g_ij)/g_bj from a single inverse.
std::pair<StationaryVector, Matrix> mfpt_geb(const TransitionMatrix& p, StateIndex b);

/// Which single-inverse formula produces column j of M without π.
enum class ColumnVariant {
  ColumnUpdate,  // [I − P + p_j^(c) e_jᵀ]⁻¹: m_ij = g_i•
  RowUpdate,     // [I − P + e_j p_j^(r)ᵀ]⁻¹: m_jj = Σ_k p_jk g_k•, m_ij = g_i• − 1
  Elementary,    // [I − P + e_j e_jᵀ]⁻¹:     m_jj = g_j•, m_ij = g_i• − g_j•
};

Vector mfpt_column(const TransitionMatrix& p, StateIndex j, ColumnVariant variant);

struct DiagonalSecondMoments {
  /// m_jj^(2) from D + 2D{(I−Π)G(I−Π)}_d D.
  Vector values;
  /// max relative gap to 2D(ΠM)_d − D when M was supplied.
  std::optional<double> check_gap;
};

DiagonalSecondMoments m2_diag(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                              const std::optional<Matrix>& m1 = std::nullopt);

/// Full M⁽²⁾ from any g-inverse and M; the Ge = ge shortcut is used when it applies.
Matrix m2(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi, const Matrix& m1,
          std::string* route = nullptr);

/// One inverse and one matrix square give M, M⁽²⁾ and the variances.
PassageMoments m2_geb(const TransitionMatrix& p, StateIndex b);

/// α_j = Σ_i π_i m_ij directly from G.
Vector alpha_vector(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi);

/// var = M⁽²⁾ − M∘M with values in [−tol·max(1, m2_ij), 0) reported as 0.
Matrix variances(const Matrix& m1, const Matrix& m2, bool* clamped = nullptr);

/// Full moments by the general formulas for an arbitrary g-inverse.
PassageMoments moments(const TransitionMatrix& p, const GInverse& g, const StationaryVector& pi);

}  // namespace mcgi
