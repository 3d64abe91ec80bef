#pragma once

// Generalized inverses of the Markovian kernel I − P.
//
// Every g-inverse handled here is either an explicit rank-one modification
// [I − P + t uᵀ]⁻¹ (the ten named families plus arbitrary t, u), one of the
// classical π-dependent inverses (fundamental matrix Z, group inverse A#,
// Moore–Penrose), the partitioned inverse that inverts only the leading
// (m−1)×(m−1) block, or a user-supplied matrix that passes condition 1.
//
// Any such G is uniquely described by (α, β, γ) with
//   G = [I − P + α βᵀ]⁻¹ + γ e πᵀ,   πᵀα = 1,  βᵀe = 1,
// and α = A e, βᵀ = πᵀ B where A = I − (I−P)G and B = I − G(I−P).

#include <array>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mcgi/chain.hpp"

namespace mcgi {

/// The ten rank-one families [I − P + t uᵀ]⁻¹ with simple t and u.
enum class TableId { ee, eb_r, eb, ae_c, ab_cr, ab_c, ae, ab_r, ab, tb_c };

inline constexpr TableId kAllTableIds[] = {TableId::ee,    TableId::eb_r, TableId::eb, TableId::ae_c,
                                           TableId::ab_cr, TableId::ab_c, TableId::ae, TableId::ab_r,
                                           TableId::ab,    TableId::tb_c};

std::string_view to_string(TableId id);
std::optional<TableId> parse_table_id(std::string_view name);
bool uses_a(TableId id);
bool uses_b(TableId id);

struct TableFamily {
  TableId id;
  std::optional<StateIndex> a;
  std::optional<StateIndex> b;
};
struct Fundamental {};
struct GroupInverse {};
struct MoorePenrose {};
/// Inverts the leading block with state m deleted; zero last row and column.
struct Rhode {};
struct CustomTU {
  Vector t;
  Vector u;
};
struct CustomMatrix {
  Matrix g;
};

using GInvRecipe =
    std::variant<TableFamily, Fundamental, GroupInverse, MoorePenrose, Rhode, CustomTU, CustomMatrix>;

std::string describe(const GInvRecipe& recipe);
bool needs_pi(const GInvRecipe& recipe);

struct GInverse {
  Matrix g;
  GInvRecipe recipe;
  /// Present only when g is exactly [I − P + t uᵀ]⁻¹.
  std::optional<Vector> t_used;
  std::optional<Vector> u_used;
};

struct GInvParams {
  Vector alpha;
  Vector beta;
  double gamma = 0.0;
};

struct ConditionProfile {
  std::array<bool, 5> holds{};
  std::array<double, 5> residuals{};
  double tolerance = 0.0;

  bool cond(int j) const { return holds.at(static_cast<std::size_t>(j - 1)); }
  /// Indices of the conditions that hold, e.g. {1, 2, 5}.
  std::vector<int> satisfied() const;
};

struct Classification {
  bool a12 = false;
  bool a13 = false;
  bool a14 = false;
  bool a15 = false;

  /// Condition labels implied by the flags, always including 1.
  std::set<int> labels() const;
};

inline constexpr double kConditionTolerance = 1e-8;
inline constexpr double kClassifyTolerance = 1e-7;
inline constexpr double kInvarianceTolerance = 1e-8;

/// The (t, u) pair of a table recipe; indices are checked against m.
std::pair<Vector, Vector> table_vectors(const TransitionMatrix& p, const TableFamily& family);

GInverse build(const TransitionMatrix& p, const GInvRecipe& recipe,
               const std::optional<StationaryVector>& pi = std::nullopt,
               double condition_tol = kConditionTolerance);

ConditionProfile check_conditions(const TransitionMatrix& p, const Matrix& g,
                                  double tol = kConditionTolerance);

/// A = I − (I−P)G
Matrix a_matrix(const TransitionMatrix& p, const Matrix& g);
/// B = I − G(I−P)
Matrix b_matrix(const TransitionMatrix& p, const Matrix& g);

/// First row r (0-based) of A whose row sum is non-negligible.
Eigen::Index first_nonzero_row(const Matrix& a);

/// π from the first usable row of A = α πᵀ (every usable row is a multiple of πᵀ).
Vector pi_by_row_scan(const Matrix& a);

/// (α, β, γ) of any g-inverse; π is recovered from A internally.
GInvParams extract_params(const TransitionMatrix& p, const Matrix& g);
inline GInvParams extract_params(const TransitionMatrix& p, const GInverse& g) {
  return extract_params(p, g.g);
}

Classification classify(const GInvParams& params, const StationaryVector& pi,
                        double tol = kClassifyTolerance);

/// [I − P + t uᵀ]⁻¹ from any g-inverse without a new factorization.
Matrix convert(const Matrix& g, const Vector& t, const Vector& u, const StationaryVector& pi);

/// [I − P + δ t uᵀ]⁻¹ − e πᵀ / (δ (πᵀt)(uᵀe)), checked equal across all δ; returns the δ = 1 value.
Matrix delta_invariant(const TransitionMatrix& p, const Vector& t, const Vector& u,
                       const StationaryVector& pi, const std::vector<double>& deltas,
                       double tol = kInvarianceTolerance);

/// (I − Π) G (I − Π), which is the group inverse for every g-inverse G.
Matrix group_inverse_via_invariance(const Matrix& g, const StationaryVector& pi);

}  // namespace mcgi
