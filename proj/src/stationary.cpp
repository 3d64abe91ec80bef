#include "mcgi/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcgi {

namespace {

// Infinity-norm of a matrix (max absolute row sum).
double norm_inf(const Matrix& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

bool known_13_or_15(const GInvRecipe& recipe) {
  return std::holds_alternative<Fundamental>(recipe) || std::holds_alternative<GroupInverse>(recipe) ||
         std::holds_alternative<MoorePenrose>(recipe);
}

void require_square(const TransitionMatrix& p, const Matrix& g) {
  if (g.rows() != p.size() || g.cols() != p.size()) {
    throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  }
}

Classification classify_self_contained(const TransitionMatrix& p, const Matrix& g,
                                       GInvParams* params_out = nullptr) {
  GInvParams params = extract_params(p, g);
  const StationaryVector pi(p, pi_by_row_scan(a_matrix(p, g)), "row scan of A");
  const Classification c = classify(params, pi);
  if (params_out) *params_out = std::move(params);
  return c;
}

}  // namespace

StationaryVector pi_from_A(const TransitionMatrix& p, const GInverse& g, const std::optional<Vector>& v) {
  require_square(p, g.g);
  const Matrix a = a_matrix(p, g.g);
  if (v) {
    if (v->size() != p.size()) throw Error(ErrorCode::ShapeMismatch, "v must have length m");
    const Vector va = (v->transpose() * a).transpose();
    const double denom = va.sum();
    if (!(std::abs(denom) >= 1e-10 * max_abs(*v) * norm_inf(a))) {
      std::ostringstream msg;
      msg << "vᵀAe = " << denom << " is numerically zero";
      throw Error(ErrorCode::ZeroProjection, msg.str());
    }
    return StationaryVector(p, va / denom, "A: v'A / v'Ae");
  }
  if (known_13_or_15(g.recipe)) {
    // α₁ ≠ 0 is guaranteed for (1,3) and (1,5) inverses.
    return StationaryVector(p, a.row(0).transpose() / a.row(0).sum(), "A: first row");
  }
  const Eigen::Index r = first_nonzero_row(a);
  return StationaryVector(p, a.row(r).transpose() / a.row(r).sum(),
                          "A: row scan (row " + std::to_string(r + 1) + ")");
}

StationaryVector pi_from_A_symmetric(const TransitionMatrix& p, const GInverse& g) {
  require_square(p, g.g);
  const Matrix a = a_matrix(p, g.g);
  const Vector alpha = a.rowwise().sum();
  // eᵀAᵀA = αᵀA, with denominator αᵀα > 0.
  const Vector raw = (alpha.transpose() * a).transpose();
  StationaryVector pi(p, raw / raw.sum(), "A: e'A'A / e'A'Ae");

  const Classification c = classify(extract_params(p, g.g), pi);
  if (c.a13) {
    const Vector via_ea = a.colwise().sum().transpose() / a.sum();
    const double gap = max_abs_diff(via_ea, pi.values());
    if (gap > kInvarianceTolerance) {
      std::ostringstream msg;
      msg << "(1,3) route e'A/e'Ae differs by " << gap;
      throw Error(ErrorCode::RouteDisagreement, msg.str());
    }
  }
  if (c.a15) {
    const double gap = max_abs_diff(Vector(a.row(0).transpose()), pi.values());
    if (gap > kInvarianceTolerance) {
      std::ostringstream msg;
      msg << "(1,5) route e_1'A differs by " << gap;
      throw Error(ErrorCode::RouteDisagreement, msg.str());
    }
  }
  return pi;
}

StationaryVector pi_from_B(const TransitionMatrix& p, const GInverse& g, const std::optional<Vector>& v) {
  require_square(p, g.g);
  const GInvParams params = extract_params(p, g.g);
  if (std::abs(params.gamma + 1.0) < kClassifyTolerance) {
    std::ostringstream msg;
    msg << "gamma = " << params.gamma << ": (1,2) inverses give vᵀBG = 0";
    throw Error(ErrorCode::Gamma2Inverse, msg.str());
  }
  const Vector vv = v ? *v : ones_vector(p.size());
  if (vv.size() != p.size()) throw Error(ErrorCode::ShapeMismatch, "v must have length m");
  if (!(std::abs(vv.sum()) > 1e-12 * max_abs(vv))) {
    throw Error(ErrorCode::ZeroProjection, "vᵀe is numerically zero");
  }
  const Vector raw = (vv.transpose() * b_matrix(p, g.g) * g.g).transpose();
  return StationaryVector(p, raw / raw.sum(), "B: v'BG / v'BGe");
}

StationaryVector pi_from_B_15(const TransitionMatrix& p, const GInverse& g, StateIndex i) {
  require_square(p, g.g);
  const Eigen::Index row = i.zero_based(p.size());
  if (!classify_self_contained(p, g.g).a15) {
    throw Error(ErrorCode::Not15Inverse, describe(g.recipe) + " is not a (1,5) g-inverse");
  }
  const Matrix b = b_matrix(p, g.g);
  return StationaryVector(p, b.row(row).transpose(), "B: row " + std::to_string(i.one_based()));
}

StationaryVector pi_from_G_14(const TransitionMatrix& p, const GInverse& g) {
  require_square(p, g.g);
  if (!classify_self_contained(p, g.g).a14) {
    throw Error(ErrorCode::Not14Inverse, describe(g.recipe) + " is not a (1,4) g-inverse");
  }
  // e'G = m(1 + γ)π' for a (1,4) inverse, so a (1,2,4) inverse such as
  // Moore–Penrose has vanishing column sums and only the A route is left.
  const Vector col_sums = g.g.colwise().sum().transpose();
  if (std::abs(col_sums.sum()) <= kClassifyTolerance * std::max(1.0, max_abs(g.g))) {
    const Vector pi = pi_by_row_scan(a_matrix(p, g.g));
    return StationaryVector(p, pi, "A: row scan (e'Ge = 0 for a (1,2,4) inverse)");
  }
  return StationaryVector(p, col_sums / col_sums.sum(), "G: column sums e'G / e'Ge");
}

StationaryVector pi_from_tu(const TransitionMatrix& p, const GInverse& g) {
  require_square(p, g.g);
  if (!g.t_used || !g.u_used) {
    throw Error(ErrorCode::NoRecipeVectors,
                describe(g.recipe) + " is not of the form [I-P+tu']^-1 with known t, u");
  }
  const Vector& u = *g.u_used;
  const Eigen::Index m = p.size();

  const auto* family = std::get_if<TableFamily>(&g.recipe);
  const bool u_is_e = family ? (family->id == TableId::ee || family->id == TableId::ae_c ||
                                family->id == TableId::ae)
                             : false;
  const bool u_is_unit = family ? (family->id == TableId::eb || family->id == TableId::ab_c ||
                                   family->id == TableId::ab || family->id == TableId::tb_c)
                                : false;
  // πᵀt = 1 makes uᵀGe = 1: t = e, and t_b for the column-replacement family.
  const bool unit_denominator =
      (family && (family->id == TableId::ee || family->id == TableId::eb_r ||
                  family->id == TableId::eb || family->id == TableId::tb_c)) ||
      std::holds_alternative<Fundamental>(g.recipe);

  if (u_is_unit) {
    const Eigen::Index b = family->b->zero_based(m);
    const Vector row = g.g.row(b).transpose();
    if (unit_denominator) return StationaryVector(p, row, "G: pi_j = g_bj");
    return StationaryVector(p, row / row.sum(), "G: pi_j = g_bj / g_b.");
  }
  if (u_is_e) {
    const Vector col_sums = g.g.colwise().sum().transpose();
    if (unit_denominator) return StationaryVector(p, col_sums, "G: pi_j = g_.j");
    return StationaryVector(p, col_sums / col_sums.sum(), "G: pi_j = g_.j / g_..");
  }
  const Vector raw = (u.transpose() * g.g).transpose();
  if (unit_denominator) return StationaryVector(p, raw, "G: pi' = u'G");
  return StationaryVector(p, raw / raw.sum(), "G: pi' = u'G / u'Ge");
}

StationaryVector pi_rhode(const TransitionMatrix& p) {
  const Eigen::Index m = p.size();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "partitioned formula needs m >= 2");
  const Eigen::Index k = m - 1;
  const Matrix lead = Matrix::Identity(k, k) - p.matrix().topLeftCorner(k, k);
  const Vector beta = p.matrix().row(k).head(k).transpose();
  // xᵀ = βᵀ(I − P₁₁)⁻¹  ⇔  (I − P₁₁)ᵀ x = β
  const Vector x = lu_factor(lead).solve_transposed(beta);
  Vector raw(m);
  raw.head(k) = x;
  raw(k) = 1.0;
  return StationaryVector(p, raw / raw.sum(), "partitioned (I-P11)^-1");
}

StationaryVector stationary(const TransitionMatrix& p) {
  return pi_from_tu(p, build(p, TableFamily{TableId::eb, std::nullopt, StateIndex(1)}));
}

}  // namespace mcgi
