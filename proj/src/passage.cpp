#include "mcgi/passage.hpp"

#include <sstream>

namespace mcgi {

namespace {

void require_square(const Matrix& g, Eigen::Index m) {
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
}

bool has_constant_row_sums(const Matrix& g, double tol) {
  const Vector gs = g.rowwise().sum();
  return row_sum_spread(g) <= tol * std::max(1.0, max_abs(gs));
}

}  // namespace

Matrix mfpt(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi) {
  const Eigen::Index m = p.size();
  require_square(g, m);
  const Vector gs = g.rowwise().sum();
  const Vector& v = pi.values();
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      out(i, j) = (g(j, j) - g(i, j) + delta) / v(j) + (gs(i) - gs(j));
    }
  }
  return out;
}

double row_sum_spread(const Matrix& g) {
  const Vector gs = g.rowwise().sum();
  return gs.maxCoeff() - gs.minCoeff();
}

std::array<bool, 3> ge_conditions(const Matrix& g, const StationaryVector& pi, double tol) {
  const Eigen::Index m = pi.size();
  require_square(g, m);
  const double scale = std::max(1.0, max_abs(g)) * static_cast<double>(m);
  const Matrix e = ones_matrix(m);
  const Matrix g_pi = g * pi_matrix(pi);
  const Matrix cond2 = g * e - e * diag_of(g_pi) * big_d(pi);
  const Matrix cond3 = g_pi - e * diag_of(g_pi);
  return {has_constant_row_sums(g, tol), max_abs(cond2) <= tol * scale, max_abs(cond3) <= tol * scale};
}

Matrix mfpt_ge_condition(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                         double tol) {
  const Eigen::Index m = p.size();
  require_square(g, m);
  if (!has_constant_row_sums(g, tol)) {
    std::ostringstream msg;
    msg << "row sums of G spread by " << row_sum_spread(g);
    throw Error(ErrorCode::RowSumNotConstant, msg.str());
  }
  const Vector& v = pi.values();
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = (g(j, j) - g(i, j) + (i == j ? 1.0 : 0.0)) / v(j);
    }
  }
  return out;
}

std::pair<StationaryVector, Matrix> mfpt_joint(const TransitionMatrix& p, const GInverse& gi) {
  const Eigen::Index m = p.size();
  const Matrix& g = gi.g;
  require_square(g, m);
  const Matrix a = a_matrix(p, g);
  const Eigen::Index r = first_nonzero_row(a);
  const double s = a.row(r).sum();
  StationaryVector pi(p, a.row(r).transpose() / s, "A: row " + std::to_string(r + 1));

  const Vector gs = g.rowwise().sum();
  Matrix out(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double arj = a(r, j);
    for (Eigen::Index i = 0; i < m; ++i) {
      out(i, j) = i == j ? s / arj : (g(j, j) - g(i, j)) * s / arj + (gs(i) - gs(j));
    }
  }
  return {std::move(pi), std::move(out)};
}

std::pair<StationaryVector, Matrix> mfpt_geb(const TransitionMatrix& p, StateIndex b) {
  const Eigen::Index m = p.size();
  const Eigen::Index bb = b.zero_based(m);
  const GInverse gi = build(p, TableFamily{TableId::eb, std::nullopt, b});
  const Matrix& g = gi.g;
  StationaryVector pi(p, g.row(bb).transpose(), "G_eb: pi_j = g_bj");
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = ((i == j ? 1.0 : 0.0) + g(j, j) - g(i, j)) / g(bb, j);
    }
  }
  return {std::move(pi), std::move(out)};
}

Vector mfpt_column(const TransitionMatrix& p, StateIndex j, ColumnVariant variant) {
  const Eigen::Index m = p.size();
  const Eigen::Index jj = j.zero_based(m);
  const Vector ej = unit_vector(m, j);
  switch (variant) {
    case ColumnVariant::ColumnUpdate: {
      const Matrix g = inverse(p.kernel() + column_of(p, j) * ej.transpose());
      return g.rowwise().sum();
    }
    case ColumnVariant::RowUpdate: {
      const Matrix g = inverse(p.kernel() + ej * row_of(p, j).transpose());
      const Vector gs = g.rowwise().sum();
      Vector out = gs.array() - 1.0;
      out(jj) = p.matrix().row(jj).dot(gs);
      return out;
    }
    case ColumnVariant::Elementary: {
      const Matrix g = inverse(p.kernel() + ej * ej.transpose());
      const Vector gs = g.rowwise().sum();
      Vector out = gs.array() - gs(jj);
      out(jj) = gs(jj);
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown column variant");
}

DiagonalSecondMoments m2_diag(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi,
                              const std::optional<Matrix>& m1) {
  const Eigen::Index m = p.size();
  require_square(g, m);
  const Matrix group = group_inverse_via_invariance(g, pi);
  const Vector d = pi.values().cwiseInverse();
  DiagonalSecondMoments out;
  out.values = d.array() + 2.0 * d.array().square() * group.diagonal().array();
  if (m1) {
    require_square(*m1, m);
    // 2D(ΠM)_d − D, where (ΠM)_jj = (πᵀM)_j.
    const Vector pm = (pi.values().transpose() * *m1).transpose();
    const Vector alt = 2.0 * d.array() * pm.array() - d.array();
    double gap = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      gap = std::max(gap, std::abs(alt(j) - out.values(j)) / std::max(1.0, std::abs(out.values(j))));
    }
    out.check_gap = gap;
  }
  return out;
}

Matrix m2(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi, const Matrix& m1,
          std::string* route) {
  const Eigen::Index m = p.size();
  require_square(g, m);
  require_square(m1, m);
  const Vector diag2 = m2_diag(p, g, pi).values;
  const Matrix gm = g * m1;
  const bool constant_rows = has_constant_row_sums(g, 1e-8);
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      // Σ_k (g_ik − g_jk) m_kj
      const double spread = gm(i, j) - gm(j, j);
      if (constant_rows) {
        out(i, j) = 2.0 * spread + m1(i, j) * diag2(j) / m1(j, j);
      } else {
        const double delta = i == j ? 1.0 : 0.0;
        out(i, j) = 2.0 * spread - m1(i, j) + (delta - g(i, j) + g(j, j)) * (diag2(j) + m1(j, j));
      }
    }
  }
  if (route) *route = constant_rows ? "M2 via Ge=ge elemental form" : "M2 via general elemental form";
  return out;
}

PassageMoments m2_geb(const TransitionMatrix& p, StateIndex b) {
  const Eigen::Index m = p.size();
  const Eigen::Index bb = b.zero_based(m);
  const Matrix g = build(p, TableFamily{TableId::eb, std::nullopt, b}).g;
  const Matrix g2 = g * g;

  PassageMoments out;
  out.m1.resize(m, m);
  out.m2 = Matrix(m, m);
  Matrix& sec = *out.m2;
  Vector d(m);
  for (Eigen::Index j = 0; j < m; ++j) d(j) = 1.0 / g(bb, j);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out.m1(i, j) = i == j ? d(j) : (g(j, j) - g(i, j)) * d(j);
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mjj = out.m1(j, j);
    const double shift = g(j, j) - g2(bb, j);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == j) {
        sec(i, j) = mjj + 2.0 * mjj * mjj * shift;
      } else {
        const double mij = out.m1(i, j);
        sec(i, j) = 2.0 * mjj * (g2(j, j) - g2(i, j) + mij * shift) - mij;
      }
    }
  }
  out.d = make_diag(d);
  out.var = variances(out.m1, sec, &out.variance_clamped);
  out.route = "G_eb b=" + std::to_string(b.one_based()) + " with (G_eb)^2";
  return out;
}

Vector alpha_vector(const TransitionMatrix& p, const Matrix& g, const StationaryVector& pi) {
  const Eigen::Index m = p.size();
  require_square(g, m);
  const Vector& v = pi.values();
  const Vector gs = g.rowwise().sum();
  const Vector pig = (v.transpose() * g).transpose();
  Vector out(m);
  if (has_constant_row_sums(g, 1e-8)) {
    for (Eigen::Index j = 0; j < m; ++j) out(j) = 1.0 + (g(j, j) - pig(j)) / v(j);
    return out;
  }
  const double pi_g_e = v.dot(gs);
  for (Eigen::Index j = 0; j < m; ++j) {
    out(j) = pi_g_e - gs(j) + 1.0 + (g(j, j) - pig(j)) / v(j);
  }
  return out;
}

Matrix variances(const Matrix& m1, const Matrix& m2, bool* clamped) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "moment matrices differ in shape");
  }
  Matrix var = m2 - m1.cwiseProduct(m1);
  bool any_clamped = false;
  for (Eigen::Index i = 0; i < var.rows(); ++i) {
    for (Eigen::Index j = 0; j < var.cols(); ++j) {
      if (var(i, j) >= 0.0) continue;
      const double slack = 1e-8 * std::max(1.0, std::abs(m2(i, j)));
      if (var(i, j) < -slack) {
        std::ostringstream msg;
        msg << "var[T_" << i + 1 << "," << j + 1 << "] = " << var(i, j);
        throw Error(ErrorCode::NegativeVariance, msg.str());
      }
      var(i, j) = 0.0;
      any_clamped = true;
    }
  }
  if (clamped) *clamped = any_clamped;
  return var;
}

PassageMoments moments(const TransitionMatrix& p, const GInverse& g, const StationaryVector& pi) {
  PassageMoments out;
  out.m1 = mfpt(p, g.g, pi);
  std::string m2_route;
  out.m2 = m2(p, g.g, pi, out.m1, &m2_route);
  out.var = variances(out.m1, *out.m2, &out.variance_clamped);
  out.d = big_d(pi);
  out.route = describe(g.recipe) + "; M via elemental general form; " + m2_route;
  return out;
}

}  // namespace mcgi
