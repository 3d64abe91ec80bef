#include "mcgi/ginv.hpp"

#include <sstream>

namespace mcgi {

namespace {

struct TableInfo {
  TableId id;
  std::string_view name;
  bool a;
  bool b;
};

constexpr TableInfo kTable[] = {
    {TableId::ee, "ee", false, false},      {TableId::eb_r, "eb_r", false, true},
    {TableId::eb, "eb", false, true},       {TableId::ae_c, "ae_c", true, false},
    {TableId::ab_cr, "ab_cr", true, true},  {TableId::ab_c, "ab_c", true, true},
    {TableId::ae, "ae", true, false},       {TableId::ab_r, "ab_r", true, true},
    {TableId::ab, "ab", true, true},        {TableId::tb_c, "tb_c", false, true},
};

const TableInfo& info(TableId id) {
  for (const auto& row : kTable) {
    if (row.id == id) return row;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown table id");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

StateIndex require_index(const std::optional<StateIndex>& idx, TableId id, const char* which) {
  if (!idx) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("recipe ") + std::string(to_string(id)) + " needs index " + which);
  }
  return *idx;
}

void require_length(const Vector& v, Eigen::Index m, const char* what) {
  if (v.size() != m) {
    std::ostringstream msg;
    msg << what << " has length " << v.size() << ", expected " << m;
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  if (!all_finite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " has a non-finite entry");
}

Matrix rank_one_inverse(const TransitionMatrix& p, const Vector& t, const Vector& u) {
  return inverse(p.kernel() + t * u.transpose());
}

}  // namespace

std::string_view to_string(TableId id) { return info(id).name; }

std::optional<TableId> parse_table_id(std::string_view name) {
  for (const auto& row : kTable) {
    if (row.name == name) return row.id;
  }
  return std::nullopt;
}

bool uses_a(TableId id) { return info(id).a; }
bool uses_b(TableId id) { return info(id).b; }

std::string describe(const GInvRecipe& recipe) {
  return std::visit(
      overloaded{
          [](const TableFamily& f) {
            std::string s = "G_" + std::string(to_string(f.id));
            if (uses_a(f.id) && f.a) s += " a=" + std::to_string(f.a->one_based());
            if (uses_b(f.id) && f.b) s += " b=" + std::to_string(f.b->one_based());
            return s;
          },
          [](const Fundamental&) { return std::string("fundamental Z"); },
          [](const GroupInverse&) { return std::string("group inverse A#"); },
          [](const MoorePenrose&) { return std::string("Moore-Penrose"); },
          [](const Rhode&) { return std::string("partitioned (Rhode)"); },
          [](const CustomTU&) { return std::string("custom [I-P+tu']^-1"); },
          [](const CustomMatrix&) { return std::string("custom matrix"); },
      },
      recipe);
}

bool needs_pi(const GInvRecipe& recipe) {
  return std::holds_alternative<Fundamental>(recipe) || std::holds_alternative<GroupInverse>(recipe) ||
         std::holds_alternative<MoorePenrose>(recipe);
}

std::pair<Vector, Vector> table_vectors(const TransitionMatrix& p, const TableFamily& family) {
  const Eigen::Index m = p.size();
  const TableId id = family.id;
  Vector t;
  Vector u;
  switch (id) {
    case TableId::ee:
    case TableId::eb_r:
    case TableId::eb:
      t = ones_vector(m);
      break;
    case TableId::ae_c:
    case TableId::ab_cr:
    case TableId::ab_c:
      t = column_of(p, require_index(family.a, id, "a"));
      break;
    case TableId::ae:
    case TableId::ab_r:
    case TableId::ab:
      t = unit_vector(m, require_index(family.a, id, "a"));
      break;
    case TableId::tb_c: {
      // t_b = e − e_b + p_b^(c): the update replaces column b of I − P by e.
      const StateIndex b = require_index(family.b, id, "b");
      t = ones_vector(m) - unit_vector(m, b) + column_of(p, b);
      break;
    }
  }
  switch (id) {
    case TableId::ee:
    case TableId::ae_c:
    case TableId::ae:
      u = ones_vector(m);
      break;
    case TableId::eb_r:
    case TableId::ab_cr:
    case TableId::ab_r:
      u = row_of(p, require_index(family.b, id, "b"));
      break;
    case TableId::eb:
    case TableId::ab_c:
    case TableId::ab:
    case TableId::tb_c:
      u = unit_vector(m, require_index(family.b, id, "b"));
      break;
  }
  return {std::move(t), std::move(u)};
}

GInverse build(const TransitionMatrix& p, const GInvRecipe& recipe,
               const std::optional<StationaryVector>& pi, double condition_tol) {
  const Eigen::Index m = p.size();
  if (needs_pi(recipe) && !pi) {
    throw Error(ErrorCode::MissingPi, describe(recipe) + " requires the stationary vector");
  }
  if (pi && pi->size() != m) throw Error(ErrorCode::ShapeMismatch, "stationary vector length != m");

  return std::visit(
      overloaded{
          [&](const TableFamily& f) {
            auto [t, u] = table_vectors(p, f);
            Matrix g = rank_one_inverse(p, t, u);
            return GInverse{std::move(g), recipe, std::move(t), std::move(u)};
          },
          [&](const Fundamental&) {
            Vector e = ones_vector(m);
            Matrix g = inverse(p.kernel() + pi_matrix(*pi));
            return GInverse{std::move(g), recipe, std::move(e), pi->values()};
          },
          [&](const GroupInverse&) {
            const Matrix big_pi = pi_matrix(*pi);
            Matrix g = inverse(p.kernel() + big_pi) - big_pi;
            return GInverse{std::move(g), recipe, std::nullopt, std::nullopt};
          },
          [&](const MoorePenrose&) {
            const Vector& v = pi->values();
            const Vector e = ones_vector(m);
            Matrix g = inverse(p.kernel() + v * e.transpose()) -
                       (e * v.transpose()) / (static_cast<double>(m) * v.squaredNorm());
            return GInverse{std::move(g), recipe, std::nullopt, std::nullopt};
          },
          [&](const Rhode&) {
            Matrix g = Matrix::Zero(m, m);
            if (m > 1) {
              const Eigen::Index k = m - 1;
              g.topLeftCorner(k, k) = inverse(Matrix(p.kernel().topLeftCorner(k, k)));
            }
            return GInverse{std::move(g), recipe, std::nullopt, std::nullopt};
          },
          [&](const CustomTU& c) {
            require_length(c.t, m, "t");
            require_length(c.u, m, "u");
            Matrix g = rank_one_inverse(p, c.t, c.u);
            return GInverse{std::move(g), recipe, c.t, c.u};
          },
          [&](const CustomMatrix& c) {
            if (c.g.rows() != m || c.g.cols() != m) {
              throw Error(ErrorCode::ShapeMismatch, "custom g-inverse must be m x m");
            }
            if (!all_finite(c.g)) throw Error(ErrorCode::NonFinite, "custom g-inverse has a non-finite entry");
            const ConditionProfile profile = check_conditions(p, c.g, condition_tol);
            if (!profile.cond(1)) {
              std::ostringstream msg;
              msg << "‖(I−P)G(I−P) − (I−P)‖_max = " << profile.residuals[0] << " exceeds "
                  << condition_tol;
              throw Error(ErrorCode::Condition1Failed, msg.str());
            }
            return GInverse{c.g, recipe, std::nullopt, std::nullopt};
          },
      },
      recipe);
}

std::vector<int> ConditionProfile::satisfied() const {
  std::vector<int> out;
  for (int j = 1; j <= 5; ++j) {
    if (cond(j)) out.push_back(j);
  }
  return out;
}

std::set<int> Classification::labels() const {
  std::set<int> out{1};
  if (a12) out.insert(2);
  if (a13) out.insert(3);
  if (a14) out.insert(4);
  if (a15) out.insert(5);
  return out;
}

ConditionProfile check_conditions(const TransitionMatrix& p, const Matrix& g, double tol) {
  const Eigen::Index m = p.size();
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  const Matrix a = p.kernel();
  const Matrix ag = a * g;
  const Matrix ga = g * a;
  ConditionProfile profile;
  profile.tolerance = tol;
  profile.residuals[0] = max_abs(Matrix(ag * a - a));
  profile.residuals[1] = max_abs(Matrix(ga * g - g));
  profile.residuals[2] = max_abs(Matrix(ag.transpose() - ag));
  profile.residuals[3] = max_abs(Matrix(ga.transpose() - ga));
  profile.residuals[4] = max_abs(Matrix(ag - ga));
  for (std::size_t k = 0; k < 5; ++k) profile.holds[k] = profile.residuals[k] < tol;
  return profile;
}

Matrix a_matrix(const TransitionMatrix& p, const Matrix& g) {
  return Matrix::Identity(p.size(), p.size()) - p.kernel() * g;
}

Matrix b_matrix(const TransitionMatrix& p, const Matrix& g) {
  return Matrix::Identity(p.size(), p.size()) - g * p.kernel();
}

Eigen::Index first_nonzero_row(const Matrix& a) {
  const Vector row_sums = a.rowwise().sum();
  const double largest = max_abs(row_sums);
  // πᵀα = 1 forces max|α_i| >= 1 for a genuine g-inverse.
  if (!(largest > 1e-8)) {
    throw Error(ErrorCode::NoValidRow, "every row of A sums to zero; G is not a g-inverse of I-P");
  }
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (std::abs(row_sums(r)) > 1e-8 * largest) return r;
  }
  throw Error(ErrorCode::NoValidRow, "no row of A has a usable sum");
}

Vector pi_by_row_scan(const Matrix& a) {
  const Eigen::Index r = first_nonzero_row(a);
  return a.row(r).transpose() / a.row(r).sum();
}

GInvParams extract_params(const TransitionMatrix& p, const Matrix& g) {
  const Eigen::Index m = p.size();
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  const Matrix a = a_matrix(p, g);
  const Vector e = ones_vector(m);
  GInvParams params;
  params.alpha = a * e;
  if (!(max_abs(params.alpha) > 1e-8)) {
    throw Error(ErrorCode::DegenerateAlpha, "A e vanishes; G is not a g-inverse of I-P");
  }
  const Vector pi = pi_by_row_scan(a);
  params.beta = (pi.transpose() * b_matrix(p, g)).transpose();
  params.gamma = params.beta.dot(g * e) - 1.0;
  return params;
}

Classification classify(const GInvParams& params, const StationaryVector& pi, double tol) {
  const Vector& v = pi.values();
  const Eigen::Index m = v.size();
  const Vector e = ones_vector(m);
  Classification c;
  c.a12 = std::abs(params.gamma + 1.0) < tol;
  c.a13 = max_abs_diff(params.alpha, v / v.squaredNorm()) < tol;
  c.a14 = max_abs_diff(params.beta, e / static_cast<double>(m)) < tol;
  c.a15 = max_abs_diff(params.alpha, e) < tol && max_abs_diff(params.beta, v) < tol;
  return c;
}

namespace {

void check_rank_one_pivots(double pi_t, double u_e, const Vector& t, const Vector& u) {
  if (!(std::abs(pi_t) > 1e-12 * std::max(1.0, max_abs(t)))) {
    std::ostringstream msg;
    msg << "πᵀt = " << pi_t << " is numerically zero";
    throw Error(ErrorCode::DegeneratePivot, msg.str());
  }
  if (!(std::abs(u_e) > 1e-12 * std::max(1.0, u.cwiseAbs().sum()))) {
    std::ostringstream msg;
    msg << "uᵀe = " << u_e << " is numerically zero";
    throw Error(ErrorCode::DegeneratePivot, msg.str());
  }
}

}  // namespace

Matrix convert(const Matrix& g, const Vector& t, const Vector& u, const StationaryVector& pi) {
  const Eigen::Index m = pi.size();
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  require_length(t, m, "t");
  require_length(u, m, "u");
  const Vector& v = pi.values();
  const Vector e = ones_vector(m);
  const double pi_t = v.dot(t);
  const double u_e = u.sum();
  check_rank_one_pivots(pi_t, u_e, t, u);
  const Matrix id = Matrix::Identity(m, m);
  const Matrix left = id - (e * u.transpose()) / u_e;
  const Matrix right = id - (t * v.transpose()) / pi_t;
  return left * g * right + (e * v.transpose()) / (pi_t * u_e);
}

Matrix delta_invariant(const TransitionMatrix& p, const Vector& t, const Vector& u,
                       const StationaryVector& pi, const std::vector<double>& deltas, double tol) {
  const Eigen::Index m = p.size();
  require_length(t, m, "t");
  require_length(u, m, "u");
  for (double d : deltas) {
    if (d == 0.0 || !std::isfinite(d)) {
      throw Error(ErrorCode::InvalidArgument, "delta must be finite and non-zero");
    }
  }
  const Vector& v = pi.values();
  const Vector e = ones_vector(m);
  const double pi_t = v.dot(t);
  const double u_e = u.sum();
  check_rank_one_pivots(pi_t, u_e, t, u);

  auto at = [&](double d) -> Matrix {
    return inverse(p.kernel() + d * (t * u.transpose())) - (e * v.transpose()) / (d * pi_t * u_e);
  };
  const Matrix reference = at(1.0);
  std::vector<Matrix> values;
  values.push_back(reference);
  for (double d : deltas) {
    if (d != 1.0) values.push_back(at(d));
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      spread = std::max(spread, max_abs_diff(values[i], values[j]));
    }
  }
  if (!(spread <= tol)) {
    std::ostringstream msg;
    msg << "max pairwise discrepancy " << spread << " exceeds " << tol;
    throw Error(ErrorCode::InvarianceViolated, msg.str());
  }
  return reference;
}

Matrix group_inverse_via_invariance(const Matrix& g, const StationaryVector& pi) {
  const Eigen::Index m = pi.size();
  if (g.rows() != m || g.cols() != m) throw Error(ErrorCode::ShapeMismatch, "g must be m x m");
  const Matrix proj = Matrix::Identity(m, m) - pi_matrix(pi);
  return proj * g * proj;
}

}  // namespace mcgi
