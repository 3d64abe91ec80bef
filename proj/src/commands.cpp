#include "mcgi/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "mcgi/occupation.hpp"
#include "mcgi/passage.hpp"
#include "mcgi/stationary.hpp"

namespace mcgi {

using nlohmann::json;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& x) {
  json out = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const GInvParams& params) {
  return {{"alpha", to_json(params.alpha)}, {"beta", to_json(params.beta)}, {"gamma", params.gamma}};
}

json to_json(const ConditionProfile& profile) {
  json out = json::object();
  for (int j = 1; j <= 5; ++j) {
    out[std::to_string(j)] = {{"holds", profile.cond(j)},
                              {"residual", profile.residuals[static_cast<std::size_t>(j - 1)]}};
  }
  out["satisfied"] = profile.satisfied();
  return out;
}

// Shared state of a command run.
class Session {
 public:
  Session(const RunConfig& cfg, std::string command)
      : cfg_(cfg), loaded_(load_matrix(cfg.input, cfg.format)),
        p_(TransitionMatrix::validate(loaded_.values, {cfg.normalize})) {
    report_.body = {{"input_digest", loaded_.digest},
                    {"command", std::move(command)},
                    {"route", ""},
                    {"tolerances",
                     {{"residual", cfg.tol}, {"oracle", kOracleTolerance}, {"monte_carlo_sigmas", kMonteCarloSigmas}}},
                    {"results", json::object()},
                    {"residuals", json::object()}};
    results()["m"] = p_.size();
    results()["normalized"] = p_.was_normalized();
  }

  const RunConfig& cfg() const { return cfg_; }
  const TransitionMatrix& p() const { return p_; }
  json& results() { return report_.body["results"]; }
  void set_route(const std::string& route) { report_.body["route"] = route; }

  void check(const std::string& name, double value, double threshold) {
    const bool pass = std::isfinite(value) && value <= threshold;
    report_.body["residuals"][name] = {{"value", value}, {"threshold", threshold}, {"pass", pass}};
    if (!pass) report_.exit_code = 3;
  }

  const StationaryVector& reference_pi() {
    if (!pi_) pi_ = stationary(p_);
    return *pi_;
  }

  GInverse build_g() {
    const GInvRecipe recipe = resolve_recipe(cfg_, p_);
    std::optional<StationaryVector> pi;
    if (needs_pi(recipe)) pi = reference_pi();
    return build(p_, recipe, pi, cfg_.tol);
  }

  Report finish() { return std::move(report_); }

 private:
  const RunConfig& cfg_;
  LoadedMatrix loaded_;
  TransitionMatrix p_;
  Report report_;
  std::optional<StationaryVector> pi_;
};

double scale_of(const Matrix& x) { return std::max(1.0, max_abs(x)); }

// Stationary vector for a built g-inverse by the route its recipe makes cheapest.
StationaryVector pi_for(const TransitionMatrix& p, const GInverse& g, std::string_view route) {
  if (route == "auto") {
    if (std::holds_alternative<Rhode>(g.recipe)) return pi_rhode(p);
    if (g.t_used && g.u_used) return pi_from_tu(p, g);
    return pi_from_A(p, g);
  }
  if (route == "tu") return pi_from_tu(p, g);
  if (route == "A") return pi_from_A(p, g);
  if (route == "A_sym") return pi_from_A_symmetric(p, g);
  if (route == "B") return pi_from_B(p, g);
  if (route == "B15") return pi_from_B_15(p, g, StateIndex(1));
  if (route == "G14") return pi_from_G_14(p, g);
  if (route == "rhode") return pi_rhode(p);
  if (route == "power") return pi_power_iteration(p);
  throw Error(ErrorCode::InvalidArgument, "unknown stationary route '" + std::string(route) + "'");
}

bool is_eb(const GInverse& g) {
  const auto* f = std::get_if<TableFamily>(&g.recipe);
  return f && f->id == TableId::eb;
}

StateIndex b_of(const RunConfig& cfg) { return StateIndex(cfg.b.value_or(1)); }

// Largest |estimate − exact| in units of the standard error; a zero standard
// error (deterministic passage) only tolerates rounding.
double z_score(double estimate, double exact, double se) {
  const double floor = 1e-12 * std::max(1.0, std::abs(exact));
  return std::abs(estimate - exact) / std::max(se, floor);
}

void verify_moments_by_simulation(Session& s, const Matrix& m1, const Matrix& m2) {
  const RunConfig& cfg = s.cfg();
  const Eigen::Index m = s.p().size();
  Matrix mean(m, m), second(m, m), se1(m, m), se2(m, m);
  double z1 = 0.0, z2 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      SimOptions options{block_seed(cfg.seed, static_cast<std::uint64_t>(i * m + j)), cfg.rng, 0};
      const SimEstimate est = simulate_passage(s.p(), StateIndex(static_cast<std::size_t>(i + 1)),
                                               StateIndex(static_cast<std::size_t>(j + 1)), cfg.trials, options);
      mean(i, j) = est.mean;
      second(i, j) = est.second_moment;
      se1(i, j) = est.std_error_mean;
      se2(i, j) = est.std_error_second_moment;
      z1 = std::max(z1, z_score(est.mean, m1(i, j), est.std_error_mean));
      z2 = std::max(z2, z_score(est.second_moment, m2(i, j), est.std_error_second_moment));
    }
  }
  s.results()["monte_carlo"] = {{"rng", to_string(cfg.rng)},
                                {"seed", cfg.seed},
                                {"trials", cfg.trials},
                                {"mean", to_json(mean)},
                                {"second_moment", to_json(second)},
                                {"std_error_mean", to_json(se1)},
                                {"std_error_second_moment", to_json(se2)},
                                {"max_z_mean", z1},
                                {"max_z_second_moment", z2},
                                {"agree", z1 <= kMonteCarloSigmas && z2 <= kMonteCarloSigmas}};
  s.check("monte_carlo_mean_z", z1, kMonteCarloSigmas);
  s.check("monte_carlo_second_moment_z", z2, kMonteCarloSigmas);
}

// (I − P)M − (E − P M_d)
double mfpt_residual(const TransitionMatrix& p, const Matrix& m1) {
  const Eigen::Index m = p.size();
  const Matrix md = make_diag(Vector(m1.diagonal()));
  return max_abs(Matrix(p.kernel() * m1 - ones_matrix(m) + p.matrix() * md));
}

// (I − P)M⁽²⁾ − (E + 2P(M − M_d) − P M⁽²⁾_d)
double m2_residual(const TransitionMatrix& p, const Matrix& m1, const Matrix& m2) {
  const Eigen::Index m = p.size();
  const Matrix md = make_diag(Vector(m1.diagonal()));
  const Matrix m2d = make_diag(Vector(m2.diagonal()));
  const Matrix rhs = ones_matrix(m) + 2.0 * p.matrix() * (m1 - md) - p.matrix() * m2d;
  return max_abs(Matrix(p.kernel() * m2 - rhs));
}

}  // namespace

double default_tolerance() {
  const char* env = std::getenv("MARKOV_GINV_TOL");
  if (!env || !*env) return kDefaultTolerance;
  char* end = nullptr;
  const double tol = std::strtod(env, &end);
  if (*end != '\0' || !(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorCode::InvalidArgument, std::string("MARKOV_GINV_TOL is not a positive number: ") + env);
  }
  return tol;
}

GInvRecipe resolve_recipe(const RunConfig& cfg, const TransitionMatrix& p) {
  std::string_view name = cfg.recipe;
  if (name == "fundamental") return Fundamental{};
  if (name == "group") return GroupInverse{};
  if (name == "mp") return MoorePenrose{};
  if (name == "rhode") return Rhode{};
  if (name == "custom") {
    if (!cfg.matrix) throw Error(ErrorCode::InvalidArgument, "--ginv custom requires --matrix");
    Matrix g = load_matrix(*cfg.matrix).values;
    if (g.rows() != p.size()) throw Error(ErrorCode::ShapeMismatch, "custom g-inverse is not m x m");
    return CustomMatrix{std::move(g)};
  }
  if (name.size() > 1 && name.front() == 'g' && parse_table_id(name.substr(1))) name.remove_prefix(1);
  const auto id = parse_table_id(name);
  if (!id) throw Error(ErrorCode::InvalidArgument, "unknown g-inverse recipe '" + cfg.recipe + "'");
  TableFamily family{*id, std::nullopt, std::nullopt};
  if (uses_a(*id)) family.a = StateIndex(cfg.a.value_or(1));
  if (uses_b(*id)) family.b = StateIndex(cfg.b.value_or(1));
  return family;
}

Report cmd_stationary(const RunConfig& cfg) {
  Session s(cfg, "stationary");
  const TransitionMatrix& p = s.p();
  std::optional<StationaryVector> pi;
  if (cfg.route == "power") {
    pi = pi_power_iteration(p);
  } else if (cfg.route == "rhode" || (cfg.route == "auto" && cfg.recipe == "rhode")) {
    pi = pi_rhode(p);
    s.results()["params"] = to_json(extract_params(p, build(p, Rhode{})));
  } else {
    const GInverse g = s.build_g();
    pi = pi_for(p, g, cfg.route);
    const GInvParams params = extract_params(p, g);
    s.results()["params"] = to_json(params);
    s.results()["labels"] = classify(params, *pi).labels();
  }
  s.set_route(pi->route());
  s.results()["pi"] = to_json(pi->values());
  s.check("stationary", pi->residual(), cfg.tol);
  s.check("normalization", std::abs(pi->values().sum() - 1.0), cfg.tol);
  if (cfg.verify) {
    const StationaryVector oracle = pi_power_iteration(p);
    const double gap = max_abs_diff(pi->values(), oracle.values());
    s.results()["oracle"] = {{"route", oracle.route()}, {"pi", to_json(oracle.values())}, {"max_diff", gap}};
    s.check("oracle_pi", gap, cfg.tol);
  }
  return s.finish();
}

Report cmd_mfpt(const RunConfig& cfg) {
  Session s(cfg, "mfpt");
  const TransitionMatrix& p = s.p();
  const GInverse g = s.build_g();
  Matrix m1;
  std::string route;
  std::optional<StationaryVector> pi;
  if (is_eb(g)) {
    auto [eb_pi, eb_m] = mfpt_geb(p, b_of(cfg));
    pi = std::move(eb_pi);
    m1 = std::move(eb_m);
    route = describe(g.recipe) + ": pi_j = g_bj, m_ij = (d_ij + g_jj - g_ij)/g_bj";
  } else {
    pi = pi_for(p, g, "auto");
    m1 = mfpt(p, g.g, *pi);
    route = describe(g.recipe) + "; pi via " + pi->route() + "; M via elemental form";
  }
  s.set_route(route);
  const auto ge = ge_conditions(g.g, *pi, cfg.tol);
  s.results()["pi"] = to_json(pi->values());
  s.results()["M"] = to_json(m1);
  s.results()["constant_row_sums"] = ge[0];
  s.results()["alpha"] = to_json(alpha_vector(p, g.g, *pi));

  s.check("stationary", pi->residual(), cfg.tol);
  s.check("mfpt_equation", mfpt_residual(p, m1), cfg.tol * scale_of(m1));
  double diag = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) diag = std::max(diag, std::abs(m1(i, i) * (*pi)(i) - 1.0));
  s.check("return_time", diag, cfg.tol);
  if (cfg.verify) {
    const Matrix direct = mfpt_direct(p);
    const double gap = max_abs_diff(m1, direct);
    s.results()["oracle"] = {{"route", "deleted first-step systems"}, {"M", to_json(direct)}, {"max_diff", gap}};
    s.check("oracle_mfpt", gap, kOracleTolerance * scale_of(direct));
  }
  return s.finish();
}

Report cmd_moments(const RunConfig& cfg) {
  Session s(cfg, "moments");
  const TransitionMatrix& p = s.p();
  const GInverse g = s.build_g();
  PassageMoments mom;
  std::optional<StationaryVector> pi;
  if (is_eb(g)) {
    mom = m2_geb(p, b_of(cfg));
    pi = StationaryVector(p, g.g.row(b_of(cfg).zero_based(p.size())).transpose(), "G_eb: pi_j = g_bj");
  } else {
    pi = pi_for(p, g, "auto");
    mom = moments(p, g, *pi);
  }
  s.set_route(mom.route);
  const Matrix& m2v = *mom.m2;
  s.results()["pi"] = to_json(pi->values());
  s.results()["M"] = to_json(mom.m1);
  s.results()["M2"] = to_json(m2v);
  s.results()["variance"] = to_json(*mom.var);
  s.results()["variance_clamped"] = mom.variance_clamped;

  s.check("stationary", pi->residual(), cfg.tol);
  s.check("mfpt_equation", mfpt_residual(p, mom.m1), cfg.tol * scale_of(mom.m1));
  s.check("second_moment_equation", m2_residual(p, mom.m1, m2v), cfg.tol * scale_of(m2v));
  const DiagonalSecondMoments diag = m2_diag(p, g.g, *pi, mom.m1);
  s.check("second_moment_diagonal", *diag.check_gap, cfg.tol);
  if (cfg.verify) {
    const Matrix d1 = mfpt_direct(p);
    const Matrix d2 = m2_direct(p, d1);
    const double gap1 = max_abs_diff(mom.m1, d1);
    const double gap2 = max_abs_diff(m2v, d2);
    s.results()["oracle"] = {{"route", "deleted first-step systems"},
                             {"M", to_json(d1)},
                             {"M2", to_json(d2)},
                             {"max_diff_M", gap1},
                             {"max_diff_M2", gap2}};
    s.check("oracle_mfpt", gap1, kOracleTolerance * scale_of(d1));
    s.check("oracle_second_moment", gap2, kOracleTolerance * scale_of(d2));
    verify_moments_by_simulation(s, mom.m1, m2v);
  }
  return s.finish();
}

Report cmd_occupation(const RunConfig& cfg) {
  if (!cfg.n) throw Error(ErrorCode::InvalidArgument, "occupation requires --n");
  Session s(cfg, "occupation");
  const TransitionMatrix& p = s.p();
  const unsigned long n = *cfg.n;
  const GInverse g = s.build_g();
  const StationaryVector pi = pi_for(p, g, "auto");
  const OccupationResult explicit_sum = occupation_explicit(p, n);
  const OccupationResult left = occupation_closed(p, g.g, pi, n, Side::Left);
  const OccupationResult right = occupation_closed(p, g.g, pi, n, Side::Right);
  const double gap = std::max(max_abs_diff(left.a_n, explicit_sum.a_n), max_abs_diff(right.a_n, explicit_sum.a_n));
  s.set_route(describe(g.recipe) + "; closed forms vs explicit power sum");
  s.results()["n"] = n;
  s.results()["pi"] = to_json(pi.values());
  s.results()["A_n"] = to_json(explicit_sum.a_n);
  s.results()["closed_left"] = to_json(left.a_n);
  s.results()["closed_right"] = to_json(right.a_n);
  s.results()["discrepancy"] = gap;
  if (period(p) == 1) {
    const Matrix approx = occupation_asymptotic(p, g.g, pi, n);
    s.results()["asymptotic"] = {{"A_n", to_json(approx)}, {"error", max_abs_diff(approx, explicit_sum.a_n)}};
  } else {
    s.results()["asymptotic"] = nullptr;
  }
  s.check("stationary", pi.residual(), cfg.tol);
  s.check("closed_vs_explicit", gap, cfg.tol * scale_of(explicit_sum.a_n));
  if (cfg.verify) {
    const Eigen::Index m = p.size();
    Matrix mean(m, m), se(m, m);
    double z = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      SimOptions options{block_seed(cfg.seed, static_cast<std::uint64_t>(i)), cfg.rng, 0};
      // Times 0..n−1 are n time points.
      const OccupationEstimate est =
          simulate_occupation(p, StateIndex(static_cast<std::size_t>(i + 1)), n - 1, cfg.trials, options);
      mean.row(i) = est.mean.transpose();
      se.row(i) = est.std_error.transpose();
      for (Eigen::Index j = 0; j < m; ++j) z = std::max(z, z_score(est.mean(j), explicit_sum.a_n(i, j), est.std_error(j)));
    }
    s.results()["monte_carlo"] = {{"rng", to_string(cfg.rng)}, {"seed", cfg.seed},      {"trials", cfg.trials},
                                  {"mean", to_json(mean)},     {"std_error", to_json(se)}, {"max_z", z}};
    s.check("monte_carlo_z", z, kMonteCarloSigmas);
  }
  return s.finish();
}

Report cmd_ginv(const RunConfig& cfg) {
  Session s(cfg, "ginv");
  const TransitionMatrix& p = s.p();
  const GInverse g = s.build_g();
  const StationaryVector& pi = s.reference_pi();
  const ConditionProfile profile = check_conditions(p, g.g, cfg.tol);
  const GInvParams params = extract_params(p, g);
  const Classification cls = classify(params, pi);
  std::string route = describe(g.recipe);

  s.results()["conditions"] = to_json(profile);
  s.results()["params"] = to_json(params);
  s.results()["labels"] = cls.labels();
  s.results()["gamma"] = params.gamma;
  s.check("condition_1", profile.residuals[0], cfg.tol);

  if (cfg.action == "build") {
    s.results()["G"] = to_json(g.g);
  } else if (cfg.action == "convert") {
    if (!cfg.target) throw Error(ErrorCode::InvalidArgument, "convert requires --target");
    const auto id = parse_table_id(*cfg.target);
    if (!id) throw Error(ErrorCode::InvalidArgument, "unknown convert target '" + *cfg.target + "'");
    TableFamily family{*id, std::nullopt, std::nullopt};
    if (uses_a(*id)) family.a = StateIndex(cfg.a.value_or(1));
    if (uses_b(*id)) family.b = StateIndex(cfg.b.value_or(1));
    const auto [t, u] = table_vectors(p, family);
    const Matrix converted = convert(g.g, t, u, pi);
    const Matrix direct = build(p, family).g;
    const double gap = max_abs_diff(converted, direct);
    route += " converted to " + describe(family);
    s.results()["G"] = to_json(converted);
    s.results()["direct_max_diff"] = gap;
    s.check("conversion", gap, cfg.tol * scale_of(direct));
  } else if (cfg.action != "check" && cfg.action != "classify") {
    throw Error(ErrorCode::InvalidArgument, "unknown ginv action '" + cfg.action + "'");
  }
  s.results()["action"] = cfg.action;
  s.set_route(route);
  return s.finish();
}

Report run(const RunConfig& cfg) {
  if (cfg.command == "stationary") return cmd_stationary(cfg);
  if (cfg.command == "mfpt") return cmd_mfpt(cfg);
  if (cfg.command == "moments") return cmd_moments(cfg);
  if (cfg.command == "occupation") return cmd_occupation(cfg);
  if (cfg.command == "ginv") return cmd_ginv(cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + cfg.command + "'");
}

int exit_code_for(const Error& e) { return is_validation_error(e.code()) ? 2 : 3; }

json error_json(const Error& e) {
  return {{"error", {{"code", to_string(e.code())}, {"message", e.what()}, {"exit_code", exit_code_for(e)}}}};
}

namespace {

void render_value(std::ostringstream& out, const json& v, const std::string& indent) {
  if (v.is_array() && !v.empty() && v.front().is_array()) {
    for (const auto& row : v) {
      out << indent;
      for (const auto& cell : row) out << ' ' << std::setw(14) << cell.dump();
      out << '\n';
    }
  } else if (v.is_object()) {
    for (const auto& [key, inner] : v.items()) {
      if (inner.is_structured() && !(inner.is_array() && (inner.empty() || !inner.front().is_structured()))) {
        out << indent << key << ":\n";
        render_value(out, inner, indent + "  ");
      } else {
        out << indent << key << ": " << inner.dump() << '\n';
      }
    }
  } else {
    out << indent << v.dump() << '\n';
  }
}

}  // namespace

std::string render_table(const json& report) {
  std::ostringstream out;
  out << "command: " << report.value("command", "") << '\n';
  out << "route:   " << report.value("route", "") << '\n';
  out << "input:   " << report.value("input_digest", "") << '\n';
  out << "results:\n";
  render_value(out, report["results"], "  ");
  out << "residuals:\n";
  for (const auto& [name, r] : report["residuals"].items()) {
    out << "  " << (r["pass"].get<bool>() ? "ok   " : "FAIL ") << name << " = " << r["value"].dump()
        << " (threshold " << r["threshold"].dump() << ")\n";
  }
  return out.str();
}

}  // namespace mcgi
