#pragma once

// The five commands of the mcgi tool. Each returns a JSON report with the
// keys input_digest, command, route, tolerances, results and residuals; the
// exit code is 0 only when every residual check passed.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "mcgi/ginv.hpp"
#include "mcgi/io.hpp"
#include "mcgi/oracle.hpp"

namespace mcgi {

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr double kOracleTolerance = 1e-7;
inline constexpr double kMonteCarloSigmas = 4.0;

struct RunConfig {
  std::string command;  // stationary | mfpt | moments | occupation | ginv
  std::string input;
  std::optional<MatrixFormat> format;
  /// Table id (ee, eb, ..., with an optional leading 'g'), fundamental, group, mp, rhode or custom.
  std::string recipe = "eb";
  std::optional<std::string> matrix;  // g-inverse file for recipe custom
  std::optional<std::size_t> a;       // 1-based
  std::optional<std::size_t> b;       // 1-based
  std::optional<unsigned long> n;
  double tol = kDefaultTolerance;
  std::uint64_t seed = 0;
  RngAlgorithm rng = RngAlgorithm::Xoshiro256ss;
  std::uint64_t trials = 100000;
  bool verify = false;
  bool normalize = false;
  /// stationary: auto | tu | A | A_sym | B | B15 | G14 | rhode | power
  std::string route = "auto";
  /// ginv: build | check | classify | convert
  std::string action = "build";
  std::optional<std::string> target;  // table id for convert
};

struct Report {
  nlohmann::json body;
  int exit_code = 0;
};

/// Tolerance default: MARKOV_GINV_TOL when set, else 1e-8. Throws InvalidArgument on garbage.
double default_tolerance();

/// Resolves the recipe selector against a loaded chain.
GInvRecipe resolve_recipe(const RunConfig& cfg, const TransitionMatrix& p);

Report cmd_stationary(const RunConfig& cfg);
Report cmd_mfpt(const RunConfig& cfg);
Report cmd_moments(const RunConfig& cfg);
Report cmd_occupation(const RunConfig& cfg);
Report cmd_ginv(const RunConfig& cfg);

/// Dispatches on cfg.command.
Report run(const RunConfig& cfg);

/// {"error": {"code", "message", "exit_code"}}
nlohmann::json error_json(const Error& e);
int exit_code_for(const Error& e);

/// Plain-text rendering of a report for --output table.
std::string render_table(const nlohmann::json& report);

}  // namespace mcgi
