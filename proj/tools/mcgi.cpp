// mcgi: stationary distributions, first passage moments and occupation
// times of finite Markov chains through generalized inverses of I − P.
// All state indices are 1-based.

#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "mcgi/commands.hpp"

namespace {

void add_common(CLI::App& cmd, mcgi::RunConfig& cfg, std::string& format, std::string& rng,
                std::string& output) {
  cmd.add_option("--input", cfg.input, "transition matrix file (.csv or .json)")->required();
  cmd.add_option("--format", format, "input format")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--ginv,--recipe", cfg.recipe,
                 "g-inverse: ee|eb_r|eb|ae_c|ab_cr|ab_c|ae|ab_r|ab|tb_c (optionally g-prefixed), "
                 "fundamental|group|mp|rhode|custom");
  cmd.add_option("--matrix", cfg.matrix, "g-inverse file for --ginv custom");
  cmd.add_option("--a", cfg.a, "state a (1-based)")->check(CLI::PositiveNumber);
  cmd.add_option("--b", cfg.b, "state b (1-based)")->check(CLI::PositiveNumber);
  cmd.add_option("--n", cfg.n, "horizon");
  cmd.add_option("--tol", cfg.tol, "residual tolerance (default MARKOV_GINV_TOL or 1e-8)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", cfg.seed, "simulation seed");
  cmd.add_option("--rng", rng, "xoshiro256ss|splitmix64")->check(CLI::IsMember({"xoshiro256ss", "splitmix64"}));
  cmd.add_option("--trials", cfg.trials, "simulation trials per entry")->check(CLI::PositiveNumber);
  cmd.add_flag("--verify", cfg.verify, "run the independent oracles as well");
  cmd.add_flag("--normalize", cfg.normalize, "rescale rows that do not sum to 1");
  cmd.add_option("--output", output, "json|table")->check(CLI::IsMember({"json", "table"}));
}

void print_error(const mcgi::Error& e) { std::cerr << mcgi::error_json(e).dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain quantities through generalized inverses of I - P (1-based state indices)"};
  app.require_subcommand(1);

  mcgi::RunConfig cfg;
  std::string format, rng = "xoshiro256ss", output = "json";
  try {
    cfg.tol = mcgi::default_tolerance();
  } catch (const mcgi::Error& e) {
    print_error(e);
    return 2;
  }

  const std::pair<const char*, const char*> commands[] = {
      {"stationary", "stationary distribution pi"},
      {"mfpt", "mean first passage times M"},
      {"moments", "M, second moments M2 and variances"},
      {"occupation", "expected occupation counts A_n (needs --n)"},
      {"ginv", "build, check, classify or convert a g-inverse"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(*cmd, cfg, format, rng, output);
    cmd->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("stationary")
      ->add_option("--route", cfg.route, "auto|tu|A|A_sym|B|B15|G14|rhode|power")
      ->check(CLI::IsMember({"auto", "tu", "A", "A_sym", "B", "B15", "G14", "rhode", "power"}));
  CLI::App* ginv = app.get_subcommand("ginv");
  ginv->add_option("action", cfg.action, "build|check|classify|convert")
      ->check(CLI::IsMember({"build", "check", "classify", "convert"}));
  ginv->add_option("--target", cfg.target, "table id to convert to");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(mcgi::Error(mcgi::ErrorCode::InvalidArgument, e.what()));
    return 2;
  }

  try {
    if (!format.empty()) cfg.format = mcgi::parse_format(format);
    cfg.rng = *mcgi::parse_rng(rng);
    const mcgi::Report report = mcgi::run(cfg);
    if (output == "table") {
      std::cout << mcgi::render_table(report.body);
    } else {
      std::cout << report.body.dump(2) << '\n';
    }
    if (report.exit_code != 0) {
      print_error(mcgi::Error(mcgi::ErrorCode::ResidualCheckFailed, "one or more residual checks failed"));
    }
    return report.exit_code;
  } catch (const mcgi::Error& e) {
    print_error(e);
    return mcgi::exit_code_for(e);
  } catch (const std::exception& e) {
    print_error(mcgi::Error(mcgi::ErrorCode::InvalidArgument, e.what()));
    return 2;
  }
}
