// lptrans: run translate-system experiments from JSON specs.
//
//   lptrans <command> --spec <file> [--out <dir>] [--seed <n>]
//
// Writes report.json plus CSV tables into the output directory
// (--out, else $LPTRANS_OUT_DIR, else ./lptrans-out).
// Exit codes: 0 ok, 2 input error, 3 precondition violated, 4 a declared
// check failed.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lptrans/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Translate-system experiments in Lp"};
  app.require_subcommand(1);
  std::string spec_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> names = lpt::cli::commands();
  names.push_back("run");
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, name == "run" ? "run the steps listed in the spec" : "run " + name);
    sub->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed (overrides the spec)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lpt::cli::kInputError;
  }
  lpt::cli::RunOptions opt;
  opt.seed = seed;
  return lpt::cli::execute(app.get_subcommands().front()->get_name(), spec_path, out_dir, opt, std::cout, std::cerr);
}
