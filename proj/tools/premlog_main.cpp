#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "premlog/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"premlog: bottom-up Datalog with extrema constraints pushed into recursion"};
  app.require_subcommand(1);

  premlog::cli::CliConfig cfg;
  std::string push = "on";
  std::vector<std::string> fact_bindings;

  auto add_common = [&](CLI::App* sub, bool eval_flags) {
    sub->add_option("program", cfg.program_path, "Datalog program file")->required();
    sub->add_option("--format", cfg.format, "Output format (default table)")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    if (!eval_flags) return;
    sub->add_option("--facts", fact_bindings, "PRED=PATH fact CSV binding (repeatable)");
    sub->add_option("--engine", cfg.engine, "Evaluation engine (default seminaive)")
        ->check(CLI::IsMember({"naive", "seminaive"}));
    sub->add_option("--push", push, "Apply pushed extrema during recursion (default on)")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--max-iters", cfg.max_iters, "Fixpoint iteration cap per recursive component");
    sub->add_flag("--strict", cfg.strict, "Nonzero exit on iteration cap or PreM violation");
    sub->add_option("--query", cfg.queries, "Only print this predicate (repeatable)");
    sub->add_option("--trace", cfg.trace_path, "Dump fixpoint trace JSON to this path");
  };

  add_common(app.add_subcommand("run", "Evaluate a program and print derived relations"), true);
  CLI::App* rewrite = app.add_subcommand("rewrite", "Apply a rewrite and print the program");
  add_common(rewrite, false);
  rewrite->add_option("--mode", cfg.mode, "Rewrite to apply")
      ->required()
      ->check(CLI::IsMember({"push", "unpush", "negation", "equality"}));
  add_common(app.add_subcommand("check-prem", "Run the per-iteration PreM check"), true);
  add_common(app.add_subcommand("diff", "Compare pushed vs unpushed results"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : premlog::cli::kExitUsage;
  }

  cfg.push = push == "on";
  cfg.subcommand = app.get_subcommands().at(0)->get_name();
  for (const std::string& binding : fact_bindings) {
    std::size_t eq = binding.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == binding.size()) {
      std::cerr << "--facts expects PRED=PATH, got: " << binding << "\n";
      return premlog::cli::kExitUsage;
    }
    cfg.facts.emplace_back(binding.substr(0, eq), binding.substr(eq + 1));
  }
  return premlog::cli::dispatch(cfg, std::cout, std::cerr);
}
