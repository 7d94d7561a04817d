#include "bsel/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Behavior selection trainer for multi-robot missions"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", std::string(bsel::kVersion));

  bsel::CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--seed", seed, "Override the configured master seed");
  app.add_option("--out", out, "Override the configured output directory");

  auto* train = app.add_subcommand("train", "Train a Q-table and write rewards, table and manifest");
  train->add_option("--config", opts.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Evaluate one policy over the configured eval episodes");
  eval->add_option("--config", opts.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  eval->add_option("--qtable", opts.qtable, "Trained Q-table (required for --mode trained)");
  eval->add_option("--mode", opts.mode, "trained | random | adhoc")
      ->check(CLI::IsMember({"trained", "random", "adhoc"}));

  auto* compare = app.add_subcommand("compare", "Paired evaluation of trained vs. baselines");
  compare->add_option("--config", opts.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  compare->add_option("--qtable", opts.qtable, "Trained Q-table")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.count("--seed")) opts.seed = seed;
  if (app.count("--out")) opts.out = out;

  if (*train) return bsel::cmd_train(opts, std::cout, std::cerr);
  if (*eval) return bsel::cmd_eval(opts, std::cout, std::cerr);
  return bsel::cmd_compare(opts, std::cout, std::cerr);
}
