// Command-line front end: blind broadband massive-MIMO channel estimation
// experiments, single-block estimation, and Cramer-Rao reference curves.

#include <CLI11.hpp>
#include <string>

#include "blindmimo/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Blind sparse massive-MIMO channel estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", blindmimo::kVersion);

  std::string config_path;
  std::string block_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--seed", seed, "override monte_carlo.master_seed");
    cmd->add_option("--threads", threads, "worker thread cap (results are thread-count invariant)");
    cmd->add_option("--out", out, "override the output path");
  };

  CLI::App* experiment = app.add_subcommand("experiment", "run a Monte-Carlo experiment, write CCDF CSVs");
  add_common(experiment);

  CLI::App* estimate = app.add_subcommand("estimate", "estimate one serialized receiver block");
  estimate->add_option("--input", block_path, "serialized receiver block")->required();
  add_common(estimate);

  CLI::App* crb = app.add_subcommand("crb", "average the eta_CRB predictor over realizations");
  add_common(crb);

  CLI11_PARSE(app, argc, argv);

  blindmimo::CliOverrides overrides;
  if (experiment->count("--seed") || estimate->count("--seed") || crb->count("--seed"))
    overrides.seed = seed;
  if (experiment->count("--threads") || estimate->count("--threads") || crb->count("--threads"))
    overrides.threads = threads;
  if (experiment->count("--out") || estimate->count("--out") || crb->count("--out"))
    overrides.out = out;

  if (app.got_subcommand(experiment)) return blindmimo::cmd_experiment(config_path, overrides);
  if (app.got_subcommand(estimate)) return blindmimo::cmd_estimate(block_path, config_path, overrides);
  return blindmimo::cmd_crb(config_path, overrides);
}
