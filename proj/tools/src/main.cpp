// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "umimc/harness.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> reps;
  std::optional<double> budget;
  bool wall_clock = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Master seed (overrides the configuration)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--reps", o.reps, "Number of repetitions")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", o.budget, "Work budget per UMIMC repetition")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--wall-clock", o.wall_clock,
                "Add a wall-clock column to trajectories (output is then not reproducible)");
}

umimc::harness::ExperimentConfig resolve(const Overrides& o) {
  auto cfg = umimc::harness::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.reps) cfg.reps = *o.reps;
  if (o.budget) cfg.budget = *o.budget;
  if (o.wall_clock) cfg.wall_clock = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased multi-index Monte Carlo experiment driver"};
  app.require_subcommand(1);
  Overrides o;

  using Command = std::vector<std::filesystem::path> (*)(const umimc::harness::ExperimentConfig&,
                                                         const std::filesystem::path&);
  const std::pair<const char*, Command> commands[] = {
      {"generate-data", umimc::harness::cmd_generate_data},
      {"calibrate", umimc::harness::cmd_calibrate},
      {"reference", umimc::harness::cmd_reference},
      {"run", umimc::harness::cmd_run},
      {"compare", umimc::harness::cmd_compare},
  };
  const char* help[] = {"Simulate SPDE observations at the master resolution",
                        "Pilot moment tables and the optimal truncation law",
                        "High-accuracy reference value",
                        "Run UMIMC and/or MIMC repetitions and write trajectories",
                        "RMSE curves against the reference"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_common(subs.back(), o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto cfg = resolve(o);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      for (const auto& p : commands[i].second(cfg, cfg.out_dir)) std::cout << p.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "umimc: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
