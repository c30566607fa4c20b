#include <cstdint>
#include <string>
#include <utility>
#include <iostream>

#include <CLI11.hpp>

#include "boa/cli/commands.hpp"
#include "boa/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Alias-free frequency-domain resampling: experiments and checks"};
  app.require_subcommand(1, 1);

  std::string config_path;
  boa::cli::Overrides overrides;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  std::string op;

  const std::pair<const char*, const char*> commands[] = {
      {"roundtrip", "Run images through each operator pipeline and score the output"},
      {"attack", "PGD attack at each iteration budget; PSNR/SSIM table"},
      {"spectrum", "Log-magnitude spectra of the input, every stage and the output"},
      {"alias-audit", "Sweep cosine probes and tabulate aliased energy per operator"},
      {"gradcheck", "Finite-difference check of every registered adjoint"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment JSON file")->required();
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Random seed (overrides seed)");
    sub->add_option("--depth", depth, "Pipeline depth (overrides depth)")->check(CLI::PositiveNumber);
    sub->add_option("--operator", op, "Single operator preset (overrides operators)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) overrides.output_dir = out;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--depth")) overrides.depth = depth;
  if (sub->count("--operator")) overrides.op = op;

  try {
    boa::cli::ExperimentConfig cfg = boa::cli::read_config(config_path);
    cfg.command = boa::cli::command_from_string(sub->get_name());
    boa::cli::apply_overrides(cfg, overrides);
    cfg.validate();
    const boa::cli::CommandOutcome outcome = boa::cli::run_command(cfg);
    std::cout << outcome.report;
    return outcome.exit_code;
  } catch (const boa::ConfigError& e) {
    std::cerr << "boa: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "boa: " << e.what() << "\n";
    return 1;
  }
}
