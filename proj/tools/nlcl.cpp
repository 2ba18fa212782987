// Command-line front end: nlcl <simulate|linear-decay|check|fit|report> --config FILE [--out DIR] [--seed N]
// [--resume CHECKPOINT]. Worker threads for decay studies come from NLCL_WORKERS.

#include "nlcl/cli/runner.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral solver and diagnostics for compressible nematic liquid crystal flow"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string resume;

  for (const auto& [name, help] : {
           std::pair{"simulate", "integrate a scenario and write norms.csv and checkpoints"},
           std::pair{"linear-decay", "whole-space linear decay study, writes decay.csv"},
           std::pair{"check", "simulate and evaluate inequality monitors, writes inequalities.json"},
           std::pair{"fit", "fit decay exponents to the columns of an existing norms.csv"},
           std::pair{"report", "summarize the artifacts in an output directory"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    auto* r = sub->add_option("--resume", resume, "continue from a checkpoint file")->check(CLI::ExistingFile);
    if (std::string(name) != "simulate" && std::string(name) != "check") r->group("");
  }

  CLI11_PARSE(app, argc, argv);
  const CLI::App* sub = app.get_subcommands().front();

  try {
    nlcl::cli::RunConfig cfg = nlcl::cli::load_config(config_path);
    cfg.mode = nlcl::cli::mode_from_string(sub->get_name());
    nlcl::cli::RunOptions opt;
    if (sub->count("--out")) opt.out_dir = out_dir;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--resume")) {
      if (cfg.mode != nlcl::cli::Mode::simulate && cfg.mode != nlcl::cli::Mode::check)
        throw nlcl::ConfigError("--resume applies to simulate and check only");
      opt.resume = resume;
    }
    return nlcl::cli::run(std::move(cfg), opt);
  } catch (const nlcl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const nlcl::IntegrationError& e) {
    std::cerr << "integration error at step " << e.step() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
