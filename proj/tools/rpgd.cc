#include <CLI11.hpp>

#include <iostream>

#include "rpgd/harness.h"

int main(int argc, char** argv) {
  CLI::App app{"Perturbed Riemannian gradient descent experiments"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config, "config file")->required();
  run->add_option("--out", out, "output directory (overrides out_dir)");
  run->add_option("--seed", seed, "seed override");

  auto* verify = app.add_subcommand("verify", "run the lemma checks");
  verify->add_option("config", config, "config file")->required();
  verify->add_option("--out", out, "output directory (overrides out_dir)");
  verify->add_option("--seed", seed, "seed override");

  auto* thresholds =
      app.add_subcommand("thresholds", "print the threshold derivation");
  thresholds->add_option("config", config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rpgd::ExperimentConfig cfg = rpgd::load_config(config);
    if (seed) cfg.seed = *seed;
    const std::filesystem::path dir = out ? *out : cfg.out_dir;
    if (*run) return rpgd::run_to_directory(cfg, dir, std::cout);
    if (*verify) return rpgd::verify_to_directory(cfg, dir, std::cout);
    std::cout << rpgd::thresholds_text(cfg, rpgd::build_problem(cfg));
    return 0;
  } catch (const rpgd::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
