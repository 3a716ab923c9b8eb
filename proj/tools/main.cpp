#include <iostream>

#include <CLI11.hpp>

#include "optreg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal error regions (maximum-likelihood and smallest credible regions) from click counts"};
  app.require_subcommand(1);

  optreg::CommandOptions options;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double target = 0.0;
  std::string mode;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"simulate", "draw simulated counts for a true state"},
      {"regions", "size/credibility curves, fit and summary"},
      {"find", "lambda for a target size or credibility, with contour"},
      {"member", "is a point inside the region of given size or credibility"},
      {"boundary", "boundary contour at a lambda or target"},
      {"tiling", "equal-size tiling of the disk"},
      {"oracle", "quadrature reference curve for the coin"},
      {"confidence", "confidence level of a coin region set"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", options.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "output directory");
    sub->add_option("--samples", samples, "Monte Carlo sample count");
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--target", target, "target size or credibility in (0, 1)");
    sub->add_option("--mode", mode, "size | credibility")->check(CLI::IsMember({"size", "credibility"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : optreg::kExitUsage;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    options.command = sub->get_name();
    if (sub->count("--samples")) options.samples = samples;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--target")) options.target = target;
    if (sub->count("--mode")) options.mode = mode;
  }
  return optreg::run_command(options, std::cout, std::cerr);
}
