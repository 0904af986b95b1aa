#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgn/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serre-Green-Naghdi solvers and structure verification"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run the configured simulation");
  run->add_option("config", config, "configuration file")->required();

  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "run the structure-verification battery");
  verify->add_option("--seed", seed, "seed for the random states");

  std::vector<std::size_t> resolutions;
  auto* conv = app.add_subcommand("convergence", "convergence table for the configured scenario");
  conv->add_option("config", config, "configuration file")->required();
  conv->add_option("--resolutions", resolutions, "grid sizes, coarse to fine")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "run all three schemes from the same data");
  compare->add_option("config", config, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return sgn::cmd_run(config, std::cout, std::cerr);
  if (verify->parsed()) return sgn::cmd_verify(seed, std::cout, std::cerr);
  if (conv->parsed()) return sgn::cmd_convergence(config, resolutions, std::cout, std::cerr);
  return sgn::cmd_compare(config, std::cout, std::cerr);
}
