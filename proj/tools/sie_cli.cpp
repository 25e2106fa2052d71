#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral entangling-strength experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for grid points")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");

  std::string config;
  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config, "config file")->required();

  std::string inject;
  auto* self = app.add_subcommand("selftest", "run every experiment at reduced size plus property checks");
  self->add_option("--inject", inject, "deliberate fault for testing the harness")->check(CLI::IsMember({"lambda-order"}));

  auto* list = app.add_subcommand("schemas", "print the parameter schema of every experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    std::cout << sie::cli::schema_markdown();
    return 0;
  }
  if (*run) {
    sie::cli::RunOverrides o;
    if (!out_dir.empty()) o.out = out_dir;
    if (*seed_opt) o.seed = seed;
    o.threads = threads;
    return sie::cli::run_config(config, o, std::cerr);
  }
  sie::cli::SelftestOptions o;
  if (!out_dir.empty()) o.out = out_dir;
  if (*seed_opt) o.seed = seed;
  o.threads = threads;
  o.inject = inject;
  return sie::cli::selftest(o, std::cout);
}
