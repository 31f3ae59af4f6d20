#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "openrds/runners.hpp"

int main(int argc, char** argv) {
  CLI::App app{"openrds - quenched transfer-operator laboratory for random open interval maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int threads = 1;

  for (const auto& name : openrds::subcommand_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "master seed override");
    sub->add_option("--threads", threads, "worker threads for Monte Carlo");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      in >> j;
    } else if (name == "selftest") {
      j = {{"driving", {{"kind", "constant"}, {"symbol", 0}}},
           {"maps", {{{"preset", "linear_full"}, {"k", 2}}}}};
    } else {
      std::cerr << "--config is required for " << name << "\n";
      return 2;
    }
    if (seed_override != 0) j["seed"] = seed_override;
    if (!out_override.empty()) j["out"] = out_override;
    openrds::ExperimentConfig cfg = openrds::parse_config(j);
    return openrds::run_subcommand(name, cfg, threads, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
