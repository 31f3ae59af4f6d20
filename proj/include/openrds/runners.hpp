#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "openrds/config.hpp"

namespace openrds {

// Executes one experiment subcommand; writes CSV/JSON artifacts into
// cfg.out_dir. Returns the process exit code: 0 success, 2 validation
// failure, 3 numerical non-convergence.
int run_subcommand(const std::string& name, const ExperimentConfig& cfg, int threads,
                   std::ostream& log);

std::vector<std::string> subcommand_names();

struct SelftestItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Always-on property suite over the shipped presets; the pass/fail lines the
// `selftest` subcommand prints.
std::vector<SelftestItem> run_selftest(std::ostream& log);

}  // namespace openrds
