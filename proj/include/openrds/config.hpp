#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "openrds/driving.hpp"
#include "openrds/evt.hpp"
#include "openrds/open_system.hpp"

namespace openrds {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  nlohmann::json raw;
  std::string hash;

  DrivingSystem driving = DrivingSystem::constant(0);
  std::vector<PiecewiseLinearMap> maps;
  WeightSpec weight;
  HoleFamily holes = HoleFamily::empty(1);
  rational eps0 = make_rational(1, 1024);
  int eps_count = 11;
  int grid_hint = 4096;
  long orbit_forward = 10000;
  long orbit_backward = 400;
  long burn_density = 50;
  long burn_spectral = 60;
  long steps = 10000;
  int k_max = 20;
  std::vector<double> t;
  std::vector<long> n_list;
  long mc_samples = 100000;
  long mc_n = 10000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<ObservationFunction> observations;

  std::vector<rational> eps_schedule() const { return geometric_schedule(eps0, eps_count); }
  std::vector<IntervalSet> holes_at(const rational& eps) const;
};

rational rational_from_json(const nlohmann::json& v);
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ValidationItem {
  std::string name;
  bool passed = false;
  bool hard = false;  // hard failures abort the run
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool ok() const;
  std::string summary() const;
};

// Structural hypotheses behind the numerics: uniform expansion, a full branch
// outside every hole, nesting of the hole schedule, grid alignment.
ValidationReport validate(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace openrds
