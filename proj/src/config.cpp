#include "openrds/config.hpp"

#include <fstream>
#include <sstream>

namespace openrds {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

rational rational_from_json(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      bigint num(s.substr(0, slash));
      bigint den(s.substr(slash + 1));
      return rational(num, den);
    }
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos)
      return rational_from_double(std::stod(s));
    return rational(bigint(s));
  }
  if (v.is_number_integer()) return rational(v.get<long long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw std::invalid_argument("expected a rational (string \"p/q\" or number)");
}

namespace {

DrivingSystem parse_driving(const json& j, std::uint64_t seed_override) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid") {
    auto p = j.at("p").get<std::vector<double>>();
    std::uint64_t seed = j.value("seed", 0ULL);
    if (seed_override != 0) seed = seed_override;
    return DrivingSystem::iid(std::move(p), seed);
  }
  if (kind == "constant") return DrivingSystem::constant(j.value("symbol", 0));
  if (kind == "periodic") return DrivingSystem::periodic(j.at("word").get<std::vector<int>>());
  if (kind == "rotation") {
    std::vector<rational> arcs;
    for (const auto& a : j.at("arcs")) arcs.push_back(rational_from_json(a));
    return DrivingSystem::rotation_coded(rational_from_json(j.at("alpha")), std::move(arcs),
                                         j.contains("angle") ? rational_from_json(j.at("angle"))
                                                             : rational(0));
  }
  throw std::invalid_argument("driving.kind must be iid|constant|periodic|rotation");
}

PiecewiseLinearMap parse_map(const json& j) {
  const std::string preset = j.at("preset").get<std::string>();
  if (preset == "linear_full") return PiecewiseLinearMap::linear_full(j.at("k").get<int>());
  if (preset == "beta") return PiecewiseLinearMap::beta(rational_from_json(j.at("beta")));
  if (preset == "three_branch")
    return PiecewiseLinearMap::three_branch(rational_from_json(j.at("s")));
  if (preset == "beta_shift")
    return PiecewiseLinearMap::beta_shift(rational_from_json(j.at("beta")),
                                          rational_from_json(j.at("r")));
  if (preset == "custom") {
    std::vector<Branch> branches;
    for (const auto& b : j.at("branches"))
      branches.push_back({Interval(rational_from_json(b.at("lo")), rational_from_json(b.at("hi"))),
                          rational_from_json(b.at("slope")),
                          rational_from_json(b.at("intercept"))});
    return PiecewiseLinearMap::custom(std::move(branches));
  }
  throw std::invalid_argument("map preset must be linear_full|beta|three_branch|beta_shift|custom");
}

HoleFamily parse_holes(const json& j, std::size_t symbols) {
  if (j.is_null()) return HoleFamily::empty(static_cast<int>(symbols));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") return HoleFamily::empty(static_cast<int>(symbols));
  if (kind == "fixed") {
    std::vector<IntervalSet> sets;
    for (const auto& per_symbol : j.at("sets")) {
      std::vector<Interval> parts;
      for (const auto& iv : per_symbol)
        parts.emplace_back(rational_from_json(iv.at(0)), rational_from_json(iv.at(1)));
      sets.push_back(IntervalSet(std::move(parts)));
    }
    if (sets.size() == 1 && symbols > 1) sets.resize(symbols, sets.front());
    if (sets.size() != symbols)
      throw std::invalid_argument("hole.sets: one entry (or one shared entry) per symbol");
    return HoleFamily::fixed(std::move(sets));
  }
  if (kind == "balls") {
    std::vector<rational> centers;
    for (const auto& c : j.at("centers")) centers.push_back(rational_from_json(c));
    if (centers.size() == 1 && symbols > 1) centers.resize(symbols, centers.front());
    std::vector<rational> factors(centers.size(), rational(1));
    if (j.contains("radius_factors")) {
      factors.clear();
      for (const auto& f : j.at("radius_factors")) factors.push_back(rational_from_json(f));
      if (factors.size() == 1) factors.resize(centers.size(), factors.front());
    }
    return HoleFamily::balls(std::move(centers), std::move(factors));
  }
  throw std::invalid_argument("hole.kind must be none|fixed|balls");
}

}  // namespace

std::vector<IntervalSet> ExperimentConfig::holes_at(const rational& eps) const {
  std::vector<IntervalSet> out;
  for (std::size_t s = 0; s < maps.size(); ++s)
    out.push_back(holes.hole(static_cast<int>(s), eps));
  return out;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.hash = [&] {
    std::ostringstream os;
    os << std::hex << fnv1a64(j.dump());
    return os.str();
  }();

  cfg.seed = j.value("seed", 0ULL);
  cfg.driving = parse_driving(j.at("driving"), cfg.seed);
  for (const auto& m : j.at("maps")) cfg.maps.push_back(parse_map(m));
  if (cfg.maps.size() == 1 && cfg.driving.symbol_count() > 1)
    cfg.maps.resize(static_cast<std::size_t>(cfg.driving.symbol_count()), cfg.maps.front());
  if (static_cast<int>(cfg.maps.size()) < cfg.driving.symbol_count())
    throw std::invalid_argument("config: need one map per driving symbol");

  if (j.contains("weight")) cfg.weight.exponent = rational_from_json(j.at("weight").at("exponent"));
  cfg.holes = parse_holes(j.contains("hole") ? j.at("hole") : json(), cfg.maps.size());

  if (j.contains("eps")) {
    cfg.eps0 = rational_from_json(j.at("eps").at("eps0"));
    cfg.eps_count = j.at("eps").value("count", 11);
  }
  if (j.contains("grid")) cfg.grid_hint = j.at("grid").value("cells", 4096);
  if (j.contains("orbit")) {
    cfg.orbit_forward = j.at("orbit").value("forward", 10000L);
    cfg.orbit_backward = j.at("orbit").value("backward", 400L);
  }
  if (j.contains("burn_in")) {
    cfg.burn_density = j.at("burn_in").value("density", 50L);
    cfg.burn_spectral = j.at("burn_in").value("spectral", 60L);
  }
  cfg.steps = j.value("steps", 10000L);
  cfg.k_max = j.value("k_max", 20);

  const std::size_t symbols = cfg.maps.size();
  if (j.contains("t")) {
    if (j.at("t").is_array())
      cfg.t = j.at("t").get<std::vector<double>>();
    else
      cfg.t.assign(symbols, j.at("t").get<double>());
    if (cfg.t.size() == 1) cfg.t.resize(symbols, cfg.t.front());
  } else {
    cfg.t.assign(symbols, 1.0);
  }
  if (j.contains("n_list")) {
    cfg.n_list = j.at("n_list").get<std::vector<long>>();
  } else {
    for (int p = 7; p <= 14; ++p) cfg.n_list.push_back(1L << p);
  }
  if (j.contains("mc")) {
    cfg.mc_samples = j.at("mc").value("samples", 100000L);
    cfg.mc_n = j.at("mc").value("n", 10000L);
  }
  cfg.out_dir = j.value("out", std::string("out"));

  if (j.contains("observation")) {
    const auto& o = j.at("observation");
    const std::string preset = o.value("preset", std::string("neg_distance"));
    std::vector<rational> centers;
    for (const auto& c : o.at("centers")) centers.push_back(rational_from_json(c));
    if (centers.size() == 1) centers.resize(symbols, centers.front());
    for (const auto& c : centers) {
      ObservationFunction f;
      f.kind = preset == "neg_log_distance" ? ObservationFunction::Kind::NegLogDistance
                                            : ObservationFunction::Kind::NegDistance;
      f.center = c;
      cfg.observations.push_back(f);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  return parse_config(j);
}

bool ValidationReport::ok() const {
  for (const auto& item : items)
    if (item.hard && !item.passed) return false;
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& item : items)
    os << (item.passed ? "[ok]   " : (item.hard ? "[FAIL] " : "[warn] ")) << item.name
       << (item.detail.empty() ? "" : ": " + item.detail) << "\n";
  return os.str();
}

ValidationReport validate(const ExperimentConfig& cfg) {
  ValidationReport rep;
  auto add = [&](std::string name, bool passed, bool hard, std::string detail = "") {
    rep.items.push_back({std::move(name), passed, hard, std::move(detail)});
  };

  bool expanding = true;
  std::string slow;
  for (std::size_t s = 0; s < cfg.maps.size(); ++s)
    if (cfg.maps[s].min_abs_slope() <= 1) {
      expanding = false;
      slow = "symbol " + std::to_string(s);
    }
  add("uniform expansion (all |slope| > 1)", expanding, true, slow);

  const auto schedule = cfg.eps_schedule();
  bool full_branch = true;
  std::string offender;
  for (const auto& eps : schedule) {
    TransferCocycle* null_cc = nullptr;
    (void)null_cc;
    std::vector<IntervalSet> holes = cfg.holes_at(eps);
    for (std::size_t s = 0; s < cfg.maps.size() && full_branch; ++s) {
      if (holes[s].is_empty()) continue;
      bool found = false;
      for (const auto& br : cfg.maps[s].branches())
        if (br.is_full() && intersect(IntervalSet(br.domain), holes[s]).is_empty()) {
          found = true;
          break;
        }
      if (!found) {
        full_branch = false;
        offender = "symbol " + std::to_string(s) + " at eps=" + to_string(eps);
      }
    }
    if (!cfg.holes.parametric()) break;  // fixed holes: one pass suffices
  }
  add("full branch outside every hole", full_branch, true, offender);

  bool nested = true;
  for (std::size_t s = 0; s < cfg.maps.size(); ++s)
    nested = nested && cfg.holes.nested(static_cast<int>(s), schedule);
  add("hole family nested along the eps schedule", nested, true);

  auto [cells, aligned] =
      choose_grid_cells(cfg.maps, cfg.holes_at(cfg.eps0), cfg.grid_hint);
  bool integer_slopes = true;
  for (const auto& m : cfg.maps) integer_slopes = integer_slopes && m.integer_slopes();
  add("grid-exact transfer action", aligned && integer_slopes, false,
      aligned && integer_slopes ? "cells=" + std::to_string(cells)
                                : "approximate-grid (Ulam projection)");

  bool t_ok = true;
  for (double t : cfg.t) t_ok = t_ok && t >= 0;
  add("nonnegative scaling t", t_ok, true);

  return rep;
}

}  // namespace openrds
