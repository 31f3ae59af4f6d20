#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "openrds/runners.hpp"

using namespace openrds;
using nlohmann::json;

namespace {

json doubling_escape_config(const std::string& out) {
  json j = json::parse(R"({
    "driving": {"kind": "constant", "symbol": 0},
    "maps": [{"preset": "linear_full", "k": 2}],
    "weight": {"exponent": "1"},
    "hole": {"kind": "fixed", "sets": [[["1/2", "1"]]]},
    "grid": {"cells": 64},
    "orbit": {"forward": 2200, "backward": 200},
    "steps": 2000
  })");
  j["out"] = out;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  ExperimentConfig cfg = parse_config(doubling_escape_config("/tmp/openrds_t0"));
  CHECK(cfg.maps.size() == 1);
  CHECK(cfg.weight.exponent == rational(1));
  CHECK(cfg.holes.hole(0, rational(1)).total_length() == make_rational(1, 2));
  CHECK_FALSE(cfg.hash.empty());
  // rationals in all supported spellings
  CHECK(rational_from_json(json("3/8")) == make_rational(3, 8));
  CHECK(rational_from_json(json(0.5)) == make_rational(1, 2));
  CHECK(rational_from_json(json(3)) == rational(3));
}

TEST_CASE("validation verdicts") {
  SUBCASE("doubling with right-half hole passes") {
    ExperimentConfig cfg = parse_config(doubling_escape_config("/tmp/openrds_t1"));
    CHECK(validate(cfg).ok());
  }
  SUBCASE("a hole straddling both branches hard-fails") {
    json j = doubling_escape_config("/tmp/openrds_t2");
    j["hole"] = json::parse(R"({"kind": "fixed", "sets": [[["1/4", "3/4"]]]})");
    ExperimentConfig cfg = parse_config(j);
    CHECK_FALSE(validate(cfg).ok());
    CHECK(run_subcommand("escape-rate", cfg, 1, std::cerr) == 2);
  }
  SUBCASE("non-integer beta is a warning, not a failure") {
    json j = doubling_escape_config("/tmp/openrds_t3");
    j["maps"] = json::parse(R"([{"preset": "beta", "beta": "5/2"}])");
    j["hole"] = json::parse(R"({"kind": "fixed", "sets": [[["0", "1/5"]]]})");
    ExperimentConfig cfg = parse_config(j);
    ValidationReport rep = validate(cfg);
    CHECK(rep.ok());
    bool warned = false;
    for (const auto& item : rep.items)
      if (!item.passed && !item.hard) warned = true;
    CHECK(warned);
  }
}

TEST_CASE("escape-rate run writes the advertised artifacts") {
  std::string out = "/tmp/openrds_run_escape";
  std::filesystem::remove_all(out);
  ExperimentConfig cfg = parse_config(doubling_escape_config(out));
  std::ostringstream log;
  REQUIRE(run_subcommand("escape-rate", cfg, 1, log) == 0);

  json summary;
  std::ifstream(out + "/escape_rate.json") >> summary;
  CHECK(std::abs(summary["escape_decay"].get<double>() - std::log(2.0)) < 1e-12);
  CHECK(std::abs(summary["escape_pressure"].get<double>() - std::log(2.0)) < 1e-12);
  CHECK(summary["config_hash"] == cfg.hash);

  std::string csv = slurp(out + "/escape_rate.csv");
  CHECK(csv.find("# openrds") == 0);
  CHECK(csv.find(cfg.hash) != std::string::npos);
  CHECK(csv.find("escape_decay") != std::string::npos);
}

TEST_CASE("runs are deterministic byte for byte") {
  std::string out1 = "/tmp/openrds_det1", out2 = "/tmp/openrds_det2";
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
  json j = doubling_escape_config(out1);
  std::ostringstream log;
  REQUIRE(run_subcommand("escape-rate", parse_config(j), 1, log) == 0);
  j["out"] = out2;
  REQUIRE(run_subcommand("escape-rate", parse_config(j), 1, log) == 0);
  // identical except the out-path echo inside the JSON config block
  CHECK(slurp(out1 + "/escape_rate.csv").substr(100) ==
        slurp(out2 + "/escape_rate.csv").substr(100));
}

TEST_CASE("bowen subcommand reports the analytic root") {
  std::string out = "/tmp/openrds_run_bowen";
  std::filesystem::remove_all(out);
  json j = json::parse(R"({
    "driving": {"kind": "constant", "symbol": 0},
    "maps": [{"preset": "linear_full", "k": 3}],
    "weight": {"exponent": "1"},
    "hole": {"kind": "fixed", "sets": [[["2/3", "1"]]]},
    "orbit": {"forward": 2200, "backward": 200},
    "steps": 2000
  })");
  j["out"] = out;
  std::ostringstream log;
  REQUIRE(run_subcommand("bowen", parse_config(j), 1, log) == 0);
  json summary;
  std::ifstream(out + "/bowen.json") >> summary;
  CHECK(std::abs(summary["h"].get<double>() - std::log(2.0) / std::log(3.0)) < 1e-6);
}

TEST_CASE("unknown subcommands are rejected") {
  ExperimentConfig cfg = parse_config(doubling_escape_config("/tmp/openrds_t9"));
  std::ostringstream log;
  CHECK(run_subcommand("no-such-thing", cfg, 1, log) == 2);
}
