#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "common.hpp"

#include "openrds/perturb.hpp"
#include "openrds/trajectory.hpp"

using namespace rdstest;

TEST_CASE("perturbation delta") {
  SUBCASE("doubling with a left-edge hole: delta equals the hole length") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    HoleFamily holes = HoleFamily::balls({rat(0)});
    FiberOrbit orbit = const_orbit(8, 8);
    CHECK(perturbation_delta(cc, orbit, holes, rat(1, 64)) ==
          doctest::Approx(1.0 / 64.0).epsilon(1e-14));
  }
  SUBCASE("empty hole gives zero") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    CHECK(perturbation_delta(cc, orbit, HoleFamily::empty(1), rat(1, 64)) == 0.0);
  }
  SUBCASE("three-branch centered ball: delta is the full ball width") {
    TransferCocycle cc({three2()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    CHECK(perturbation_delta(cc, orbit, HoleFamily::balls({rat(1, 2)}), rat(1, 128)) ==
          doctest::Approx(2.0 / 128.0).epsilon(1e-14));
  }
}

TEST_CASE("return ratios, exact values") {
  SUBCASE("beta(3), left-edge hole: immediate-return ratio is 1/3 for every small eps") {
    TransferCocycle cc({beta3()}, WeightSpec{rational(1)}, Grid(16));
    HoleFamily holes = HoleFamily::balls({rat(0)});
    FiberOrbit orbit = const_orbit(40, 40);
    for (long denom : {16L, 64L, 1024L}) {
      ReturnRatioSeries s = return_ratios(cc, orbit, holes, rat(1, denom), 0, 3);
      CHECK(s.values[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
  }
  SUBCASE("beta(3): no second-step returns while the hole is shorter than 1/9") {
    TransferCocycle cc({beta3()}, WeightSpec{rational(1)}, Grid(16));
    HoleFamily holes = HoleFamily::balls({rat(0)});
    FiberOrbit orbit = const_orbit(40, 40);
    ReturnRatioSeries s = return_ratios(cc, orbit, holes, rat(1, 16), 0, 1);
    CHECK(s.values[1] == 0.0);
  }
  SUBCASE("doubling, hole away from any fixed point: no immediate returns") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    HoleFamily holes = HoleFamily::balls({rat(1, 5)});
    FiberOrbit orbit = const_orbit(40, 40);
    ReturnRatioSeries s = return_ratios(cc, orbit, holes, rat(1, 256), 0, 0);
    CHECK(s.values[0] == 0.0);
  }
  SUBCASE("empty-mass origin is rejected") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(40, 40);
    CHECK_THROWS_WITH_AS(
        return_ratios(cc, orbit, HoleFamily::empty(1), rat(1, 16), 0, 2),
        doctest::Contains("Omega_+"), std::runtime_error);
  }
  SUBCASE("partial sums are nondecreasing and bounded by one") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    HoleFamily holes = HoleFamily::fixed({iv(1, 2, 1, 1)});
    FiberOrbit orbit = const_orbit(48, 48);
    ReturnRatioSeries s = return_ratios(cc, orbit, holes, rat(1, 1024), 0, 40);
    double acc = 0;
    for (double q : s.values) {
      CHECK(q >= 0.0);
      acc += q;
      CHECK(acc <= 1.0 + 1e-10);
    }
    CHECK(acc > 1.0 - 1e-3);
    // geometric first returns 2^-(k+1) for this escape hole, exactly
    for (int k = 0; k <= 8; ++k)
      CHECK(s.values[static_cast<std::size_t>(k)] ==
            doctest::Approx(std::pow(0.5, k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("return ratios agree with a Monte Carlo oracle within 3 standard errors") {
  TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
  HoleFamily holes = HoleFamily::fixed({iv(1, 2, 1, 1)});
  FiberOrbit orbit = const_orbit(48, 48);
  ReturnRatioSeries s = return_ratios(cc, orbit, holes, rat(1, 2), 0, 5);

  TrajectorySimulator sim({doubling()});
  REQUIRE(sim.exact_in_law());
  auto ranges = to_u64_ranges(iv(1, 2, 1, 1));
  const long samples = 200000;
  std::vector<long> counts(7, 0);
  Rng rng(20240810);
  for (long i = 0; i < samples; ++i) {
    // uniform start inside the hole [1/2, 1)
    std::uint64_t u = (rng.next_u64() >> 1) | 0x8000000000000000ULL;
    for (int k = 0; k <= 6; ++k) {
      u = sim.step(u, 0, rng);
      if (in_ranges(u, ranges)) {
        counts[static_cast<std::size_t>(k)]++;
        break;
      }
    }
  }
  for (int k = 0; k <= 5; ++k) {
    double p = static_cast<double>(counts[static_cast<std::size_t>(k)]) / samples;
    double se = std::sqrt(p * (1 - p) / samples);
    CHECK(std::abs(p - s.values[static_cast<std::size_t>(k)]) < 3.0 * se + 1e-9);
  }
}

TEST_CASE("extremal index estimates") {
  SUBCASE("iid beta {3,5}: per-fiber value 1 - 1/beta of the previous fiber") {
    std::vector<PiecewiseLinearMap> maps = {beta3(), PiecewiseLinearMap::beta(rational(5))};
    TransferCocycle cc(maps, WeightSpec{rational(1)}, Grid(16));
    DrivingSystem drive = DrivingSystem::iid({0.5, 0.5}, 101);
    FiberOrbit orbit = drive.orbit(64, 64);
    HoleFamily holes = HoleFamily::balls({rat(0), rat(0)});
    auto schedule = geometric_schedule(make_rational(1, 1024), 8);
    for (long origin = 2; origin < 8; ++origin) {
      ExtremalIndexEstimate est = extremal_index(cc, orbit, holes, schedule, 20, origin);
      double beta_prev = orbit.symbol(origin - 1) == 0 ? 3.0 : 5.0;
      CHECK(std::abs(est.theta() - (1.0 - 1.0 / beta_prev)) < 1e-3);
      CHECK(est.converged);
    }
  }
  SUBCASE("three-branch family with centered holes: theta = 1/2") {
    TransferCocycle cc({three2()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(64, 64);
    HoleFamily holes = HoleFamily::balls({rat(1, 2)});
    auto schedule = geometric_schedule(make_rational(1, 1024), 8);
    ExtremalIndexEstimate est = extremal_index(cc, orbit, holes, schedule, 20, 0);
    CHECK(std::abs(est.theta() - 0.5) < 1e-3);
  }
  SUBCASE("hole at a point that never recurs: theta = 1") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(64, 64);
    HoleFamily holes = HoleFamily::balls({rat(1, 6)});
    auto schedule = geometric_schedule(make_rational(1, 1024), 8);
    ExtremalIndexEstimate est = extremal_index(cc, orbit, holes, schedule, 20, 0);
    CHECK(std::abs(est.theta() - 1.0) < 1e-3);
    for (double tail : est.tail) CHECK(tail <= 1.0);
  }
  SUBCASE("orbit average matches the marginal mixture") {
    std::vector<PiecewiseLinearMap> maps = {beta3(), PiecewiseLinearMap::beta(rational(5))};
    TransferCocycle cc(maps, WeightSpec{rational(1)}, Grid(16));
    DrivingSystem drive = DrivingSystem::iid({0.5, 0.5}, 404);
    FiberOrbit orbit = drive.orbit(32, 2100);
    HoleFamily holes = HoleFamily::balls({rat(0), rat(0)});
    OrbitThetaAverage avg =
        extremal_index_orbit_average(cc, orbit, holes, make_rational(1, 1 << 17), 20, 2000);
    CHECK(std::abs(avg.mean - 11.0 / 15.0) < 5e-3);
    // the per-origin values recover the fiberwise formula
    for (long o = 0; o < 50; ++o) {
      double beta_prev = orbit.symbol(o - 1) == 0 ? 3.0 : 5.0;
      CHECK(std::abs(avg.per_origin[static_cast<std::size_t>(o)] - (1.0 - 1.0 / beta_prev)) <
            2e-3);
    }
  }
  SUBCASE("grid refinement does not move the interval-engine estimate") {
    HoleFamily holes = HoleFamily::balls({rat(0)});
    FiberOrbit orbit = const_orbit(32, 32);
    auto schedule = geometric_schedule(make_rational(1, 1024), 4);
    TransferCocycle coarse({doubling()}, WeightSpec{rational(1)}, Grid(32));
    TransferCocycle fine({doubling()}, WeightSpec{rational(1)}, Grid(64));
    ExtremalIndexEstimate a = extremal_index(coarse, orbit, holes, schedule, 15, 0);
    ExtremalIndexEstimate b = extremal_index(fine, orbit, holes, schedule, 15, 0);
    for (std::size_t i = 0; i < a.theta_raw.size(); ++i)
      CHECK(std::abs(a.theta_raw[i] - b.theta_raw[i]) < 1e-9);
  }
}

TEST_CASE("first-order multiplier drop") {
  TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(1 << 12));
  FiberOrbit orbit = const_orbit(360, 360);
  HoleFamily holes = HoleFamily::balls({rat(0)});
  std::vector<rational> schedule;
  for (int j = 4; j <= 10; ++j) schedule.push_back(make_rational(1, 1L << j));
  FirstOrderTable table = first_order_table(cc, orbit, holes, schedule, 20);
  REQUIRE(table.rows.size() == schedule.size());
  // the ratio approaches theta = 1/2 linearly in the hole size
  double final_err = std::abs(table.rows.back().ratio - 0.5);
  CHECK(final_err < 3e-3);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    CHECK(std::abs(table.rows[i].ratio - 0.5) <=
          std::abs(table.rows[i - 1].ratio - 0.5) + 1e-12);
  }
  CHECK(std::abs(table.theta_target - 0.5) < 5e-3);
}

TEST_CASE("escape rate asymptotics ratio tables") {
  SUBCASE("doubling, fixed-point hole: ratio tends to 1/2") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(1 << 10));
    FiberOrbit orbit = const_orbit(80, 2100);
    HoleFamily holes = HoleFamily::balls({rat(0)});
    std::vector<rational> schedule = {rat(1, 1 << 6), rat(1, 1 << 8), rat(1, 1 << 10)};
    auto rows = escape_rate_ratio_table(cc, orbit, holes, schedule, 400, 60);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(std::abs(rows[i].ratio - 0.5) < std::abs(rows[i - 1].ratio - 0.5));
    CHECK(std::abs(rows.back().ratio - 0.5) < 3e-3);
  }
  SUBCASE("hole at a nonrecurrent point: ratio tends to 1") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(6 * (1 << 11)));
    FiberOrbit orbit = const_orbit(80, 2100);
    HoleFamily holes = HoleFamily::balls({rat(1, 6)});
    std::vector<rational> schedule = {rat(1, 1 << 7), rat(1, 1 << 9), rat(1, 1 << 11)};
    auto rows = escape_rate_ratio_table(cc, orbit, holes, schedule, 400, 60);
    CHECK(std::abs(rows.back().ratio - 1.0) < std::abs(rows.front().ratio - 1.0) + 1e-12);
    CHECK(std::abs(rows.back().ratio - 1.0) < 1e-2);
  }
}
