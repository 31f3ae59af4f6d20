#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "common.hpp"

#include "openrds/evt.hpp"

using namespace rdstest;

namespace {
ObservationFunction neg_distance(const rational& c) {
  ObservationFunction f;
  f.kind = ObservationFunction::Kind::NegDistance;
  f.center = c;
  return f;
}
}  // namespace

TEST_CASE("threshold solving") {
  SUBCASE("flat density, one-sided hole at 0: radius t/N with zero residual") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    ThresholdSchedule s =
        solve_thresholds(cc, orbit, {neg_distance(rat(0))}, {1.0}, {128, 1024});
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].holes[0] == iv(0, 1, 1, 128));
    CHECK(s.entries[1].holes[0] == iv(0, 1, 1, 1024));
    CHECK(s.entries[0].xi[0] == 0.0);
  }
  SUBCASE("flat density, centered hole: symmetric ball of mass t/N") {
    TransferCocycle cc({three2()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    ThresholdSchedule s = solve_thresholds(cc, orbit, {neg_distance(rat(1, 2))}, {1.0}, {256});
    CHECK(s.entries[0].holes[0] ==
          IntervalSet(Interval(rat(1, 2) - rat(1, 512), rat(1, 2) + rat(1, 512))));
    CHECK(s.entries[0].xi[0] == 0.0);
  }
  SUBCASE("zero scaling produces empty holes") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    ThresholdSchedule s = solve_thresholds(cc, orbit, {neg_distance(rat(0))}, {0.0}, {128});
    CHECK(s.entries[0].holes[0].is_empty());
  }
  SUBCASE("non-flat density: bisection meets the residual tolerance, snap bounded") {
    PiecewiseLinearMap uneven = PiecewiseLinearMap::custom(
        {Branch{Interval(rat(0), rat(1, 2)), rat(2), rat(0)},
         Branch{Interval(rat(1, 2), rat(3, 4)), rat(2), rat(-1)},
         Branch{Interval(rat(3, 4), rat(1)), rat(4), rat(-3)}});
    TransferCocycle cc({uneven}, WeightSpec{rational(1)}, Grid(256));
    FiberOrbit orbit = const_orbit(80, 80);
    ThresholdSchedule s =
        solve_thresholds(cc, orbit, {neg_distance(rat(1, 4))}, {1.0}, {64}, false);
    CHECK(std::abs(s.entries[0].xi[0]) < 1e-8);
    ThresholdSchedule snapped =
        solve_thresholds(cc, orbit, {neg_distance(rat(1, 4))}, {1.0}, {64}, true);
    InvariantDensityResult phi = invariant_density(cc, orbit, 50);
    double bound = 64.0 / 256.0 * phi.density.max_value() * 2 + 1e-9;
    CHECK(std::abs(snapped.entries[0].xi[0]) <= bound);
  }
  SUBCASE("schedule outside the small-hole regime is refused") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit orbit = const_orbit(8, 8);
    CHECK_THROWS_WITH_AS(solve_thresholds(cc, orbit, {neg_distance(rat(0))}, {4.0}, {2}),
                         doctest::Contains("small-hole"), std::invalid_argument);
  }
}

TEST_CASE("survivor probability curves") {
  SUBCASE("empty holes give the constant curve 1") {
    TransferCocycle cc({doubling()}, WeightSpec{rational(1)}, Grid(32));
    FiberOrbit orbit = const_orbit(64, 600);
    ThresholdSchedule s =
        solve_thresholds(cc, orbit, {neg_distance(rat(0))}, {0.0}, {128, 512});
    auto rows = survivor_probability_curve(cc, orbit, s);
    for (const auto& r : rows) {
      CHECK(r.nu_survivor == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.mu_survivor == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.lambda_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("three-branch fixed-point holes approach exp(-1/2)") {
    const long maxN = 1 << 11;
    ThresholdSchedule sched;
    TransferCocycle probe({three2()}, WeightSpec{rational(1)}, Grid(16));
    FiberOrbit small_orbit = const_orbit(8, 8);
    sched = solve_thresholds(probe, small_orbit, {neg_distance(rat(1, 2))}, {1.0},
                             {maxN / 4, maxN});
    std::vector<IntervalSet> align;
    for (auto& e : sched.entries) align.insert(align.end(), e.holes.begin(), e.holes.end());
    auto [cells, aligned] = choose_grid_cells({three2()}, align, 1024);
    REQUIRE(aligned);
    TransferCocycle cc({three2()}, WeightSpec{rational(1)}, Grid(cells));
    FiberOrbit orbit = const_orbit(80, maxN + 80);
    auto rows = survivor_probability_curve(cc, orbit, sched);
    const double target = std::exp(-0.5);
    CHECK(std::abs(rows.back().nu_survivor - target) < 0.03);
    CHECK(std::abs(rows.back().nu_survivor - rows.back().mu_survivor) < 1e-10);
    CHECK(std::abs(rows.back().nu_survivor - rows.back().lambda_ratio) < 1e-2);
    // deeper N comes closer
    CHECK(std::abs(rows.back().nu_survivor - target) <
          std::abs(rows.front().nu_survivor - target) + 1e-4);
  }
}

TEST_CASE("gumbel prediction combinators") {
  FiberOrbit orbit = const_orbit(4, 4);
  SUBCASE("theta 1, scaling 1 gives 1/e") {
    std::vector<double> theta(5, 1.0);
    CHECK(gumbel_prediction(theta, {1.0}, orbit) == doctest::Approx(std::exp(-1.0)));
  }
  SUBCASE("theta 1/2 gives exp(-1/2)") {
    std::vector<double> theta(5, 0.5);
    CHECK(gumbel_prediction(theta, {1.0}, orbit) == doctest::Approx(std::exp(-0.5)));
  }
  SUBCASE("larger scalings strictly decrease the prediction") {
    std::vector<double> theta(5, 0.7);
    double a = gumbel_prediction(theta, {1.0}, orbit);
    double b = gumbel_prediction(theta, {1.5}, orbit);
    CHECK(b < a);
  }
}

TEST_CASE("hitting-time Monte Carlo") {
  SUBCASE("doubling, hole at the fixed point: exponential with rate 1/2") {
    const long N = 1 << 10;
    std::vector<IntervalSet> holes = {IntervalSet(Interval(rat(0), rat(1, N)))};
    HittingTimeResult r = hitting_time_mc({doubling()}, DrivingSystem::constant(0), holes,
                                          {1.0}, 1.0 / N, 20000, 99, 0.5);
    CHECK(r.exact_in_law);
    CHECK(r.ks_statistic < 0.05);
  }
  SUBCASE("cylinder hole at a nonrecurrent point: standard exponential") {
    // depth-10 dyadic cylinder containing 1/6
    std::vector<IntervalSet> holes = {iv(170, 1024, 171, 1024)};
    HittingTimeResult r = hitting_time_mc({doubling()}, DrivingSystem::constant(0), holes,
                                          {1.0}, 1.0 / 1024.0, 20000, 7, 1.0);
    CHECK(r.ks_statistic < 0.05);
  }
  SUBCASE("degenerate large holes are refused") {
    std::vector<IntervalSet> holes = {IntervalSet::full()};
    CHECK_THROWS_WITH_AS(hitting_time_mc({doubling()}, DrivingSystem::constant(0), holes, {1.0},
                                         1.0, 100, 1, 1.0),
                         doctest::Contains("small-hole"), std::invalid_argument);
  }
  SUBCASE("thread count does not change the sample set") {
    const long N = 1 << 9;
    std::vector<IntervalSet> holes = {IntervalSet(Interval(rat(0), rat(1, N)))};
    HittingTimeResult a = hitting_time_mc({doubling()}, DrivingSystem::constant(0), holes,
                                          {1.0}, 1.0 / N, 4000, 31, 0.5, 1);
    HittingTimeResult b = hitting_time_mc({doubling()}, DrivingSystem::constant(0), holes,
                                          {1.0}, 1.0 / N, 4000, 31, 0.5, 4);
    REQUIRE(a.scaled_tau.size() == b.scaled_tau.size());
    for (std::size_t i = 0; i < a.scaled_tau.size(); ++i)
      CHECK(a.scaled_tau[i] == b.scaled_tau[i]);
  }
}

TEST_CASE("KS distance helper against closed forms") {
  // the empirical CDF of the quantile grid of Exp(rate) has small distance
  std::vector<double> q;
  const double rate = 0.5;
  const int n = 1000;
  for (int i = 0; i < n; ++i)
    q.push_back(-std::log(1.0 - (i + 0.5) / n) / rate);
  std::sort(q.begin(), q.end());
  CHECK(ks_distance_to_exponential(q, rate) < 1.0 / n);
  // and a wrong rate is detected
  CHECK(ks_distance_to_exponential(q, 1.0) > 0.15);
}
