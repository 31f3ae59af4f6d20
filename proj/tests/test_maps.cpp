#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "common.hpp"

using namespace rdstest;

TEST_CASE("evaluate picks the branch containing x") {
  CHECK(doubling().evaluate(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(beta3().evaluate(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  // the central branch of the three-branch family fixes 1/2
  CHECK(three2().evaluate(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(three2().evaluate_exact(rat(1, 2)) == rat(1, 2));
}

TEST_CASE("derivative magnitudes") {
  CHECK(doubling().derivative_magnitude(0.1) == doctest::Approx(2.0));
  CHECK(doubling().derivative_magnitude(0.9) == doctest::Approx(2.0));
  CHECK(three2().derivative_magnitude(0.5) == doctest::Approx(2.0));
  // outer slope 2/(1 - 1/s) = 4 at s = 2
  CHECK(three2().derivative_magnitude(0.1) == doctest::Approx(4.0));
}

TEST_CASE("preimage points, one per covering branch") {
  auto p = doubling().preimage_points(rat(1, 2));
  REQUIRE(p.size() == 2);
  CHECK(p[0].first == rat(1, 4));
  CHECK(p[1].first == rat(3, 4));

  auto q = beta3().preimage_points(rat(0));
  REQUIRE(q.size() == 3);
  CHECK(q[0].first == rat(0));
  CHECK(q[1].first == rat(1, 3));
  CHECK(q[2].first == rat(2, 3));

  auto r = three2().preimage_points(rat(1, 2));
  CHECK(r.size() == 3);
  // round trip through the map lands back on y
  for (const auto& [x, b] : r) CHECK(three2().evaluate_exact(x) == rat(1, 2));
}

TEST_CASE("pullbacks are exact interval sets") {
  SUBCASE("doubling, S = [0,1/2)") {
    IntervalSet pb = doubling().pullback(iv(0, 1, 1, 2));
    REQUIRE(pb.size() == 2);
    CHECK(pb.parts()[0] == Interval(rat(0), rat(1, 4)));
    CHECK(pb.parts()[1] == Interval(rat(1, 2), rat(3, 4)));
  }
  SUBCASE("full pullback is full") {
    CHECK(doubling().pullback(IntervalSet::full()).total_length() == rat(1));
  }
  SUBCASE("beta(3), S = [0, 3/10)") {
    IntervalSet pb = beta3().pullback(iv(0, 1, 3, 10));
    REQUIRE(pb.size() == 3);
    CHECK(pb.parts()[0] == Interval(rat(0), rat(1, 10)));
    CHECK(pb.parts()[1] == Interval(rat(1, 3), rat(1, 3) + rat(1, 10)));
    CHECK(pb.parts()[2] == Interval(rat(2, 3), rat(2, 3) + rat(1, 10)));
  }
}

TEST_CASE("pullback measure identity per full branch") {
  // Leb(pullback(S) within dom b) = Leb(S within image b) / |slope b|
  for (auto m : {doubling(), beta3(), three2()}) {
    IntervalSet s(std::vector<Interval>{Interval(rat(1, 10), rat(2, 10)),
                                        Interval(rat(4, 10), rat(9, 10))});
    IntervalSet pb = m.pullback(s);
    for (const auto& br : m.branches()) {
      rational lhs = intersect(pb, IntervalSet(br.domain)).total_length();
      rational rhs =
          intersect(s, IntervalSet(br.image())).total_length() / br.abs_slope();
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("pullback distributes over union") {
  IntervalSet a = iv(1, 10, 3, 10);
  IntervalSet b = iv(1, 2, 7, 10);
  for (auto m : {doubling(), beta3(), three2()}) {
    CHECK(m.pullback(unite(a, b)) == unite(m.pullback(a), m.pullback(b)));
  }
}

TEST_CASE("pullback endpoints map back into the closure of S") {
  IntervalSet s = iv(1, 7, 3, 7);
  for (auto m : {doubling(), beta3(), three2()}) {
    for (const auto& part : m.pullback(s).parts()) {
      for (const rational& x : {part.lo, part.hi}) {
        if (x >= 1) continue;
        rational y = m.evaluate_exact(x);
        CHECK(y >= rat(1, 7));
        CHECK(y <= rat(3, 7));
      }
    }
  }
}

TEST_CASE("presets validate their structural constraints") {
  CHECK(doubling().all_branches_full());
  CHECK(beta3().all_branches_full());
  CHECK(three2().all_branches_full());
  CHECK(doubling().integer_slopes());
  CHECK(three2().integer_slopes());
  CHECK(beta3().min_abs_slope() == rat(3));

  // non-integer beta keeps a short last branch and stays surjective
  PiecewiseLinearMap b25 = PiecewiseLinearMap::beta(rat(5, 2));
  CHECK_FALSE(b25.all_branches_full());
  CHECK(b25.branches().size() == 3);
  IntervalSet img;
  for (const auto& br : b25.branches()) img = unite(img, IntervalSet(br.image()));
  CHECK(img.total_length() == rat(1));

  // beta-shift crosses integer boundaries correctly: T(x) = 3x + 1/7 mod 1
  PiecewiseLinearMap bs = PiecewiseLinearMap::beta_shift(rational(3), rat(1, 7));
  CHECK(bs.evaluate_exact(rat(0)) == rat(1, 7));
  CHECK(bs.evaluate_exact(rat(2, 7)) == rat(0));   // 6/7 + 1/7 wraps
  CHECK(bs.evaluate_exact(rat(1, 2)) == rat(3, 2) + rat(1, 7) - 1);
  IntervalSet bsimg;
  for (const auto& br : bs.branches()) bsimg = unite(bsimg, IntervalSet(br.image()));
  CHECK(bsimg.total_length() == rat(1));
}

TEST_CASE("malformed maps are rejected") {
  // domains must partition [0,1)
  CHECK_THROWS(PiecewiseLinearMap::custom(
      {Branch{Interval(rat(0), rat(1, 2)), rat(2), rat(0)}}));
  // surjectivity is required
  CHECK_THROWS(PiecewiseLinearMap::custom(
      {Branch{Interval(rat(0), rat(1, 2)), rat(1, 2), rat(0)},
       Branch{Interval(rat(1, 2), rat(1)), rat(1, 2), rat(0)}}));
}
