#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "common.hpp"

using namespace rdstest;

TEST_CASE("interval construction rejects malformed endpoints") {
  CHECK_THROWS(Interval(rat(1, 2), rat(1, 2)));
  CHECK_THROWS(Interval(rat(3, 4), rat(1, 4)));
  CHECK_THROWS(Interval(rat(-1, 4), rat(1, 4)));
  CHECK_THROWS(Interval(rat(1, 4), rat(5, 4)));
}

TEST_CASE("set operations are exact") {
  IntervalSet a = iv(0, 1, 1, 2);
  IntervalSet b = iv(1, 4, 3, 4);

  SUBCASE("intersection") {
    IntervalSet c = intersect(a, b);
    REQUIRE(c.size() == 1);
    CHECK(c.parts()[0].lo == rat(1, 4));
    CHECK(c.parts()[0].hi == rat(1, 2));
    CHECK(c.total_length() == rat(1, 4));
  }
  SUBCASE("complement of empty is full") {
    CHECK(IntervalSet::empty().complement().total_length() == rat(1));
    CHECK(IntervalSet::full().complement().is_empty());
  }
  SUBCASE("a union with its complement fills the interval") {
    IntervalSet u = unite(a, a.complement());
    CHECK(u.total_length() == rat(1));
    CHECK(u.size() == 1);
  }
  SUBCASE("lebesgue additivity is exact") {
    IntervalSet u = unite(a, b);
    IntervalSet c = intersect(a, b);
    CHECK(u.total_length() + c.total_length() == a.total_length() + b.total_length());
  }
}

TEST_CASE("touching parts are merged") {
  IntervalSet s(std::vector<Interval>{Interval(rat(0), rat(1, 4)), Interval(rat(1, 4), rat(1, 2))});
  CHECK(s.size() == 1);
  CHECK(s.total_length() == rat(1, 2));
}

TEST_CASE("subset queries via measure") {
  IntervalSet big = iv(0, 1, 3, 4);
  IntervalSet small = iv(1, 8, 1, 2);
  CHECK(big.contains_set(small));
  CHECK_FALSE(small.contains_set(big));
  CHECK(big.contains(rat(1, 8)));
  CHECK_FALSE(big.contains(rat(3, 4)));  // half-open on the right
}

TEST_CASE("membership over many random rationals agrees with brute force") {
  IntervalSet s(std::vector<Interval>{Interval(rat(1, 10), rat(2, 10)),
                                      Interval(rat(5, 10), rat(7, 10))});
  for (long num = 0; num < 100; ++num) {
    rational x = rat(num, 100);
    bool expect = (x >= rat(1, 10) && x < rat(2, 10)) || (x >= rat(5, 10) && x < rat(7, 10));
    CHECK(s.contains(x) == expect);
  }
}
