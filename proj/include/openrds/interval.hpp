#pragma once

#include <optional>
#include <vector>

#include "openrds/rational.hpp"

namespace openrds {

// Half-open subinterval [lo, hi) of the unit interval.
struct Interval {
  rational lo;
  rational hi;

  Interval() : lo(0), hi(0) {}
  Interval(rational l, rational h);

  rational length() const { return hi - lo; }
  bool contains(const rational& x) const { return x >= lo && x < hi; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

Interval make_interval(double lo, double hi);

// Finite union of disjoint half-open intervals in [0,1), kept sorted and
// merged (touching intervals are coalesced). All arithmetic is exact.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval iv);
  explicit IntervalSet(std::vector<Interval> parts);  // normalizes

  static IntervalSet empty() { return IntervalSet(); }
  static IntervalSet full() { return IntervalSet(Interval(rational(0), rational(1))); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  const rational& total_length() const { return total_length_; }
  double total_length_d() const { return to_double(total_length_); }

  bool contains(const rational& x) const;
  bool contains_set(const IntervalSet& other) const;  // other subset of *this
  bool operator==(const IntervalSet& o) const { return parts_ == o.parts_; }

  IntervalSet set_union(const IntervalSet& o) const;
  IntervalSet set_intersection(const IntervalSet& o) const;
  IntervalSet complement() const;  // within [0,1)

 private:
  void normalize();
  std::vector<Interval> parts_;
  rational total_length_{0};
};

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet unite(const IntervalSet& a, const IntervalSet& b);

}  // namespace openrds
