#include "openrds/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace openrds {

namespace {
// Endpoints produced by affine pullbacks can acquire huge denominators from
// double-precision inputs. Endpoints closer together than this are merged.
const rational kSnapTolerance = make_rational(1, 10'000'000'000'000LL);  // 1e-13
}  // namespace

Interval::Interval(rational l, rational h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo < 0 || hi > 1 || lo >= hi)
    throw std::invalid_argument("Interval: need 0 <= lo < hi <= 1");
}

Interval make_interval(double lo, double hi) {
  return Interval(rational_from_double(lo), rational_from_double(hi));
}

IntervalSet::IntervalSet(Interval iv) : parts_{std::move(iv)} { normalize(); }

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
  normalize();
}

void IntervalSet::normalize() {
  std::sort(parts_.begin(), parts_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  merged.reserve(parts_.size());
  for (auto& iv : parts_) {
    if (!merged.empty() && iv.lo - merged.back().hi <= kSnapTolerance) {
      if (iv.hi > merged.back().hi) merged.back().hi = iv.hi;
    } else {
      merged.push_back(iv);
    }
  }
  parts_ = std::move(merged);
  total_length_ = 0;
  for (const auto& iv : parts_) total_length_ += iv.length();
}

bool IntervalSet::contains(const rational& x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](const rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == parts_.begin()) return false;
  --it;
  return it->contains(x);
}

bool IntervalSet::contains_set(const IntervalSet& other) const {
  return intersect(*this, other).total_length() == other.total_length();
}

IntervalSet IntervalSet::set_union(const IntervalSet& o) const {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), o.parts_.begin(), o.parts_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::set_intersection(const IntervalSet& o) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < parts_.size() && j < o.parts_.size()) {
    const Interval& a = parts_[i];
    const Interval& b = o.parts_[j];
    rational lo = std::max(a.lo, b.lo);
    rational hi = std::min(a.hi, b.hi);
    if (lo < hi) out.emplace_back(lo, hi);
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::complement() const {
  std::vector<Interval> out;
  rational cursor(0);
  for (const auto& iv : parts_) {
    if (cursor < iv.lo) out.emplace_back(cursor, iv.lo);
    cursor = iv.hi;
  }
  if (cursor < 1) out.emplace_back(cursor, rational(1));
  return IntervalSet(std::move(out));
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  return a.set_intersection(b);
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) { return a.set_union(b); }

}  // namespace openrds
