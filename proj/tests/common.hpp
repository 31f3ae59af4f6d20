#pragma once

#include <doctest.h>

#include "openrds/open_system.hpp"
#include "openrds/transfer.hpp"

namespace rdstest {

using namespace openrds;

inline PiecewiseLinearMap doubling() { return PiecewiseLinearMap::linear_full(2); }
inline PiecewiseLinearMap beta3() { return PiecewiseLinearMap::beta(rational(3)); }
inline PiecewiseLinearMap three2() { return PiecewiseLinearMap::three_branch(rational(2)); }

inline rational rat(long num, long den = 1) { return make_rational(num, den); }

inline IntervalSet iv(long a_num, long a_den, long b_num, long b_den) {
  return IntervalSet(Interval(rat(a_num, a_den), rat(b_num, b_den)));
}

inline FiberOrbit const_orbit(long backward = 64, long forward = 256) {
  return DrivingSystem::constant(0).orbit(backward, forward);
}

}  // namespace rdstest
