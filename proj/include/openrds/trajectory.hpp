#pragma once

#include <cstdint>
#include <vector>

#include "openrds/maps.hpp"
#include "openrds/rng.hpp"

namespace openrds {

// Orbit simulation in 64-bit fixed point (x = u / 2^64). For integer-slope
// maps the affine step is ring arithmetic mod 2^64; slopes with even factors
// shift information out at the bottom, and those bits are refilled from the
// trajectory's own stream. Starting from Lebesgue this resamples unobserved
// digits of the initial point, so hole-hitting statistics are exact in law
// whenever the maps preserve Lebesgue. Double-precision iteration is wrong
// here: dyadic maps collapse double orbits onto exactly representable points
// within ~50 steps.
class TrajectorySimulator {
 public:
  explicit TrajectorySimulator(const std::vector<PiecewiseLinearMap>& maps);

  // true when every slope is a (signed) integer
  bool exact_in_law() const { return exact_; }

  std::uint64_t step(std::uint64_t u, int symbol, Rng& rng) const;

 private:
  struct BranchFx {
    std::uint64_t domain_lo;
    std::uint64_t slope;      // two's complement of the integer slope
    std::uint64_t intercept;  // fractional part of the intercept, mod 1
    unsigned refill_bits;     // trailing zero bits of |slope|
  };
  std::vector<std::vector<BranchFx>> maps_;
  bool exact_ = true;
};

struct U64Range {
  std::uint64_t lo;
  std::uint64_t hi;  // half-open; hi==0 with lo>0 means "up to 1"
};

std::vector<U64Range> to_u64_ranges(const IntervalSet& s);
bool in_ranges(std::uint64_t u, const std::vector<U64Range>& ranges);

// Inverse-CDF sampler for a cellwise-constant density.
class DensitySampler {
 public:
  explicit DensitySampler(const std::vector<double>& cell_values);
  std::uint64_t sample(Rng& rng) const;  // fixed-point point in [0,1)

 private:
  std::vector<double> cdf_;  // per-cell cumulative mass
};

}  // namespace openrds
