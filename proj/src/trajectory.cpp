#include "openrds/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace openrds {

namespace {

// floor(r * 2^64) for r in [0,1]; exact for denominators dividing 2^64.
std::uint64_t fixed_point_of(const rational& r) {
  if (r <= 0) return 0;
  if (r >= 1) return 0;  // wraps: 1 == 0 mod 1
  rational scaled = r * rational(bigint(1) << 64);
  bigint fl = boost::multiprecision::numerator(scaled) /
              boost::multiprecision::denominator(scaled);
  return fl.convert_to<std::uint64_t>();
}

std::uint64_t fixed_point_mod1(const rational& r) {
  rational x = r;
  bigint whole = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
  x -= rational(whole);
  if (x < 0) x += 1;
  return fixed_point_of(x);
}

}  // namespace

TrajectorySimulator::TrajectorySimulator(const std::vector<PiecewiseLinearMap>& maps) {
  for (const auto& m : maps) {
    std::vector<BranchFx> fx;
    for (const auto& br : m.branches()) {
      BranchFx b{};
      b.domain_lo = fixed_point_of(br.domain.lo);
      if (boost::multiprecision::denominator(br.slope) != 1) exact_ = false;
      auto slope_int = static_cast<std::int64_t>(
          boost::multiprecision::numerator(br.slope).convert_to<long long>());
      b.slope = static_cast<std::uint64_t>(slope_int);
      b.intercept = fixed_point_mod1(br.intercept);
      std::uint64_t mag = static_cast<std::uint64_t>(std::llabs(slope_int));
      b.refill_bits = 0;
      while (mag > 1 && (mag & 1) == 0) {
        ++b.refill_bits;
        mag >>= 1;
      }
      fx.push_back(b);
    }
    maps_.push_back(std::move(fx));
  }
}

std::uint64_t TrajectorySimulator::step(std::uint64_t u, int symbol, Rng& rng) const {
  const auto& fx = maps_[static_cast<std::size_t>(symbol)];
  std::size_t lo = 0, hi = fx.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (u >= fx[mid].domain_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const BranchFx& b = fx[lo];
  std::uint64_t out = b.slope * u + b.intercept;  // ring arithmetic mod 2^64
  if (b.refill_bits > 0) out |= rng.next_bits(b.refill_bits);
  return out;
}

std::vector<U64Range> to_u64_ranges(const IntervalSet& s) {
  std::vector<U64Range> out;
  for (const auto& iv : s.parts()) {
    U64Range r{};
    r.lo = fixed_point_of(iv.lo);
    r.hi = iv.hi >= 1 ? 0 : fixed_point_of(iv.hi);
    out.push_back(r);
  }
  return out;
}

bool in_ranges(std::uint64_t u, const std::vector<U64Range>& ranges) {
  for (const auto& r : ranges) {
    if (r.hi == 0 && r.lo > 0) {
      if (u >= r.lo) return true;
    } else if (u >= r.lo && u < r.hi) {
      return true;
    }
  }
  return false;
}

DensitySampler::DensitySampler(const std::vector<double>& cell_values) {
  if (cell_values.empty()) throw std::invalid_argument("DensitySampler: empty density");
  cdf_.resize(cell_values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cell_values.size(); ++i) {
    if (cell_values[i] < 0) throw std::invalid_argument("DensitySampler: negative density");
    acc += cell_values[i];
    cdf_[i] = acc;
  }
  if (!(acc > 0)) throw std::invalid_argument("DensitySampler: zero density");
  for (auto& c : cdf_) c /= acc;
}

std::uint64_t DensitySampler::sample(Rng& rng) const {
  const double u = rng.next_double();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t cell = std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  const double n = static_cast<double>(cdf_.size());
  // uniform within the chosen cell; fresh bits keep the low digits random
  double frac = rng.next_double();
  double x = (static_cast<double>(cell) + frac) / n;
  if (x >= 1.0) x = std::nextafter(1.0, 0.0);
  auto fixed = static_cast<std::uint64_t>(std::ldexp(x, 64));
  return fixed ^ rng.next_bits(11);  // repopulate bits below double resolution
}

}  // namespace openrds
