#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "openrds/rational.hpp"

namespace openrds {

enum class DrivingKind { IID, RotationCoded, Periodic, Constant };

// A materialized two-sided window of the symbol realization, indexed by
// n in [-backward, forward] relative to its origin.
class FiberOrbit {
 public:
  FiberOrbit(std::vector<int> symbols, std::size_t origin);

  int symbol(long n) const;
  long backward() const { return static_cast<long>(origin_); }
  long forward() const { return static_cast<long>(symbols_.size() - 1 - origin_); }

  // Orbit of the k-step shifted base point, sharing the same realization.
  FiberOrbit shifted(long k) const;

 private:
  std::vector<int> symbols_;
  std::size_t origin_;
};

class DrivingSystem {
 public:
  static DrivingSystem iid(std::vector<double> probabilities, std::uint64_t seed);
  static DrivingSystem rotation_coded(const rational& alpha, std::vector<rational> arc_bounds,
                                      const rational& initial_angle);
  static DrivingSystem periodic(std::vector<int> word);
  static DrivingSystem constant(int symbol);

  DrivingKind kind() const { return kind_; }
  int symbol_count() const { return symbol_count_; }
  std::uint64_t seed() const { return seed_; }

  // Deterministic realization for the same seed/initial angle; indices may
  // be negative (the base map is invertible).
  FiberOrbit orbit(long backward, long forward) const;

  // The base map applied to the system itself: realization shifted by one.
  DrivingSystem shift() const;

  // Exact symbol marginals under the invariant base measure.
  std::vector<double> marginals() const;

  std::string describe() const;

 private:
  DrivingSystem() = default;
  int raw_symbol(long n) const;  // n is an absolute index into the realization

  DrivingKind kind_ = DrivingKind::Constant;
  int symbol_count_ = 1;
  long origin_offset_ = 0;

  // IID
  std::vector<double> probabilities_;
  std::uint64_t seed_ = 0;

  // RotationCoded
  rational alpha_{0};
  std::vector<rational> arc_bounds_;  // 0 = a0 < a1 < ... < ak = 1
  rational initial_angle_{0};

  // Periodic / Constant
  std::vector<int> word_;
};

}  // namespace openrds
