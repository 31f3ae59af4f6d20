#include "openrds/driving.hpp"

#include <numeric>
#include <stdexcept>

#include "openrds/rng.hpp"

namespace openrds {

FiberOrbit::FiberOrbit(std::vector<int> symbols, std::size_t origin)
    : symbols_(std::move(symbols)), origin_(origin) {
  if (origin_ >= symbols_.size()) throw std::invalid_argument("FiberOrbit: origin out of range");
}

int FiberOrbit::symbol(long n) const {
  long idx = static_cast<long>(origin_) + n;
  if (idx < 0 || idx >= static_cast<long>(symbols_.size()))
    throw std::out_of_range("FiberOrbit: index outside materialized window");
  return symbols_[static_cast<std::size_t>(idx)];
}

FiberOrbit FiberOrbit::shifted(long k) const {
  long idx = static_cast<long>(origin_) + k;
  if (idx < 0 || idx >= static_cast<long>(symbols_.size()))
    throw std::out_of_range("FiberOrbit: shift outside materialized window");
  return FiberOrbit(symbols_, static_cast<std::size_t>(idx));
}

DrivingSystem DrivingSystem::iid(std::vector<double> probabilities, std::uint64_t seed) {
  if (probabilities.empty()) throw std::invalid_argument("iid: empty probability vector");
  double sum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("iid: probabilities must sum to 1");
  for (double p : probabilities)
    if (p <= 0) throw std::invalid_argument("iid: probabilities must be positive");
  DrivingSystem d;
  d.kind_ = DrivingKind::IID;
  d.symbol_count_ = static_cast<int>(probabilities.size());
  d.probabilities_ = std::move(probabilities);
  d.seed_ = seed;
  return d;
}

DrivingSystem DrivingSystem::rotation_coded(const rational& alpha,
                                            std::vector<rational> arc_bounds,
                                            const rational& initial_angle) {
  if (arc_bounds.size() < 2 || arc_bounds.front() != 0 || arc_bounds.back() != 1)
    throw std::invalid_argument("rotation_coded: arc bounds must run 0..1");
  for (std::size_t i = 1; i < arc_bounds.size(); ++i)
    if (arc_bounds[i] <= arc_bounds[i - 1])
      throw std::invalid_argument("rotation_coded: arcs must be increasing");
  DrivingSystem d;
  d.kind_ = DrivingKind::RotationCoded;
  d.symbol_count_ = static_cast<int>(arc_bounds.size()) - 1;
  d.alpha_ = alpha;
  d.arc_bounds_ = std::move(arc_bounds);
  d.initial_angle_ = initial_angle;
  return d;
}

DrivingSystem DrivingSystem::periodic(std::vector<int> word) {
  if (word.empty()) throw std::invalid_argument("periodic: empty word");
  DrivingSystem d;
  d.kind_ = DrivingKind::Periodic;
  d.symbol_count_ = 1 + *std::max_element(word.begin(), word.end());
  d.word_ = std::move(word);
  return d;
}

DrivingSystem DrivingSystem::constant(int symbol) {
  DrivingSystem d;
  d.kind_ = DrivingKind::Constant;
  d.symbol_count_ = symbol + 1;
  d.word_ = {symbol};
  return d;
}

namespace {
int sample_symbol(const std::vector<double>& p, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}
}  // namespace

int DrivingSystem::raw_symbol(long n) const {
  switch (kind_) {
    case DrivingKind::Constant:
      return word_[0];
    case DrivingKind::Periodic: {
      long L = static_cast<long>(word_.size());
      long m = ((n % L) + L) % L;
      return word_[static_cast<std::size_t>(m)];
    }
    case DrivingKind::RotationCoded: {
      rational angle = initial_angle_ + rational(n) * alpha_;
      bigint whole = boost::multiprecision::numerator(angle) /
                     boost::multiprecision::denominator(angle);
      angle -= rational(whole);
      if (angle < 0) angle += 1;
      for (std::size_t i = 1; i < arc_bounds_.size(); ++i)
        if (angle < arc_bounds_[i]) return static_cast<int>(i) - 1;
      return symbol_count_ - 1;
    }
    case DrivingKind::IID: {
      // Forward and backward halves come from two independent substreams of
      // the master seed; any fixed two-sided realization is a valid base point.
      if (n >= 0) {
        Rng rng(substream_seed(seed_, 0x464F5257ULL));
        int sym = 0;
        for (long i = 0; i <= n; ++i) sym = sample_symbol(probabilities_, rng.next_double());
        return sym;
      }
      Rng rng(substream_seed(seed_, 0x4241434BULL));
      int sym = 0;
      for (long i = 0; i < -n; ++i) sym = sample_symbol(probabilities_, rng.next_double());
      return sym;
    }
  }
  return 0;
}

FiberOrbit DrivingSystem::orbit(long backward, long forward) const {
  if (backward < 0 || forward < 0) throw std::invalid_argument("orbit: counts must be >= 0");
  const long lo = origin_offset_ - backward;
  const long hi = origin_offset_ + forward;
  std::vector<int> symbols(static_cast<std::size_t>(hi - lo + 1));
  if (kind_ == DrivingKind::IID) {
    // stream the two halves instead of re-deriving each index
    if (hi >= 0) {
      Rng rng(substream_seed(seed_, 0x464F5257ULL));
      for (long n = 0; n <= hi; ++n) {
        int sym = sample_symbol(probabilities_, rng.next_double());
        if (n >= lo) symbols[static_cast<std::size_t>(n - lo)] = sym;
      }
    }
    if (lo < 0) {
      Rng rng(substream_seed(seed_, 0x4241434BULL));
      for (long n = -1; n >= lo; --n) {
        int sym = sample_symbol(probabilities_, rng.next_double());
        if (n <= hi) symbols[static_cast<std::size_t>(n - lo)] = sym;
      }
    }
  } else {
    for (long n = lo; n <= hi; ++n)
      symbols[static_cast<std::size_t>(n - lo)] = raw_symbol(n);
  }
  return FiberOrbit(std::move(symbols), static_cast<std::size_t>(-lo + origin_offset_));
}

DrivingSystem DrivingSystem::shift() const {
  DrivingSystem d = *this;
  d.origin_offset_ += 1;
  return d;
}

std::vector<double> DrivingSystem::marginals() const {
  std::vector<double> m(static_cast<std::size_t>(symbol_count_), 0.0);
  switch (kind_) {
    case DrivingKind::IID:
      return probabilities_;
    case DrivingKind::RotationCoded:
      for (std::size_t i = 0; i + 1 < arc_bounds_.size(); ++i)
        m[i] = to_double(arc_bounds_[i + 1] - arc_bounds_[i]);
      return m;
    case DrivingKind::Periodic:
      for (int s : word_) m[static_cast<std::size_t>(s)] += 1.0 / static_cast<double>(word_.size());
      return m;
    case DrivingKind::Constant:
      m[static_cast<std::size_t>(word_[0])] = 1.0;
      return m;
  }
  return m;
}

std::string DrivingSystem::describe() const {
  switch (kind_) {
    case DrivingKind::IID:
      return "iid(k=" + std::to_string(symbol_count_) + ",seed=" + std::to_string(seed_) + ")";
    case DrivingKind::RotationCoded:
      return "rotation(k=" + std::to_string(symbol_count_) + ")";
    case DrivingKind::Periodic:
      return "periodic(len=" + std::to_string(word_.size()) + ")";
    case DrivingKind::Constant:
      return "constant(" + std::to_string(word_[0]) + ")";
  }
  return "";
}

}  // namespace openrds
