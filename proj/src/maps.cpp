#include "openrds/maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace openrds {

Interval Branch::image() const {
  rational a = apply(domain.lo);
  rational b = apply(domain.hi);
  if (slope < 0) std::swap(a, b);
  return Interval(a, b);
}

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<Branch> b, MapPreset p, std::string label)
    : branches_(std::move(b)), preset_(p), label_(std::move(label)) {
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& x, const Branch& y) { return x.domain.lo < y.domain.lo; });
  validate();
  domain_lo_d_.reserve(branches_.size());
  for (const auto& br : branches_) domain_lo_d_.push_back(to_double(br.domain.lo));
}

void PiecewiseLinearMap::validate() const {
  if (branches_.empty()) throw std::invalid_argument("map: no branches");
  rational cursor(0);
  IntervalSet image_union;
  for (const auto& br : branches_) {
    if (br.slope == 0) throw std::invalid_argument("map: zero slope branch");
    if (br.domain.lo != cursor)
      throw std::invalid_argument("map: branch domains must partition [0,1)");
    cursor = br.domain.hi;
    Interval img = br.image();
    if (img.lo < 0 || img.hi > 1) throw std::invalid_argument("map: branch image leaves [0,1]");
    image_union = image_union.set_union(IntervalSet(img));
  }
  if (cursor != 1) throw std::invalid_argument("map: branch domains must cover [0,1)");
  if (image_union.total_length() != 1)
    throw std::invalid_argument("map: not surjective onto [0,1)");
}

PiecewiseLinearMap PiecewiseLinearMap::linear_full(int k) {
  if (k < 2) throw std::invalid_argument("linear_full: need k >= 2");
  std::vector<Branch> b;
  for (int i = 0; i < k; ++i)
    b.push_back({Interval(make_rational(i, k), make_rational(i + 1, k)), rational(k),
                 rational(-i)});
  return PiecewiseLinearMap(std::move(b), MapPreset::LinearFull,
                            "linear_full(" + std::to_string(k) + ")");
}

PiecewiseLinearMap PiecewiseLinearMap::beta(const rational& beta_value) {
  if (beta_value <= 1) throw std::invalid_argument("beta: need beta > 1");
  bigint floor_b = boost::multiprecision::numerator(beta_value) /
                   boost::multiprecision::denominator(beta_value);
  if (rational(floor_b) == beta_value) {
    auto m = linear_full(static_cast<int>(floor_b));
    return PiecewiseLinearMap(m.branches_, MapPreset::Beta, "beta(" + to_string(beta_value) + ")");
  }
  std::vector<Branch> b;
  for (bigint i = 0; i < floor_b; ++i)
    b.push_back({Interval(rational(i) / beta_value, rational(i + 1) / beta_value), beta_value,
                 rational(-i)});
  // short last branch onto [0, beta - floor(beta))
  b.push_back({Interval(rational(floor_b) / beta_value, rational(1)), beta_value,
               rational(-floor_b)});
  return PiecewiseLinearMap(std::move(b), MapPreset::Beta, "beta(" + to_string(beta_value) + ")");
}

PiecewiseLinearMap PiecewiseLinearMap::three_branch(const rational& s) {
  if (s <= 1) throw std::invalid_argument("three_branch: need s > 1");
  const rational half(1, 2);
  const rational d1 = (1 - 1 / s) * half;  // (1 - 1/s)/2
  const rational d2 = (1 + 1 / s) * half;
  const rational outer = rational(-2) / (1 - 1 / s);
  std::vector<Branch> b;
  b.push_back({Interval(rational(0), d1), outer, rational(1)});
  b.push_back({Interval(d1, d2), s, -(s - 1) * half});
  b.push_back({Interval(d2, rational(1)), outer, 1 - outer * d2});
  return PiecewiseLinearMap(std::move(b), MapPreset::ThreeBranch,
                            "three_branch(" + to_string(s) + ")");
}

PiecewiseLinearMap PiecewiseLinearMap::beta_shift(const rational& beta_value,
                                                  const rational& shift) {
  if (beta_value < 2) throw std::invalid_argument("beta_shift: need beta >= 2");
  if (shift < 0 || shift >= 1) throw std::invalid_argument("beta_shift: shift in [0,1)");
  if (shift == 0) {
    auto m = beta(beta_value);
    return PiecewiseLinearMap(m.branches_, MapPreset::BetaShift,
                              "beta_shift(" + to_string(beta_value) + ",0)");
  }
  // beta*x + shift runs over [shift, beta + shift); split at integer crossings.
  std::vector<Branch> b;
  const rational reach = beta_value + shift;
  bigint kmax = boost::multiprecision::numerator(reach) /
                boost::multiprecision::denominator(reach);
  rational lo(0);
  for (bigint k = 1; k <= kmax; ++k) {
    rational hi = (rational(k) - shift) / beta_value;
    if (hi > 1) hi = 1;
    if (hi > lo) b.push_back({Interval(lo, hi), beta_value, shift - rational(k - 1)});
    lo = hi;
    if (lo >= 1) break;
  }
  if (lo < 1) b.push_back({Interval(lo, rational(1)), beta_value, shift - rational(kmax)});
  return PiecewiseLinearMap(std::move(b), MapPreset::BetaShift,
                            "beta_shift(" + to_string(beta_value) + "," + to_string(shift) + ")");
}

PiecewiseLinearMap PiecewiseLinearMap::custom(std::vector<Branch> branches) {
  return PiecewiseLinearMap(std::move(branches), MapPreset::Custom, "custom");
}

std::size_t PiecewiseLinearMap::branch_index(double x) const {
  auto it = std::upper_bound(domain_lo_d_.begin(), domain_lo_d_.end(), x);
  if (it == domain_lo_d_.begin()) return 0;
  return static_cast<std::size_t>(it - domain_lo_d_.begin()) - 1;
}

double PiecewiseLinearMap::evaluate(double x) const {
  const Branch& br = branches_[branch_index(x)];
  return to_double(br.slope) * x + to_double(br.intercept);
}

rational PiecewiseLinearMap::evaluate_exact(const rational& x) const {
  return branch_at(x).apply(x);
}

const Branch& PiecewiseLinearMap::branch_at(const rational& x) const {
  if (x < 0 || x >= 1) throw std::domain_error("map: point outside [0,1)");
  for (auto it = branches_.rbegin(); it != branches_.rend(); ++it)
    if (x >= it->domain.lo) return *it;
  return branches_.front();
}

double PiecewiseLinearMap::derivative_magnitude(double x) const {
  return std::abs(to_double(branches_[branch_index(x)].slope));
}

std::vector<std::pair<rational, std::size_t>> PiecewiseLinearMap::preimage_points(
    const rational& y) const {
  if (y < 0 || y > 1) throw std::domain_error("preimage_points: y outside [0,1]");
  std::vector<std::pair<rational, std::size_t>> out;
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    const Branch& br = branches_[i];
    Interval img = br.image();
    const bool inside = (y >= img.lo && y < img.hi) || (y == img.hi && y == 1);
    if (!inside) continue;
    rational x = br.invert(y);
    if (x < br.domain.lo) x = br.domain.lo;
    if (x > br.domain.hi) x = br.domain.hi;
    out.emplace_back(std::move(x), i);
  }
  return out;
}

IntervalSet PiecewiseLinearMap::pullback(const IntervalSet& s) const {
  std::vector<Interval> parts;
  for (const auto& br : branches_) {
    IntervalSet hit = s.set_intersection(IntervalSet(br.image()));
    for (const auto& iv : hit.parts()) {
      rational a = br.invert(iv.lo);
      rational b = br.invert(iv.hi);
      if (br.slope < 0) std::swap(a, b);
      a = std::max(a, br.domain.lo);
      b = std::min(b, br.domain.hi);
      if (a < b) parts.emplace_back(a, b);
    }
  }
  return IntervalSet(std::move(parts));
}

IntervalSet PiecewiseLinearMap::forward_image(const IntervalSet& s) const {
  std::vector<Interval> parts;
  for (const auto& br : branches_) {
    IntervalSet hit = s.set_intersection(IntervalSet(br.domain));
    for (const auto& iv : hit.parts()) {
      rational a = br.apply(iv.lo);
      rational b = br.apply(iv.hi);
      if (br.slope < 0) std::swap(a, b);
      if (a < b) parts.emplace_back(a, b);
    }
  }
  return IntervalSet(std::move(parts));
}

StepFunction PiecewiseLinearMap::transfer_push(
    const StepFunction& f, const std::vector<rational>& branch_weights) const {
  if (branch_weights.size() != branches_.size())
    throw std::invalid_argument("transfer_push: one weight per branch required");
  struct Piece {
    rational lo, hi, v;
  };
  std::vector<Piece> pieces;
  const auto& bp = f.breakpoints();
  const auto& vals = f.values();
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    const Branch& br = branches_[bi];
    if (branch_weights[bi] == 0) continue;
    // locate pieces of f overlapping the branch domain
    auto start = std::upper_bound(bp.begin(), bp.end(), br.domain.lo);
    std::size_t idx = static_cast<std::size_t>(start - bp.begin()) - 1;
    for (; idx < vals.size() && bp[idx] < br.domain.hi; ++idx) {
      rational lo = std::max(bp[idx], br.domain.lo);
      rational hi = std::min(bp[idx + 1], br.domain.hi);
      if (lo >= hi) continue;
      if (vals[idx] == 0) continue;
      rational a = br.apply(lo);
      rational b = br.apply(hi);
      if (br.slope < 0) std::swap(a, b);
      pieces.push_back({std::move(a), std::move(b), vals[idx] * branch_weights[bi]});
    }
  }
  if (pieces.empty()) return StepFunction(rational(0));
  std::vector<rational> cuts{rational(0), rational(1)};
  cuts.reserve(2 * pieces.size() + 2);
  for (const auto& p : pieces) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<rational> acc(cuts.size() - 1, rational(0));
  for (const auto& p : pieces) {
    auto i0 = static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), p.lo) - cuts.begin());
    auto i1 = static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), p.hi) - cuts.begin());
    for (std::size_t i = i0; i < i1; ++i) acc[i] += p.v;
  }
  return StepFunction(std::move(cuts), std::move(acc));
}

std::vector<rational> PiecewiseLinearMap::geometric_weights(const rational& exponent) const {
  std::vector<rational> w;
  w.reserve(branches_.size());
  const bigint num = boost::multiprecision::numerator(exponent);
  const bigint den = boost::multiprecision::denominator(exponent);
  const bool integer_exp = (den == 1) && (num >= 0) && (num < 64);
  for (const auto& br : branches_) {
    rational s = br.abs_slope();
    if (integer_exp) {
      rational p(1);
      for (bigint i = 0; i < num; ++i) p *= s;
      w.push_back(1 / p);
    } else {
      // non-integer exponents: the weight itself is irrational; freeze the
      // double value so both engines use bit-identical weights
      w.push_back(rational_from_double(std::pow(to_double(s), -to_double(exponent))));
    }
  }
  return w;
}

bool PiecewiseLinearMap::all_branches_full() const {
  for (const auto& br : branches_)
    if (!br.is_full()) return false;
  return true;
}

bool PiecewiseLinearMap::integer_slopes() const {
  for (const auto& br : branches_)
    if (boost::multiprecision::denominator(br.slope) != 1) return false;
  return true;
}

rational PiecewiseLinearMap::min_abs_slope() const {
  rational m = branches_.front().abs_slope();
  for (const auto& br : branches_) m = std::min(m, br.abs_slope());
  return m;
}

bigint PiecewiseLinearMap::breakpoint_denominator_lcm() const {
  bigint l = 1;
  for (const auto& br : branches_) {
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(br.domain.lo));
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(br.domain.hi));
  }
  return l;
}

}  // namespace openrds
