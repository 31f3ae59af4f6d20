#include "openrds/step_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace openrds {

StepFunction::StepFunction() : StepFunction(rational(0)) {}

StepFunction::StepFunction(rational constant)
    : breaks_{rational(0), rational(1)}, values_{std::move(constant)} {}

StepFunction::StepFunction(std::vector<rational> breaks, std::vector<rational> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() != values_.size() + 1 || breaks_.front() != 0 || breaks_.back() != 1)
    throw std::invalid_argument("StepFunction: malformed breakpoint list");
  normalize();
}

void StepFunction::normalize() {
  std::vector<rational> nb{breaks_.front()};
  std::vector<rational> nv;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (breaks_[i + 1] <= nb.back()) continue;  // empty piece
    if (!nv.empty() && nv.back() == values_[i]) {
      nb.back() = breaks_[i + 1];
    } else {
      nv.push_back(values_[i]);
      nb.push_back(breaks_[i + 1]);
    }
  }
  breaks_ = std::move(nb);
  values_ = std::move(nv);
}

StepFunction StepFunction::indicator(const IntervalSet& s, rational value) {
  std::vector<rational> breaks{rational(0)};
  std::vector<rational> values;
  for (const auto& iv : s.parts()) {
    if (iv.lo > breaks.back()) {
      values.push_back(rational(0));
      breaks.push_back(iv.lo);
    }
    values.push_back(value);
    breaks.push_back(iv.hi);
  }
  if (breaks.back() < 1) {
    values.push_back(rational(0));
    breaks.push_back(rational(1));
  }
  if (values.empty()) return StepFunction(rational(0));
  return StepFunction(std::move(breaks), std::move(values));
}

rational StepFunction::operator()(const rational& x) const {
  if (x < 0 || x >= 1) throw std::domain_error("StepFunction: x outside [0,1)");
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  auto idx = static_cast<std::size_t>(it - breaks_.begin());
  return values_[idx - 1];
}

rational StepFunction::integral() const {
  rational s(0);
  for (std::size_t i = 0; i < values_.size(); ++i)
    s += values_[i] * (breaks_[i + 1] - breaks_[i]);
  return s;
}

rational StepFunction::integral_over(const IntervalSet& s) const {
  rational acc(0);
  for (const auto& iv : s.parts()) {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), iv.lo);
    auto idx = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    rational cursor = iv.lo;
    while (cursor < iv.hi && idx < values_.size()) {
      rational stop = std::min(iv.hi, breaks_[idx + 1]);
      acc += values_[idx] * (stop - cursor);
      cursor = stop;
      ++idx;
    }
  }
  return acc;
}

rational StepFunction::min_value() const {
  rational m = values_.front();
  for (const auto& v : values_) m = std::min(m, v);
  return m;
}

rational StepFunction::max_value() const {
  rational m = values_.front();
  for (const auto& v : values_) m = std::max(m, v);
  return m;
}

StepFunction StepFunction::masked(const IntervalSet& keep) const {
  return (*this) * indicator(keep);
}

template <typename Op>
StepFunction StepFunction::zip(const StepFunction& o, Op op) const {
  std::vector<rational> breaks{rational(0)};
  std::vector<rational> values;
  std::size_t i = 0, j = 0;
  while (i < values_.size() && j < o.values_.size()) {
    values.push_back(op(values_[i], o.values_[j]));
    const rational& a = breaks_[i + 1];
    const rational& b = o.breaks_[j + 1];
    if (a <= b) ++i;
    if (b <= a) ++j;
    breaks.push_back(std::min(a, b));
  }
  return StepFunction(std::move(breaks), std::move(values));
}

StepFunction StepFunction::operator+(const StepFunction& o) const {
  return zip(o, [](const rational& a, const rational& b) { return a + b; });
}

StepFunction StepFunction::operator-(const StepFunction& o) const {
  return zip(o, [](const rational& a, const rational& b) { return a - b; });
}

StepFunction StepFunction::operator*(const StepFunction& o) const {
  return zip(o, [](const rational& a, const rational& b) { return a * b; });
}

StepFunction StepFunction::scaled(const rational& c) const {
  std::vector<rational> v = values_;
  for (auto& x : v) x *= c;
  return StepFunction(breaks_, std::move(v));
}

rational StepFunction::sup_distance(const StepFunction& o) const {
  StepFunction d = zip(o, [](const rational& a, const rational& b) {
    return a >= b ? a - b : b - a;
  });
  return d.max_value();
}

}  // namespace openrds
