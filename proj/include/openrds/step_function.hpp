#pragma once

#include <vector>

#include "openrds/interval.hpp"
#include "openrds/rational.hpp"

namespace openrds {

// Exact piecewise-constant function on [0,1): rational breakpoints, rational
// values. This is the function class the transfer operator of a piecewise
// linear map preserves, with only additive breakpoint growth per application,
// which is what makes long exact sweeps affordable.
class StepFunction {
 public:
  StepFunction();  // zero function
  explicit StepFunction(rational constant);
  static StepFunction indicator(const IntervalSet& s, rational value = rational(1));

  // breakpoints().size() == values().size() + 1; breakpoints start at 0, end at 1.
  const std::vector<rational>& breakpoints() const { return breaks_; }
  const std::vector<rational>& values() const { return values_; }

  rational operator()(const rational& x) const;
  rational integral() const;                        // against Lebesgue
  rational integral_over(const IntervalSet& s) const;
  rational min_value() const;
  rational max_value() const;

  StepFunction masked(const IntervalSet& keep) const;   // f * 1_keep
  StepFunction operator+(const StepFunction& o) const;
  StepFunction operator-(const StepFunction& o) const;
  StepFunction operator*(const StepFunction& o) const;  // pointwise
  StepFunction scaled(const rational& c) const;

  // Largest |f - o| over [0,1).
  rational sup_distance(const StepFunction& o) const;

  std::size_t piece_count() const { return values_.size(); }

  // Builds directly from a breakpoint/value list (normalizing).
  StepFunction(std::vector<rational> breaks, std::vector<rational> values);

 private:
  void normalize();
  template <typename Op>
  StepFunction zip(const StepFunction& o, Op op) const;
  std::vector<rational> breaks_;
  std::vector<rational> values_;
};

}  // namespace openrds
