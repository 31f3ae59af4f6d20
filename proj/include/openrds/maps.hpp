#pragma once

#include <string>
#include <utility>
#include <vector>

#include "openrds/interval.hpp"
#include "openrds/step_function.hpp"

namespace openrds {

// One affine monotone branch x -> slope*x + intercept on a half-open domain.
struct Branch {
  Interval domain;
  rational slope;      // nonzero; negative for decreasing branches
  rational intercept;

  Interval image() const;
  rational abs_slope() const { return slope < 0 ? -slope : slope; }
  rational apply(const rational& x) const { return slope * x + intercept; }
  rational invert(const rational& y) const { return (y - intercept) / slope; }
  bool is_full() const { return image().length() == 1; }
};

enum class MapPreset { LinearFull, Beta, ThreeBranch, BetaShift, Custom };

// Piecewise linear surjective map of [0,1); branch domains partition [0,1).
class PiecewiseLinearMap {
 public:
  static PiecewiseLinearMap linear_full(int k);
  static PiecewiseLinearMap beta(const rational& beta_value);
  static PiecewiseLinearMap three_branch(const rational& s);
  static PiecewiseLinearMap beta_shift(const rational& beta_value, const rational& shift);
  static PiecewiseLinearMap custom(std::vector<Branch> branches);

  const std::vector<Branch>& branches() const { return branches_; }
  MapPreset preset() const { return preset_; }
  const std::string& label() const { return label_; }

  // Value of the unique branch whose half-open domain contains x.
  double evaluate(double x) const;
  rational evaluate_exact(const rational& x) const;
  double derivative_magnitude(double x) const;
  const Branch& branch_at(const rational& x) const;
  std::size_t branch_index(double x) const;

  // One preimage per branch whose image contains y; pairs (point, branch id).
  std::vector<std::pair<rational, std::size_t>> preimage_points(const rational& y) const;

  IntervalSet pullback(const IntervalSet& s) const;
  IntervalSet forward_image(const IntervalSet& s) const;

  // Exact transfer operator with per-branch constant weight on step functions:
  // (Lf)(x) = sum over preimages y of f(y) * weight(branch of y).
  StepFunction transfer_push(const StepFunction& f,
                             const std::vector<rational>& branch_weights) const;

  std::vector<rational> geometric_weights(const rational& exponent) const;

  bool all_branches_full() const;
  bool integer_slopes() const;
  rational min_abs_slope() const;
  // lcm of denominators of all branch domain endpoints.
  bigint breakpoint_denominator_lcm() const;

 private:
  PiecewiseLinearMap(std::vector<Branch> b, MapPreset p, std::string label);
  void validate() const;
  std::vector<Branch> branches_;
  std::vector<double> domain_lo_d_;  // cached for fast double lookup
  MapPreset preset_;
  std::string label_;
};

}  // namespace openrds
