#pragma once

#include <vector>

#include "openrds/interval.hpp"
#include "openrds/maps.hpp"
#include "openrds/step_function.hpp"

namespace openrds {

// Uniform grid of N half-open cells [i/N, (i+1)/N).
class Grid {
 public:
  explicit Grid(int cells);

  int cells() const { return n_; }
  rational width() const { return make_rational(1, n_); }
  Interval cell(int i) const;

  bool aligned(const rational& point) const;                  // point on grid?
  bool aligned(const PiecewiseLinearMap& map) const;          // all breakpoints
  bool aligned(const IntervalSet& s) const;                   // all endpoints
  // exact transfer action on cellwise-constant functions requires aligned
  // breakpoints and integer slopes
  bool exact_for(const PiecewiseLinearMap& map) const;

  int cell_of(const rational& x) const;

 private:
  int n_;
};

// Picks the smallest multiple of the needed denominator lcm that is >= hint;
// returns {N, aligned}. Falls back to the hint when alignment would require
// more than max_cells.
std::pair<int, bool> choose_grid_cells(const std::vector<PiecewiseLinearMap>& maps,
                                       const std::vector<IntervalSet>& holes, int hint,
                                       int max_cells = (1 << 22));

// Cellwise-constant density (values are density heights w.r.t. Lebesgue).
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(const Grid& grid, double constant);
  GridDensity(const Grid& grid, std::vector<double> values);
  static GridDensity from_step_function(const Grid& grid, const StepFunction& f);
  static GridDensity indicator(const Grid& grid, const IntervalSet& s);

  int cells() const { return static_cast<int>(v_.size()); }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

  double lebesgue_mass() const;
  double integral_against(const GridDensity& other) const;  // \int f g dLeb
  double integral_over(const IntervalSet& s) const;
  double sup_distance(const GridDensity& other) const;
  double min_value() const;
  double max_value() const;
  void scale(double c);

  StepFunction to_step_function() const;

 private:
  std::vector<double> v_;
};

}  // namespace openrds
