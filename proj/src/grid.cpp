#include "openrds/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace openrds {

Grid::Grid(int cells) : n_(cells) {
  if (cells < 2) throw std::invalid_argument("Grid: need at least 2 cells");
}

Interval Grid::cell(int i) const {
  return Interval(make_rational(i, n_), make_rational(i + 1, n_));
}

bool Grid::aligned(const rational& point) const {
  rational scaled = point * n_;
  return boost::multiprecision::denominator(scaled) == 1;
}

bool Grid::aligned(const PiecewiseLinearMap& map) const {
  for (const auto& br : map.branches())
    if (!aligned(br.domain.lo) || !aligned(br.domain.hi)) return false;
  return true;
}

bool Grid::aligned(const IntervalSet& s) const {
  for (const auto& iv : s.parts())
    if (!aligned(iv.lo) || !aligned(iv.hi)) return false;
  return true;
}

bool Grid::exact_for(const PiecewiseLinearMap& map) const {
  return aligned(map) && map.integer_slopes();
}

int Grid::cell_of(const rational& x) const {
  rational scaled = x * n_;
  bigint idx = boost::multiprecision::numerator(scaled) /
               boost::multiprecision::denominator(scaled);
  auto i = static_cast<int>(idx);
  return std::min(std::max(i, 0), n_ - 1);
}

std::pair<int, bool> choose_grid_cells(const std::vector<PiecewiseLinearMap>& maps,
                                       const std::vector<IntervalSet>& holes, int hint,
                                       int max_cells) {
  bigint l = 1;
  for (const auto& m : maps)
    l = boost::multiprecision::lcm(l, m.breakpoint_denominator_lcm());
  for (const auto& h : holes)
    for (const auto& iv : h.parts()) {
      l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(iv.lo));
      l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(iv.hi));
    }
  if (l > max_cells) return {hint, false};
  auto base = static_cast<long>(l);
  long n = base;
  while (n < hint) n += base;
  if (n > max_cells) return {hint, false};
  return {static_cast<int>(std::max<long>(n, 2)), true};
}

GridDensity::GridDensity(const Grid& grid, double constant)
    : v_(static_cast<std::size_t>(grid.cells()), constant) {}

GridDensity::GridDensity(const Grid& grid, std::vector<double> values) : v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid.cells())
    throw std::invalid_argument("GridDensity: size mismatch");
}

GridDensity GridDensity::from_step_function(const Grid& grid, const StepFunction& f) {
  std::vector<double> v(static_cast<std::size_t>(grid.cells()));
  const rational w = grid.width();
  for (int i = 0; i < grid.cells(); ++i) {
    rational mass = f.integral_over(IntervalSet(grid.cell(i)));
    v[static_cast<std::size_t>(i)] = to_double(mass / w);
  }
  return GridDensity(grid, std::move(v));
}

GridDensity GridDensity::indicator(const Grid& grid, const IntervalSet& s) {
  return from_step_function(grid, StepFunction::indicator(s));
}

double GridDensity::lebesgue_mass() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s / static_cast<double>(v_.size());
}

double GridDensity::integral_against(const GridDensity& other) const {
  if (other.v_.size() != v_.size()) throw std::invalid_argument("GridDensity: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * other.v_[i];
  return s / static_cast<double>(v_.size());
}

double GridDensity::integral_over(const IntervalSet& s) const {
  const int n = cells();
  double acc = 0.0;
  for (const auto& iv : s.parts()) {
    double lo = to_double(iv.lo), hi = to_double(iv.hi);
    int i0 = std::min(std::max(static_cast<int>(std::floor(lo * n)), 0), n - 1);
    int i1 = std::min(std::max(static_cast<int>(std::ceil(hi * n)), 1), n);
    for (int i = i0; i < i1; ++i) {
      double clo = std::max(lo, static_cast<double>(i) / n);
      double chi = std::min(hi, static_cast<double>(i + 1) / n);
      if (chi > clo) acc += v_[static_cast<std::size_t>(i)] * (chi - clo);
    }
  }
  return acc;
}

double GridDensity::sup_distance(const GridDensity& other) const {
  double m = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::abs(v_[i] - other.v_[i]));
  return m;
}

double GridDensity::min_value() const {
  double m = v_.front();
  for (double x : v_) m = std::min(m, x);
  return m;
}

double GridDensity::max_value() const {
  double m = v_.front();
  for (double x : v_) m = std::max(m, x);
  return m;
}

void GridDensity::scale(double c) {
  for (double& x : v_) x *= c;
}

StepFunction GridDensity::to_step_function() const {
  const int n = cells();
  std::vector<rational> breaks;
  std::vector<rational> vals;
  breaks.reserve(static_cast<std::size_t>(n) + 1);
  vals.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i <= n; ++i) breaks.push_back(make_rational(i, n));
  for (int i = 0; i < n; ++i) vals.push_back(rational_from_double(v_[static_cast<std::size_t>(i)]));
  return StepFunction(std::move(breaks), std::move(vals));
}

}  // namespace openrds
