#include "openrds/pressure.hpp"

#include <cmath>
#include <stdexcept>

namespace openrds {

std::optional<double> structural_log_multiplier(const PiecewiseLinearMap& map,
                                                const IntervalSet& hole, double t) {
  double acc = 0.0;
  for (const auto& br : map.branches()) {
    const IntervalSet dom(br.domain);
    const rational cut = intersect(dom, hole).total_length();
    if (cut == 0) {
      if (!br.is_full()) return std::nullopt;  // surviving branches must be full
      acc += std::pow(to_double(br.abs_slope()), -t);
    } else if (cut == dom.total_length()) {
      continue;  // branch removed wholesale
    } else {
      return std::nullopt;  // partially opened branch: no constant multiplier
    }
  }
  if (acc <= 0) return std::nullopt;
  return std::log(acc);
}

namespace {

// marginal-average pressure via exact per-symbol multipliers
std::optional<double> exact_pressure(const std::vector<PiecewiseLinearMap>& maps,
                                     const DrivingSystem& driving,
                                     const std::vector<IntervalSet>& holes, double t) {
  std::vector<double> log_lambda;
  for (std::size_t s = 0; s < maps.size(); ++s) {
    auto v = structural_log_multiplier(maps[s], holes[s], t);
    if (!v) return std::nullopt;
    log_lambda.push_back(*v);
  }
  const std::vector<double> m = driving.marginals();
  double acc = 0.0;
  for (std::size_t s = 0; s < maps.size(); ++s) acc += m[s] * log_lambda[s];
  return acc;
}

double grid_pressure(const std::vector<PiecewiseLinearMap>& maps, const FiberOrbit& orbit,
                     const std::vector<IntervalSet>& holes, double t,
                     const PressureOptions& options) {
  auto [cells, aligned] = choose_grid_cells(maps, holes, options.grid_hint);
  (void)aligned;
  TransferCocycle cocycle(maps, WeightSpec{rational_from_double(t)}, Grid(cells));
  bool any_hole = false;
  for (const auto& h : holes) any_hole = any_hole || !h.is_empty();
  if (!any_hole) return lambda_closed(cocycle, orbit, options.steps, options.burn_in).birkhoff_mean;
  OpenCocycle open(cocycle, holes);
  return lambda_open(open, orbit, options.burn_in, options.steps).birkhoff_mean;
}

}  // namespace

double expected_pressure(const std::vector<PiecewiseLinearMap>& maps,
                         const DrivingSystem& driving, const FiberOrbit& orbit,
                         const std::vector<IntervalSet>& holes, double t,
                         const PressureOptions& options) {
  if (t < 0) throw std::invalid_argument("expected_pressure: t must be >= 0");
  if (holes.size() != maps.size())
    throw std::invalid_argument("expected_pressure: one hole per symbol");
  if (options.exact_iid_average) {
    if (auto v = exact_pressure(maps, driving, holes, t)) return *v;
  }
  // structurally exact per-symbol multipliers still help along the orbit
  {
    std::vector<double> log_lambda;
    bool ok = true;
    for (std::size_t s = 0; s < maps.size(); ++s) {
      auto v = structural_log_multiplier(maps[s], holes[s], t);
      if (!v) {
        ok = false;
        break;
      }
      log_lambda.push_back(*v);
    }
    if (ok) {
      double acc = 0.0;
      for (long j = 0; j < options.steps; ++j)
        acc += log_lambda[static_cast<std::size_t>(orbit.symbol(j))];
      return acc / static_cast<double>(options.steps);
    }
  }
  return grid_pressure(maps, orbit, holes, t, options);
}

PressureCurve pressure_curve(const std::vector<PiecewiseLinearMap>& maps,
                             const DrivingSystem& driving, const FiberOrbit& orbit,
                             const std::vector<IntervalSet>& holes,
                             const std::vector<double>& t_samples,
                             const PressureOptions& options) {
  PressureCurve curve;
  std::vector<IntervalSet> no_holes(maps.size());
  for (double t : t_samples) {
    curve.t.push_back(t);
    curve.ep_closed.push_back(expected_pressure(maps, driving, orbit, no_holes, t, options));
    curve.ep_open.push_back(expected_pressure(maps, driving, orbit, holes, t, options));
  }
  return curve;
}

BowenResult bowen_dimension(const std::vector<PiecewiseLinearMap>& maps,
                            const DrivingSystem& driving, const FiberOrbit& orbit,
                            const std::vector<IntervalSet>& holes, double tol,
                            int max_iterations, const PressureOptions& options) {
  BowenResult r;
  for (std::size_t s = 0; s < maps.size(); ++s) {
    if (maps[s].min_abs_slope() <= 1)
      throw std::invalid_argument("bowen_dimension: needs uniform expansion");
  }
  r.large_images = true;
  for (const auto& m : maps) r.large_images = r.large_images && m.all_branches_full();
  r.large_images_wrt_hole = true;
  for (std::size_t s = 0; s < maps.size(); ++s) {
    for (const auto& br : maps[s].branches()) {
      rational cut = intersect(IntervalSet(br.domain), holes[s]).total_length();
      if (cut != 0 && cut != br.domain.length()) r.large_images_wrt_hole = false;
    }
  }

  auto ep = [&](double t) { return expected_pressure(maps, driving, orbit, holes, t, options); };
  double e0 = ep(0.0), e1 = ep(1.0);
  if (e0 <= tol) {
    if (e0 < -tol) throw std::runtime_error("bowen_dimension: dimension bracket violated");
    r.h = 0.0;
    r.ep_at_h = e0;
    return r;
  }
  if (e1 >= -tol) {
    if (e1 > tol) throw std::runtime_error("bowen_dimension: dimension bracket violated");
    r.h = 1.0;
    r.ep_at_h = e1;
    return r;
  }
  double lo = 0.0, hi = 1.0;
  double mid = 0.5, emid = 0.0;
  for (int i = 0; i < max_iterations; ++i) {
    mid = 0.5 * (lo + hi);
    emid = ep(mid);
    ++r.iterations;
    if (std::abs(emid) < tol && hi - lo < 1e-6) break;
    if (emid > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.h = mid;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.ep_at_h = emid;
  return r;
}

}  // namespace openrds
