#pragma once

#include <optional>
#include <vector>

#include "openrds/open_system.hpp"

namespace openrds {

struct PressureOptions {
  long steps = 2000;        // orbit length per sample
  long burn_in = 50;
  int grid_hint = 2048;
  bool exact_iid_average = true;  // exact marginal average when available
};

struct PressureCurve {
  std::vector<double> t;
  std::vector<double> ep_closed;
  std::vector<double> ep_open;
};

// Expected pressure of the geometric potential at exponent t: the marginal
// average of log multipliers. Structurally exact when every branch is either
// full or wholly inside the hole (multipliers are then per-symbol constants);
// Birkhoff estimate over the orbit otherwise.
double expected_pressure(const std::vector<PiecewiseLinearMap>& maps,
                         const DrivingSystem& driving, const FiberOrbit& orbit,
                         const std::vector<IntervalSet>& holes, double t,
                         const PressureOptions& options = {});

// log of the open multiplier when the opened operator sends constants to
// constants (hole is a union of whole branches, the rest full).
std::optional<double> structural_log_multiplier(const PiecewiseLinearMap& map,
                                                const IntervalSet& hole, double t);

struct BowenResult {
  double h = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  int iterations = 0;
  double ep_at_h = 0;
  bool bounded_distortion = true;   // automatic for piecewise linear weights
  bool large_images = false;        // all branches full
  bool large_images_wrt_hole = false;  // hole is a union of full branches
};

// Bisection root of t -> EP_open(t) in [0,1]; requires EP(0) > 0 > EP(1)
// up to tolerance (boundary roots are returned as 0 or 1).
BowenResult bowen_dimension(const std::vector<PiecewiseLinearMap>& maps,
                            const DrivingSystem& driving, const FiberOrbit& orbit,
                            const std::vector<IntervalSet>& holes, double tol = 1e-6,
                            int max_iterations = 60, const PressureOptions& options = {});

PressureCurve pressure_curve(const std::vector<PiecewiseLinearMap>& maps,
                             const DrivingSystem& driving, const FiberOrbit& orbit,
                             const std::vector<IntervalSet>& holes,
                             const std::vector<double>& t_samples,
                             const PressureOptions& options = {});

}  // namespace openrds
