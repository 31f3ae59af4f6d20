#pragma once

#include <cstdint>
#include <vector>

#include "openrds/open_system.hpp"
#include "openrds/perturb.hpp"

namespace openrds {

// Unimodal observation; its super-level sets are balls around the center
// (clipped at the interval ends), which is all the threshold solver needs.
struct ObservationFunction {
  enum class Kind { NegDistance, NegLogDistance };
  Kind kind = Kind::NegDistance;
  rational center{0};

  IntervalSet level_set(const rational& radius) const;
  double threshold_for_radius(double radius) const;  // z with {h > z} = ball(radius)
};

struct ThresholdEntry {
  long N = 0;
  std::vector<IntervalSet> holes;  // per symbol
  std::vector<double> radius;
  std::vector<double> xi;  // N * mu0(hole) - t, per symbol
};

struct ThresholdSchedule {
  std::vector<double> t;  // per symbol scaling
  std::vector<ThresholdEntry> entries;
};

// Solves mu0(hole at symbol s) = t_s / N for each N; exact (xi = 0) for flat
// densities, bisection + optional grid snap otherwise.
ThresholdSchedule solve_thresholds(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                   const std::vector<ObservationFunction>& obs,
                                   const std::vector<double>& t, const std::vector<long>& n_list,
                                   bool snap_to_grid = false);

struct EvtCurveRow {
  long N = 0;
  double nu_survivor = 0;     // nu_0(X_{N-1, eps_N})
  double mu_survivor = 0;     // mu_0 version
  double lambda_ratio = 0;    // product of open/closed multipliers
};

std::vector<EvtCurveRow> survivor_probability_curve(const TransferCocycle& cocycle,
                                                    const FiberOrbit& orbit,
                                                    const ThresholdSchedule& schedule,
                                                    long burn_in = 60);

double gumbel_prediction(const std::vector<double>& theta_per_origin,
                         const std::vector<double>& t_per_symbol, const FiberOrbit& orbit);

struct HittingTimeResult {
  std::vector<double> scaled_tau;  // sorted, tau * mu0(hole)
  double ks_statistic = 0;
  double rate = 0;           // exponential rate used in the reference law
  long buffer_extensions = 0;
  bool exact_in_law = true;  // fixed-point simulation applied
};

// Monte Carlo hitting times from mu_0-distributed starts; per-trajectory
// substreams make the result independent of thread count.
HittingTimeResult hitting_time_mc(const std::vector<PiecewiseLinearMap>& maps,
                                  const DrivingSystem& driving,
                                  const std::vector<IntervalSet>& holes,
                                  const std::vector<double>& phi_cells, double hole_mass,
                                  long samples, std::uint64_t seed, double rate,
                                  int threads = 1);

double ks_distance_to_exponential(const std::vector<double>& sorted_values, double rate);

}  // namespace openrds
