#pragma once

#include <vector>

#include "openrds/open_system.hpp"

namespace openrds {

// Conditional first-return ratios of the holes ("q-hat" series): entry k is
// the conditional probability that mass leaving the hole k+1 fibers back
// re-enters the current hole for the first time now.
struct ReturnRatioSeries {
  long origin = 0;
  double eps = 0;
  std::vector<double> values;  // k = 0..k_max
  double partial_sum() const;
  double tail_deficit() const { return 1.0 - partial_sum(); }
};

// Exact when the weight exponent is 1 (conformal measure Lebesgue); other
// exponents go through sandwich estimates of the conformal integrals.
ReturnRatioSeries return_ratios(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                const HoleFamily& holes, const rational& eps, long origin,
                                int k_max);

// lambda_0 * mu_0(hole) at the orbit origin: the first-order scale of the
// multiplier drop.
double perturbation_delta(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                          const HoleFamily& holes, const rational& eps, long origin = 0);

struct ExtremalIndexEstimate {
  std::vector<double> eps;            // the schedule, decreasing
  std::vector<double> theta_raw;      // 1 - sum of return ratios, per eps
  std::vector<double> theta_clamped;  // clamped into [0,1]
  std::vector<double> tail;           // tail deficit per eps
  bool converged = false;
  std::size_t converged_index = 0;
  double extrapolated = 0;  // linear-in-eps extrapolation from the last pair

  double theta() const;  // raw value at the converged (else final) eps
};

std::vector<rational> geometric_schedule(const rational& eps0, int count);

ExtremalIndexEstimate extremal_index(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                     const HoleFamily& holes,
                                     const std::vector<rational>& eps_schedule, int k_max,
                                     long origin = 0, double tol = 1e-4);

// Orbit average of theta over origins 0..n_origins-1 at a single eps; the
// sweeps are shared diagonally so each (origin, k) numerator is computed
// once. Requires weight exponent 1.
struct OrbitThetaAverage {
  double mean = 0;
  std::vector<double> per_origin;
};
OrbitThetaAverage extremal_index_orbit_average(const TransferCocycle& cocycle,
                                               const FiberOrbit& orbit, const HoleFamily& holes,
                                               const rational& eps, int k_max, long n_origins);

struct FirstOrderRow {
  double eps;
  double lambda_gap;  // lambda_0 - lambda_eps at the origin fiber
  double delta;       // lambda_0 * mu_0(hole)
  double ratio;       // lambda_gap / delta
};
struct FirstOrderTable {
  std::vector<FirstOrderRow> rows;
  double theta_target = 0;
};

FirstOrderTable first_order_table(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                  const HoleFamily& holes,
                                  const std::vector<rational>& eps_schedule, int k_max,
                                  long burn_in = 300);

struct EscapeAsymptoticsRow {
  double eps;
  double escape_rate;  // expected-pressure difference at this eps
  double hole_mass;    // mu_0(hole) at the origin fiber
  double ratio;
};

std::vector<EscapeAsymptoticsRow> escape_rate_ratio_table(
    const TransferCocycle& cocycle, const FiberOrbit& orbit, const HoleFamily& holes,
    const std::vector<rational>& eps_schedule, long steps, long burn_in);

}  // namespace openrds
