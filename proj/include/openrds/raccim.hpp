#pragma once

#include <vector>

#include "openrds/open_system.hpp"

namespace openrds {

// The absolutely continuous conditionally invariant measure at a fiber: the
// open equivariant density restricted off the hole, normalized to unit
// conformal mass.
struct ConditionallyInvariantDensity {
  GridDensity density;
  double alpha = 0;          // lambda_eps / lambda_0 at the fiber
  double normalization = 0;  // conformal mass of the unnormalized restriction
};

ConditionallyInvariantDensity raccim_density(const OpenCocycle& open, const FiberOrbit& orbit,
                                             long burn_in = 60);

// |eta(T^{-n}A intersect X_n) - eta_at_sigma_n(A) * eta(X_n)|, evaluated with
// exact interval arithmetic when the open equivariant density is flat.
double conditional_invariance_residual(const OpenCocycle& open, const FiberOrbit& orbit,
                                       const IntervalSet& A, long n, long burn_in = 60);

struct SurvivorMassIdentity {
  double eta_mass = 0;          // eta(X_n)
  double multiplier_ratio = 0;  // product of lambda_eps / lambda_0
  double gap() const { return std::abs(eta_mass - multiplier_ratio); }
};

SurvivorMassIdentity survivor_mass_identity(const OpenCocycle& open, const FiberOrbit& orbit,
                                            long n, long burn_in = 60);

struct DecayReport {
  std::vector<double> gaps;  // lag 1..n_max
  double kappa = 0;
  double r_squared = 0;
  bool resolvable = true;
  long fit_lo = 3;
  long fit_hi = 20;
};

// Correlation gaps of the closed equivariant measure for cellwise-constant
// observables, with a log-linear rate fit over the given lag window.
DecayReport decay_rate_estimate(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                const GridDensity& f, const GridDensity& h, long n_max,
                                long fit_lo = 3, long fit_hi = 20, long burn_in = 50);

}  // namespace openrds
