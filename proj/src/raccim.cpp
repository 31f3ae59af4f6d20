#include "openrds/raccim.hpp"

#include <cmath>
#include <stdexcept>

namespace openrds {

namespace {

// open equivariant density at the orbit origin (unit Lebesgue mass)
GridDensity open_density(const OpenCocycle& open, const FiberOrbit& orbit, long burn_in) {
  if (constant_open_multipliers(open)) return GridDensity(open.closed().grid(), 1.0);
  GridDensity f(open.closed().grid(), 1.0);
  for (long j = -std::min(burn_in, orbit.backward()); j < 0; ++j) {
    f = open.matrix(orbit.symbol(j)).apply(f);
    double m = f.lebesgue_mass();
    if (!(m > 0)) throw std::runtime_error("raccim: open density vanished in burn-in");
    f.scale(1.0 / m);
  }
  return f;
}

double lambda_at_origin(const OpenCocycle& open, const FiberOrbit& orbit, long burn_in,
                        bool open_side) {
  const TransferCocycle& cc = open.closed();
  if (open_side) {
    if (auto cm = constant_open_multipliers(open))
      return to_double((*cm)[static_cast<std::size_t>(orbit.symbol(0))]);
    GridDensity f = open_density(open, orbit, burn_in);
    GridDensity g = open.matrix(orbit.symbol(0)).apply(f);
    return g.lebesgue_mass() / f.lebesgue_mass();
  }
  if (cc.weight().conformal_is_lebesgue()) return 1.0;
  if (auto cm = constant_closed_multipliers(cc))
    return to_double((*cm)[static_cast<std::size_t>(orbit.symbol(0))]);
  return std::exp(lambda_closed(cc, orbit, 1, burn_in).log_lambda.front());
}

}  // namespace

ConditionallyInvariantDensity raccim_density(const OpenCocycle& open, const FiberOrbit& orbit,
                                             long burn_in) {
  const TransferCocycle& cc = open.closed();
  GridDensity phi_eps = open_density(open, orbit, burn_in);
  // restrict off the hole cell by cell (exact for aligned holes)
  const IntervalSet& hole = open.hole(orbit.symbol(0));
  const Grid& grid = cc.grid();
  GridDensity restricted = phi_eps;
  for (int i = 0; i < grid.cells(); ++i) {
    rational cut = StepFunction::indicator(hole).integral_over(IntervalSet(grid.cell(i)));
    if (cut > 0)
      restricted.values()[static_cast<std::size_t>(i)] *= to_double(rational(1) - cut * grid.cells());
  }
  ConditionallyInvariantDensity out;
  out.normalization = conformal_mass(cc, orbit, restricted, burn_in);
  if (!(out.normalization > 0)) throw std::runtime_error("raccim: zero normalization");
  restricted.scale(1.0 / out.normalization);
  out.density = std::move(restricted);
  out.alpha = lambda_at_origin(open, orbit, burn_in, true) /
              lambda_at_origin(open, orbit, burn_in, false);
  return out;
}

double conditional_invariance_residual(const OpenCocycle& open, const FiberOrbit& orbit,
                                       const IntervalSet& A, long n, long burn_in) {
  const TransferCocycle& cc = open.closed();
  const bool flat = constant_open_multipliers(open).has_value() && nu_is_lebesgue(cc);

  // T^{-n}(A) along the fiber word, exactly
  IntervalSet pre = A;
  for (long j = n - 1; j >= 0; --j) pre = cc.map(orbit.symbol(j)).pullback(pre);
  SurvivorSet xn = survivor_set(open, orbit, n);
  IntervalSet lhs_set = intersect(pre, xn.body);

  if (flat) {
    auto eta = [&](long fiber, const IntervalSet& s) {
      const IntervalSet& surv = open.surviving(orbit.symbol(fiber));
      return to_double(intersect(s, surv).total_length() / surv.total_length());
    };
    double lhs = eta(0, lhs_set);
    double rhs = eta(n, A) * eta(0, xn.body);
    return std::abs(lhs - rhs);
  }
  // grid path: eta densities at fibers 0 and n
  ConditionallyInvariantDensity eta0 = raccim_density(open, orbit, burn_in);
  ConditionallyInvariantDensity etan = raccim_density(open, orbit.shifted(n), burn_in);
  double lhs = eta0.density.integral_over(lhs_set);
  double rhs = etan.density.integral_over(A) * eta0.density.integral_over(xn.body);
  return std::abs(lhs - rhs);
}

SurvivorMassIdentity survivor_mass_identity(const OpenCocycle& open, const FiberOrbit& orbit,
                                            long n, long burn_in) {
  const TransferCocycle& cc = open.closed();
  SurvivorMassIdentity out;
  SurvivorSet xn = survivor_set(open, orbit, n);
  const bool flat = constant_open_multipliers(open).has_value() && nu_is_lebesgue(cc);
  if (flat) {
    const IntervalSet& surv = open.surviving(orbit.symbol(0));
    out.eta_mass = to_double(xn.body.total_length() / surv.total_length());
  } else {
    ConditionallyInvariantDensity eta0 = raccim_density(open, orbit, burn_in);
    out.eta_mass = eta0.density.integral_over(xn.body);
  }
  double log_ratio = 0.0;
  auto om = constant_open_multipliers(open);
  auto cm = constant_closed_multipliers(cc);
  if (om && (cm || cc.weight().conformal_is_lebesgue())) {
    for (long j = 0; j < n; ++j) {
      const auto sym = static_cast<std::size_t>(orbit.symbol(j));
      log_ratio += log_rational((*om)[sym]);
      if (cm) log_ratio -= log_rational((*cm)[sym]);
    }
  } else {
    OpenSpectralData lo = lambda_open(open, orbit, burn_in, n);
    MultiplierSequence lc = lambda_closed(cc, orbit, n, burn_in);
    for (long j = 0; j < n; ++j) {
      log_ratio += lo.log_lambda_eps[static_cast<std::size_t>(j)] -
                   lc.log_lambda[static_cast<std::size_t>(j)];
    }
  }
  out.multiplier_ratio = std::exp(log_ratio);
  return out;
}

DecayReport decay_rate_estimate(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                const GridDensity& f, const GridDensity& h, long n_max,
                                long fit_lo, long fit_hi, long burn_in) {
  DecayReport rep;
  rep.fit_lo = fit_lo;
  rep.fit_hi = fit_hi;

  GridDensity phi0 = constant_closed_multipliers(cocycle)
                         ? GridDensity(cocycle.grid(), 1.0)
                         : invariant_density(cocycle, orbit, burn_in).density;
  const double mu_h = [&] {
    GridDensity hphi = h;
    for (int i = 0; i < hphi.cells(); ++i) hphi.values()[static_cast<std::size_t>(i)] *= phi0[i];
    return conformal_mass(cocycle, orbit, hphi, burn_in);
  }();

  // W_n = L^n(h*phi)/lambda^n and P_n = L^n(phi)/lambda^n = phi at sigma^n;
  // both pushed with the P-mass as the per-step normalizer so W keeps its
  // scale relative to the equivariant density.
  GridDensity W = h;
  for (int i = 0; i < W.cells(); ++i) W.values()[static_cast<std::size_t>(i)] *= phi0[i];
  GridDensity P = phi0;
  const bool lebesgue = nu_is_lebesgue(cocycle);
  for (long n = 1; n <= n_max; ++n) {
    const TransferMatrix& m = cocycle.matrix(orbit.symbol(n - 1));
    W = m.apply(W);
    P = m.apply(P);
    double mass = P.lebesgue_mass();
    if (!(mass > 0)) throw std::runtime_error("decay_rate_estimate: density mass vanished");
    W.scale(1.0 / mass);
    P.scale(1.0 / mass);
    double corr, mu_f;
    if (lebesgue) {
      corr = f.integral_against(W);
      mu_f = f.integral_against(P);
    } else {
      GridDensity fw = f, fp = f;
      for (int i = 0; i < f.cells(); ++i) {
        fw.values()[static_cast<std::size_t>(i)] *= W[i];
        fp.values()[static_cast<std::size_t>(i)] *= P[i];
      }
      corr = conformal_sandwich(cocycle, orbit.shifted(n), fw, burn_in).estimate();
      mu_f = conformal_sandwich(cocycle, orbit.shifted(n), fp, burn_in).estimate();
    }
    rep.gaps.push_back(std::abs(corr - mu_f * mu_h));
  }

  // log-linear fit over resolvable lags in the window
  std::vector<std::pair<double, double>> pts;
  for (long n = fit_lo; n <= std::min<long>(fit_hi, n_max); ++n) {
    double g = rep.gaps[static_cast<std::size_t>(n - 1)];
    if (g > 1e-12) pts.emplace_back(static_cast<double>(n), std::log(g));
  }
  if (pts.size() < 3) {
    rep.resolvable = false;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double np = static_cast<double>(pts.size());
  double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  double intercept = (sy - slope * sx) / np;
  double ss_res = 0, ss_tot = 0, ymean = sy / np;
  for (auto& [x, y] : pts) {
    double e = y - (slope * x + intercept);
    ss_res += e * e;
    ss_tot += (y - ymean) * (y - ymean);
  }
  rep.kappa = std::exp(slope);
  rep.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

}  // namespace openrds
