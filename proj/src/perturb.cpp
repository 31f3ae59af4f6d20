#include "openrds/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace openrds {

namespace {

// One forward first-return sweep: mass starts in the hole at `start`, is
// pushed by the closed operator, and at each later fiber the mass landing in
// that fiber's hole is recorded and removed. numerators[k] is the conformal
// integral over the hole at fiber start+k+1 (this is the k-th first-return
// numerator for the origin start+k+1).
struct Sweep {
  std::vector<rational> numerators;
  rational start_hole_mass{0};
};

Sweep first_return_sweep(const TransferCocycle& cc, const FiberOrbit& orbit,
                         const HoleFamily& holes, const rational& eps, long start, int k_max,
                         const StepFunction& phi_start) {
  Sweep sw;
  const IntervalSet h0 = holes.hole(orbit.symbol(start), eps);
  if (h0.is_empty()) return sw;
  StepFunction u = phi_start.masked(h0);
  sw.start_hole_mass = u.integral();
  StepFunction v = cc.exact_push(orbit.symbol(start), u);
  sw.numerators.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int j = 1; j <= k_max + 1; ++j) {
    const long fiber = start + j;
    const IntervalSet h = holes.hole(orbit.symbol(fiber), eps);
    sw.numerators.push_back(h.is_empty() ? rational(0) : v.integral_over(h));
    if (j == k_max + 1) break;
    if (!h.is_empty()) v = v.masked(h.complement());
    v = cc.exact_push(orbit.symbol(fiber), v);
  }
  return sw;
}

double lambda0_power_log(const TransferCocycle& cc, const FiberOrbit& orbit, long from,
                         long count) {
  if (cc.weight().conformal_is_lebesgue()) return 0.0;  // every closed multiplier is 1
  if (auto cm = constant_closed_multipliers(cc)) {
    double s = 0.0;
    for (long j = 0; j < count; ++j)
      s += log_rational((*cm)[static_cast<std::size_t>(orbit.symbol(from + j))]);
    return s;
  }
  MultiplierSequence m =
      lambda_closed(cc, orbit.shifted(from), count, std::min<long>(50, orbit.backward() + from));
  double s = 0.0;
  for (double x : m.log_lambda) s += x;
  return s;
}

}  // namespace

double ReturnRatioSeries::partial_sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

ReturnRatioSeries return_ratios(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                const HoleFamily& holes, const rational& eps, long origin,
                                int k_max) {
  ReturnRatioSeries out;
  out.origin = origin;
  out.eps = to_double(eps);
  out.values.assign(static_cast<std::size_t>(k_max) + 1, 0.0);

  if (!nu_is_lebesgue(cocycle))
    throw std::runtime_error(
        "return_ratios: needs a Lebesgue conformal measure (weight exponent 1 or a "
        "single-expansion-rate map family)");
  const IntervalSet h_origin = holes.hole(orbit.symbol(origin), eps);
  const double denom = fiber_mu_mass(cocycle, orbit, origin, h_origin);
  if (!(denom > 0.0))
    throw std::runtime_error("return_ratios: origin fiber outside Omega_+ at this eps");

  for (int k = 0; k <= k_max; ++k) {
    const long start = origin - (k + 1);
    StepFunction phi_start = fiber_density_step(cocycle, orbit, start);
    Sweep sw = first_return_sweep(cocycle, orbit, holes, eps, start, k, phi_start);
    if (sw.numerators.empty()) continue;
    out.values[static_cast<std::size_t>(k)] = to_double(sw.numerators.back()) / denom;
  }
  // correct the lambda_0 powers when they are not identically 1
  if (!cocycle.weight().conformal_is_lebesgue()) {
    for (int k = 0; k <= k_max; ++k) {
      double logpow = lambda0_power_log(cocycle, orbit, origin - (k + 1), k + 1);
      out.values[static_cast<std::size_t>(k)] *= std::exp(-logpow);
    }
  }
  return out;
}

double perturbation_delta(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                          const HoleFamily& holes, const rational& eps, long origin) {
  const IntervalSet h = holes.hole(orbit.symbol(origin), eps);
  double lambda0 = 1.0;
  if (!cocycle.weight().conformal_is_lebesgue()) {
    if (auto cm = constant_closed_multipliers(cocycle))
      lambda0 = to_double((*cm)[static_cast<std::size_t>(orbit.symbol(origin))]);
    else
      lambda0 = std::exp(
          lambda_closed(cocycle, orbit.shifted(origin), 1, std::min<long>(50, orbit.backward()))
              .log_lambda.front());
  }
  return lambda0 * fiber_mu_mass(cocycle, orbit, origin, h);
}

double ExtremalIndexEstimate::theta() const {
  if (theta_raw.empty()) return 1.0;
  return converged ? theta_raw[converged_index] : theta_raw.back();
}

std::vector<rational> geometric_schedule(const rational& eps0, int count) {
  std::vector<rational> out;
  rational e = eps0;
  for (int i = 0; i < count; ++i) {
    out.push_back(e);
    e /= 2;
  }
  return out;
}

ExtremalIndexEstimate extremal_index(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                     const HoleFamily& holes,
                                     const std::vector<rational>& eps_schedule, int k_max,
                                     long origin, double tol) {
  ExtremalIndexEstimate est;
  for (const auto& eps : eps_schedule) {
    ReturnRatioSeries series = return_ratios(cocycle, orbit, holes, eps, origin, k_max);
    double theta = 1.0 - series.partial_sum();
    est.eps.push_back(to_double(eps));
    est.theta_raw.push_back(theta);
    est.theta_clamped.push_back(std::clamp(theta, 0.0, 1.0));
    est.tail.push_back(series.tail_deficit());
    const std::size_t m = est.theta_raw.size();
    if (!est.converged && m >= 2 &&
        std::abs(est.theta_raw[m - 1] - est.theta_raw[m - 2]) < tol) {
      est.converged = true;
      est.converged_index = m - 1;
    }
  }
  const std::size_t m = est.theta_raw.size();
  if (m >= 2) {
    // the finite-eps defect is first order in eps for shrinking holes; one
    // Richardson step removes it (reported alongside, never silently used)
    est.extrapolated = 2.0 * est.theta_raw[m - 1] - est.theta_raw[m - 2];
  } else if (m == 1) {
    est.extrapolated = est.theta_raw[0];
  }
  return est;
}

OrbitThetaAverage extremal_index_orbit_average(const TransferCocycle& cocycle,
                                               const FiberOrbit& orbit, const HoleFamily& holes,
                                               const rational& eps, int k_max, long n_origins) {
  if (!nu_is_lebesgue(cocycle))
    throw std::runtime_error("extremal_index_orbit_average: needs Lebesgue conformal measure");
  if (orbit.backward() < k_max + 2)
    throw std::invalid_argument("extremal_index_orbit_average: orbit lacks backward steps");

  const bool flat = constant_closed_multipliers(cocycle).has_value();
  std::vector<double> qsum(static_cast<std::size_t>(n_origins), 0.0);
  std::vector<double> denom(static_cast<std::size_t>(n_origins), 0.0);
  for (long origin = 0; origin < n_origins; ++origin) {
    const IntervalSet h = holes.hole(orbit.symbol(origin), eps);
    denom[static_cast<std::size_t>(origin)] =
        flat ? to_double(h.total_length()) : fiber_mu_mass(cocycle, orbit, origin, h);
  }
  // each sweep starting at fiber s feeds origin s+k+1 with its k-th numerator
  for (long s = -(k_max + 1); s < n_origins - 1; ++s) {
    StepFunction phi_start = fiber_density_step(cocycle, orbit, s);
    const int reach = static_cast<int>(std::min<long>(k_max, n_origins - 1 - (s + 1)));
    Sweep sw = first_return_sweep(cocycle, orbit, holes, eps, s, reach, phi_start);
    for (std::size_t k = 0; k < sw.numerators.size(); ++k) {
      const long origin = s + static_cast<long>(k) + 1;
      if (origin < 0 || origin >= n_origins) continue;
      double d = denom[static_cast<std::size_t>(origin)];
      if (!(d > 0.0)) continue;
      double q = to_double(sw.numerators[k]) / d;
      if (!cocycle.weight().conformal_is_lebesgue())
        q *= std::exp(-lambda0_power_log(cocycle, orbit, s, static_cast<long>(k) + 1));
      qsum[static_cast<std::size_t>(origin)] += q;
    }
  }
  OrbitThetaAverage out;
  out.per_origin.resize(static_cast<std::size_t>(n_origins));
  double acc = 0.0;
  for (long o = 0; o < n_origins; ++o) {
    double theta = 1.0 - qsum[static_cast<std::size_t>(o)];
    out.per_origin[static_cast<std::size_t>(o)] = theta;
    acc += theta;
  }
  out.mean = acc / static_cast<double>(n_origins);
  return out;
}

FirstOrderTable first_order_table(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                  const HoleFamily& holes,
                                  const std::vector<rational>& eps_schedule, int k_max,
                                  long burn_in) {
  FirstOrderTable table;
  double lambda0;
  if (auto cm = constant_closed_multipliers(cocycle)) {
    lambda0 = to_double((*cm)[static_cast<std::size_t>(orbit.symbol(0))]);
  } else {
    lambda0 = std::exp(lambda_closed(cocycle, orbit, 1, burn_in).log_lambda.front());
  }
  for (const auto& eps : eps_schedule) {
    OpenCocycle open(cocycle, holes, eps);
    double lambda_eps;
    if (auto om = constant_open_multipliers(open)) {
      lambda_eps = to_double((*om)[static_cast<std::size_t>(orbit.symbol(0))]);
    } else {
      lambda_eps =
          std::exp(lambda_open(open, orbit, burn_in, 1).log_lambda_eps.front());
    }
    double delta = perturbation_delta(cocycle, orbit, holes, eps);
    FirstOrderRow row;
    row.eps = to_double(eps);
    row.lambda_gap = lambda0 - lambda_eps;
    row.delta = delta;
    row.ratio = delta > 0 ? row.lambda_gap / delta
                          : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(row);
  }
  ExtremalIndexEstimate est =
      extremal_index(cocycle, orbit, holes, eps_schedule, k_max);
  table.theta_target = est.theta();
  return table;
}

std::vector<EscapeAsymptoticsRow> escape_rate_ratio_table(
    const TransferCocycle& cocycle, const FiberOrbit& orbit, const HoleFamily& holes,
    const std::vector<rational>& eps_schedule, long steps, long burn_in) {
  std::vector<EscapeAsymptoticsRow> rows;
  MultiplierSequence closed_seq = lambda_closed(cocycle, orbit, steps, burn_in);
  for (const auto& eps : eps_schedule) {
    OpenCocycle open(cocycle, holes, eps);
    OpenSpectralData data = lambda_open(open, orbit, burn_in, steps);
    EscapeAsymptoticsRow row;
    row.eps = to_double(eps);
    row.escape_rate = closed_seq.birkhoff_mean - data.birkhoff_mean;
    row.hole_mass = fiber_mu_mass(cocycle, orbit, 0,
                                  holes.hole(orbit.symbol(0), eps));
    row.ratio = row.hole_mass > 0 ? row.escape_rate / row.hole_mass
                                  : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace openrds
