#include "openrds/evt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "openrds/trajectory.hpp"

namespace openrds {

IntervalSet ObservationFunction::level_set(const rational& radius) const {
  if (radius <= 0) return IntervalSet::empty();
  rational lo = center - radius < 0 ? rational(0) : center - radius;
  rational hi = center + radius > 1 ? rational(1) : center + radius;
  if (lo >= hi) return IntervalSet::empty();
  return IntervalSet(Interval(lo, hi));
}

double ObservationFunction::threshold_for_radius(double radius) const {
  return kind == Kind::NegDistance ? -radius : -std::log(radius);
}

namespace {

// exact radius with mu = Leb: mass of ball(center, r) clipped to [0,1)
rational flat_radius_for_mass(const rational& center, const rational& mass) {
  if (mass <= 0) return rational(0);
  // unclipped two-sided ball
  rational r = mass / 2;
  if (center - r >= 0 && center + r <= 1) return r;
  // clipped on the left: [0, center + r)
  r = mass - center;
  if (center - r <= 0 && center + r <= 1 && r >= center) return r;
  // clipped on the right: [center - r, 1)
  r = mass - (1 - center);
  if (center + r >= 1 && center - r >= 0 && r >= 1 - center) return r;
  throw std::invalid_argument("solve_thresholds: requested hole mass does not fit");
}

}  // namespace

ThresholdSchedule solve_thresholds(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                   const std::vector<ObservationFunction>& obs,
                                   const std::vector<double>& t, const std::vector<long>& n_list,
                                   bool snap_to_grid) {
  const std::size_t symbols = cocycle.maps().size();
  if (obs.size() != symbols || t.size() != symbols)
    throw std::invalid_argument("solve_thresholds: need one observation and scaling per symbol");
  const bool flat = constant_closed_multipliers(cocycle).has_value() && nu_is_lebesgue(cocycle);

  // densities per symbol for the non-flat case: the equivariant density at a
  // fiber carrying that symbol (level-set masses are then fiber-resolved)
  std::vector<GridDensity> phis;
  if (!flat) {
    for (std::size_t s = 0; s < symbols; ++s) {
      long fiber = 0;
      bool found = false;
      for (long j = 0; j <= orbit.forward(); ++j)
        if (orbit.symbol(j) == static_cast<int>(s)) {
          fiber = j;
          found = true;
          break;
        }
      if (!found) throw std::invalid_argument("solve_thresholds: symbol never appears in orbit");
      InvariantDensityResult r = invariant_density(cocycle, orbit.shifted(fiber), 50);
      // the density must stay away from zero near the observation center
      int c = cocycle.grid().cell_of(obs[s].center);
      for (int d = -2; d <= 2; ++d) {
        int idx = std::clamp(c + d, 0, cocycle.grid().cells() - 1);
        if (r.density[idx] <= 0)
          throw std::runtime_error("solve_thresholds: density vanishes near a center");
      }
      phis.push_back(std::move(r.density));
    }
  }

  ThresholdSchedule sched;
  sched.t = t;
  for (long N : n_list) {
    ThresholdEntry e;
    e.N = N;
    for (std::size_t s = 0; s < symbols; ++s) {
      const double target = t[s] / static_cast<double>(N);
      if (target >= 1.0)
        throw std::invalid_argument("solve_thresholds: schedule violates small-hole regime");
      if (target <= 0.0) {
        e.holes.push_back(IntervalSet::empty());
        e.radius.push_back(0.0);
        e.xi.push_back(0.0);
        continue;
      }
      if (flat) {
        rational r = flat_radius_for_mass(obs[s].center, rational_from_double(t[s]) / N);
        IntervalSet hole = obs[s].level_set(r);
        e.holes.push_back(hole);
        e.radius.push_back(to_double(r));
        e.xi.push_back(static_cast<double>(N) * to_double(hole.total_length()) - t[s]);
      } else {
        double lo = 0.0, hi = 1.0;
        const GridDensity& phi = phis[s];
        auto mass_at = [&](double r) {
          return phi.integral_over(obs[s].level_set(rational_from_double(r)));
        };
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          if (mass_at(mid) < target) {
            lo = mid;
          } else {
            hi = mid;
          }
          if (std::abs(static_cast<double>(N) * mass_at(mid) - t[s]) < 1e-10) break;
        }
        double r = 0.5 * (lo + hi);
        IntervalSet hole = obs[s].level_set(rational_from_double(r));
        if (snap_to_grid && !hole.is_empty()) {
          const int n = cocycle.grid().cells();
          std::vector<Interval> snapped;
          for (const auto& iv : hole.parts()) {
            long a = std::lround(to_double(iv.lo) * n);
            long b = std::lround(to_double(iv.hi) * n);
            if (b <= a) b = a + 1;
            snapped.emplace_back(make_rational(a, n), make_rational(b, n));
          }
          hole = IntervalSet(std::move(snapped));
        }
        e.holes.push_back(hole);
        e.radius.push_back(r);
        e.xi.push_back(static_cast<double>(N) * phi.integral_over(hole) - t[s]);
      }
    }
    sched.entries.push_back(std::move(e));
  }
  return sched;
}

std::vector<EvtCurveRow> survivor_probability_curve(const TransferCocycle& cocycle,
                                                    const FiberOrbit& orbit,
                                                    const ThresholdSchedule& schedule,
                                                    long burn_in) {
  std::vector<EvtCurveRow> rows;
  const bool lebesgue = nu_is_lebesgue(cocycle);
  GridDensity phi0 = constant_closed_multipliers(cocycle)
                         ? GridDensity(cocycle.grid(), 1.0)
                         : invariant_density(cocycle, orbit, 50).density;
  for (const auto& entry : schedule.entries) {
    OpenCocycle open(cocycle, entry.holes);
    const long N = entry.N;

    GridDensity a(cocycle.grid(), 1.0);
    GridDensity b = phi0;
    double log_a = 0, log_b = 0, log_c = 0;
    GridDensity c(cocycle.grid(), 1.0);
    const bool need_closed = !cocycle.weight().conformal_is_lebesgue();
    for (long j = 0; j < N; ++j) {
      const int sym = orbit.symbol(j);
      a = open.matrix(sym).apply(a);
      b = open.matrix(sym).apply(b);
      double ma = a.lebesgue_mass(), mb = b.lebesgue_mass();
      if (!(ma > 0) || !(mb > 0))
        throw std::runtime_error("survivor_probability_curve: survivor mass vanished");
      log_a += std::log(ma);
      log_b += std::log(mb);
      a.scale(1.0 / ma);
      b.scale(1.0 / mb);
      if (need_closed) {
        c = cocycle.matrix(sym).apply(c);
        double mc = c.lebesgue_mass();
        log_c += std::log(mc);
        c.scale(1.0 / mc);
      }
    }
    EvtCurveRow row;
    row.N = N;
    if (lebesgue) {
      row.nu_survivor = std::exp(log_a - log_c);
      row.mu_survivor = std::exp(log_b - log_c);
    } else {
      // conformal mass of the pushed densities at the far fiber
      double nu_a = conformal_sandwich(cocycle, orbit.shifted(N), a, burn_in).estimate();
      double nu_b = conformal_sandwich(cocycle, orbit.shifted(N), b, burn_in).estimate();
      row.nu_survivor = std::exp(log_a - log_c) * nu_a;
      row.mu_survivor = std::exp(log_b - log_c) * nu_b;
    }

    // per-fiber multiplier ratios from an equilibrated open sweep
    double log_ratio = 0;
    {
      GridDensity f(cocycle.grid(), 1.0);
      for (long j = -std::min(burn_in, orbit.backward()); j < 0; ++j) {
        f = open.matrix(orbit.symbol(j)).apply(f);
        double m = f.lebesgue_mass();
        if (!(m > 0)) throw std::runtime_error("survivor_probability_curve: burn-in died");
        f.scale(1.0 / m);
      }
      GridDensity g(cocycle.grid(), 1.0);  // closed companion for lambda_0
      for (long j = 0; j < N; ++j) {
        const int sym = orbit.symbol(j);
        f = open.matrix(sym).apply(f);
        double m = f.lebesgue_mass();
        if (!(m > 0)) throw std::runtime_error("survivor_probability_curve: sweep died");
        log_ratio += std::log(m);
        f.scale(1.0 / m);
        if (need_closed) {
          g = cocycle.matrix(sym).apply(g);
          double mg = g.lebesgue_mass();
          log_ratio -= std::log(mg);
          g.scale(1.0 / mg);
        }
      }
    }
    row.lambda_ratio = std::exp(log_ratio);
    rows.push_back(row);
  }
  return rows;
}

double gumbel_prediction(const std::vector<double>& theta_per_origin,
                         const std::vector<double>& t_per_symbol, const FiberOrbit& orbit) {
  if (theta_per_origin.empty()) throw std::invalid_argument("gumbel_prediction: no thetas");
  double acc = 0.0;
  for (std::size_t j = 0; j < theta_per_origin.size(); ++j)
    acc += t_per_symbol[static_cast<std::size_t>(orbit.symbol(static_cast<long>(j)))] *
           theta_per_origin[j];
  return std::exp(-acc / static_cast<double>(theta_per_origin.size()));
}

double ks_distance_to_exponential(const std::vector<double>& sorted_values, double rate) {
  const auto n = static_cast<double>(sorted_values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_values.size(); ++i) {
    double f = 1.0 - std::exp(-rate * sorted_values[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - f;
    double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

HittingTimeResult hitting_time_mc(const std::vector<PiecewiseLinearMap>& maps,
                                  const DrivingSystem& driving,
                                  const std::vector<IntervalSet>& holes,
                                  const std::vector<double>& phi_cells, double hole_mass,
                                  long samples, std::uint64_t seed, double rate, int threads) {
  if (hole_mass >= 0.5)
    throw std::invalid_argument("hitting_time_mc: schedule violates small-hole regime");
  if (!(hole_mass > 0)) throw std::invalid_argument("hitting_time_mc: empty holes");

  TrajectorySimulator sim(maps);
  std::vector<std::vector<U64Range>> ranges;
  ranges.reserve(holes.size());
  for (const auto& h : holes) ranges.push_back(to_u64_ranges(h));

  HittingTimeResult result;
  result.rate = rate;
  result.exact_in_law = sim.exact_in_law();

  // generous first buffer: ~40 mean hitting times
  long buffer = static_cast<long>(40.0 / std::max(hole_mass * std::max(rate, 0.05), 1e-12));
  buffer = std::max<long>(buffer, 4096);

  std::vector<long> tau(static_cast<std::size_t>(samples), -1);
  struct State {
    std::uint64_t u;
    long step;
  };
  std::vector<State> st(static_cast<std::size_t>(samples));
  const bool flat_start =
      [&] {
        for (double v : phi_cells)
          if (std::abs(v - phi_cells.front()) > 1e-15) return false;
        return true;
      }();
  DensitySampler sampler(phi_cells);
  // per-trajectory streams persist across buffer extensions
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) {
    streams.emplace_back(substream_seed(seed, static_cast<std::uint64_t>(i)));
    Rng& rng = streams.back();
    st[static_cast<std::size_t>(i)] = {flat_start ? rng.next_u64() : sampler.sample(rng), 0};
  }

  long pending = samples;
  while (pending > 0) {
    FiberOrbit orbit = driving.orbit(0, buffer + 1);
    std::vector<int> symbols(static_cast<std::size_t>(buffer) + 2);
    for (long j = 0; j <= buffer + 1; ++j)
      symbols[static_cast<std::size_t>(j)] = orbit.symbol(j);

    auto worker = [&](long begin, long end) {
      for (long i = begin; i < end; ++i) {
        auto& s = st[static_cast<std::size_t>(i)];
        auto& t_i = tau[static_cast<std::size_t>(i)];
        if (t_i >= 0) continue;
        Rng& rng = streams[static_cast<std::size_t>(i)];
        std::uint64_t u = s.u;
        long k = s.step;
        while (k < buffer) {
          u = sim.step(u, symbols[static_cast<std::size_t>(k)], rng);
          ++k;
          if (in_ranges(u, ranges[static_cast<std::size_t>(symbols[static_cast<std::size_t>(k)])])) {
            t_i = k;
            break;
          }
        }
        s.u = u;
        s.step = k;
      }
    };
    if (threads <= 1) {
      worker(0, samples);
    } else {
      std::vector<std::thread> pool;
      long chunk = (samples + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        long b = t * chunk, e = std::min<long>(samples, b + chunk);
        if (b < e) pool.emplace_back(worker, b, e);
      }
      for (auto& th : pool) th.join();
    }
    pending = 0;
    for (long i = 0; i < samples; ++i)
      if (tau[static_cast<std::size_t>(i)] < 0) ++pending;
    if (pending > 0) {
      buffer *= 2;
      ++result.buffer_extensions;
    }
  }

  result.scaled_tau.reserve(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i)
    result.scaled_tau.push_back(static_cast<double>(tau[static_cast<std::size_t>(i)]) *
                                hole_mass);
  std::sort(result.scaled_tau.begin(), result.scaled_tau.end());
  result.ks_statistic = ks_distance_to_exponential(result.scaled_tau, rate);
  return result;
}

}  // namespace openrds
