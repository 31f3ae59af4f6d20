#include "openrds/open_system.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace openrds {

HoleFamily HoleFamily::fixed(std::vector<IntervalSet> per_symbol) {
  HoleFamily h;
  h.symbols_ = static_cast<int>(per_symbol.size());
  h.fixed_ = std::move(per_symbol);
  return h;
}

HoleFamily HoleFamily::balls(std::vector<rational> centers,
                             std::vector<rational> radius_factors) {
  if (centers.size() != radius_factors.size())
    throw std::invalid_argument("HoleFamily: one radius factor per center");
  HoleFamily h;
  h.symbols_ = static_cast<int>(centers.size());
  h.centers_ = std::move(centers);
  h.radius_factors_ = std::move(radius_factors);
  return h;
}

HoleFamily HoleFamily::balls(std::vector<rational> centers) {
  std::vector<rational> ones(centers.size(), rational(1));
  return balls(std::move(centers), std::move(ones));
}

HoleFamily HoleFamily::empty(int symbols) {
  return fixed(std::vector<IntervalSet>(static_cast<std::size_t>(symbols)));
}

IntervalSet HoleFamily::hole(int symbol, const rational& eps) const {
  if (symbol < 0 || symbol >= symbols_) throw std::out_of_range("HoleFamily: symbol");
  if (fixed_) return (*fixed_)[static_cast<std::size_t>(symbol)];
  rational r = eps * radius_factors_[static_cast<std::size_t>(symbol)];
  if (r <= 0) return IntervalSet::empty();
  const rational& c = centers_[static_cast<std::size_t>(symbol)];
  rational lo = c - r < 0 ? rational(0) : c - r;
  rational hi = c + r > 1 ? rational(1) : c + r;
  if (lo >= hi) return IntervalSet::empty();
  return IntervalSet(Interval(lo, hi));
}

bool HoleFamily::nested(int symbol, const std::vector<rational>& eps_desc) const {
  for (std::size_t i = 1; i < eps_desc.size(); ++i) {
    if (eps_desc[i] > eps_desc[i - 1]) return false;
    IntervalSet big = hole(symbol, eps_desc[i - 1]);
    IntervalSet small = hole(symbol, eps_desc[i]);
    if (!big.contains_set(small)) return false;
  }
  return true;
}

OpenCocycle::OpenCocycle(const TransferCocycle& closed, std::vector<IntervalSet> holes)
    : closed_(&closed), holes_(std::move(holes)) {
  build();
}

OpenCocycle::OpenCocycle(const TransferCocycle& closed, const HoleFamily& family,
                         const rational& eps)
    : closed_(&closed) {
  for (std::size_t s = 0; s < closed.maps().size(); ++s)
    holes_.push_back(family.hole(static_cast<int>(s), eps));
  build();
}

void OpenCocycle::build() {
  if (holes_.size() != closed_->maps().size())
    throw std::invalid_argument("OpenCocycle: one hole per symbol required");
  const Grid& grid = closed_->grid();
  const int n = grid.cells();
  for (std::size_t s = 0; s < holes_.size(); ++s) {
    surviving_.push_back(holes_[s].complement());
    holes_aligned_ = holes_aligned_ && grid.aligned(holes_[s]);
    std::vector<double> frac(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
      rational cut = StepFunction::indicator(holes_[s]).integral_over(IntervalSet(grid.cell(i)));
      if (cut > 0) frac[static_cast<std::size_t>(i)] = to_double(rational(1) - cut * n);
    }
    open_matrices_.push_back(closed_->matrix(static_cast<int>(s))
                                 .column_scaled(frac, grid.aligned(holes_[s])));
  }
}

const IntervalSet& OpenCocycle::hole(int symbol) const {
  return holes_.at(static_cast<std::size_t>(symbol));
}

const IntervalSet& OpenCocycle::surviving(int symbol) const {
  return surviving_.at(static_cast<std::size_t>(symbol));
}

const TransferMatrix& OpenCocycle::matrix(int symbol) const {
  return open_matrices_.at(static_cast<std::size_t>(symbol));
}

bool OpenCocycle::full_branch_outside_holes() const {
  for (std::size_t s = 0; s < holes_.size(); ++s) {
    if (holes_[s].is_empty()) continue;
    bool found = false;
    for (const auto& br : closed_->maps()[s].branches()) {
      if (!br.is_full()) continue;
      if (intersect(IntervalSet(br.domain), holes_[s]).is_empty()) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

StepFunction OpenCocycle::exact_open_push(int symbol, const StepFunction& f) const {
  return closed_->exact_push(symbol, f.masked(surviving(symbol)));
}

TransferMatrix open_matrix(const TransferMatrix& closed, const IntervalSet& hole,
                           const Grid& grid) {
  const int n = grid.cells();
  std::vector<double> frac(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    rational cut = StepFunction::indicator(hole).integral_over(IntervalSet(grid.cell(i)));
    if (cut > 0) frac[static_cast<std::size_t>(i)] = to_double(rational(1) - cut * n);
  }
  return closed.column_scaled(frac, grid.aligned(hole));
}

SurvivorSet survivor_set(const OpenCocycle& open, const FiberOrbit& orbit, long depth,
                         std::size_t max_pieces) {
  IntervalSet acc = open.surviving(orbit.symbol(depth));
  for (long j = depth - 1; j >= 0; --j) {
    const int sym = orbit.symbol(j);
    acc = intersect(open.surviving(sym), open.closed().map(sym).pullback(acc));
    if (acc.is_empty())
      throw EmptySurvivorError("survivor_set: empty at depth " + std::to_string(depth - j) +
                               " (fiber " + std::to_string(j) + ")");
    if (acc.size() > max_pieces)
      throw SurvivorBudgetError("survivor_set: piece budget exceeded at fiber " +
                                std::to_string(j));
  }
  SurvivorSet s;
  s.depth = depth;
  s.body = std::move(acc);
  return s;
}

rational survivor_lebesgue(const SurvivorSet& s) { return s.body.total_length(); }

double survivor_mu_mass(const SurvivorSet& s, const GridDensity& phi) {
  return phi.integral_over(s.body);
}

OpenSpectralData lambda_open(const OpenCocycle& open, const FiberOrbit& orbit, long burn_in,
                             long steps, double tol) {
  const TransferCocycle& closed = open.closed();
  if (orbit.backward() < burn_in)
    throw std::invalid_argument("lambda_open: orbit lacks backward steps");
  GridDensity f(closed.grid(), 1.0);
  for (long j = -burn_in; j < 0; ++j) {
    f = open.matrix(orbit.symbol(j)).apply(f);
    double mass = f.lebesgue_mass();
    if (!(mass > 0.0))
      throw std::runtime_error("lambda_open: survivor mass vanished during burn-in");
    f.scale(1.0 / mass);
  }
  OpenSpectralData out;
  out.phi_eps = f;
  out.log_lambda_eps.reserve(static_cast<std::size_t>(steps));
  for (long j = 0; j < steps; ++j) {
    f = open.matrix(orbit.symbol(j)).apply(f);
    double mass = f.lebesgue_mass();
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::runtime_error("lambda_open: mass underflow at step " + std::to_string(j));
    out.log_lambda_eps.push_back(std::log(mass));
    f.scale(1.0 / mass);
  }
  double s = 0.0;
  for (double x : out.log_lambda_eps) s += x;
  out.birkhoff_mean = steps > 0 ? s / static_cast<double>(steps) : 0.0;

  // cross-check: survivor-mass decay of pushed indicators against the
  // multiplier means (they estimate the same expected pressures)
  if (steps >= 16) {
    GridDensity ones(closed.grid(), 1.0);
    double log_open = 0.0, log_closed = 0.0;
    GridDensity a = ones, b = ones;
    for (long j = 0; j < steps; ++j) {
      a = open.matrix(orbit.symbol(j)).apply(a);
      b = closed.matrix(orbit.symbol(j)).apply(b);
      double ma = a.lebesgue_mass(), mb = b.lebesgue_mass();
      if (!(ma > 0.0)) throw std::runtime_error("lambda_open: open mass vanished");
      log_open += std::log(ma);
      log_closed += std::log(mb);
      a.scale(1.0 / ma);
      b.scale(1.0 / mb);
    }
    MultiplierSequence lc = lambda_closed(closed, orbit, steps, std::min(burn_in, orbit.backward()));
    double decay = (log_open - log_closed) / static_cast<double>(steps);
    double spectral = out.birkhoff_mean - lc.birkhoff_mean;
    out.crosscheck_gap = std::abs(decay - spectral);
    double allowance = 10.0 * (tol + 4.0 * std::log(static_cast<double>(steps)) /
                                         static_cast<double>(steps));
    if (out.crosscheck_gap > allowance)
      throw std::runtime_error("lambda_open: decay and multiplier estimators disagree (gap " +
                               std::to_string(out.crosscheck_gap) + ")");
  }
  return out;
}

std::optional<std::vector<rational>> constant_open_multipliers(const OpenCocycle& open) {
  std::vector<rational> out;
  const StepFunction one{rational(1)};
  for (std::size_t s = 0; s < open.closed().maps().size(); ++s) {
    StepFunction pushed = open.exact_open_push(static_cast<int>(s), one);
    if (pushed.piece_count() != 1) return std::nullopt;
    out.push_back(pushed.values().front());
  }
  return out;
}

EscapeRateResult escape_rate(const OpenCocycle& open, const FiberOrbit& orbit, long steps,
                             long burn_in, const GridDensity* phi0) {
  const TransferCocycle& closed = open.closed();
  EscapeRateResult r;

  GridDensity a(closed.grid(), 1.0);  // open push of ones -> nu-survivor mass
  GridDensity b = phi0 ? *phi0 : GridDensity(closed.grid(), 1.0);  // mu-survivor mass
  GridDensity c(closed.grid(), 1.0);  // closed push -> lambda_0 normalization
  double log_a = 0.0, log_b = 0.0, log_c = 0.0;
  double log_a_half = 0.0, log_c_half = 0.0;
  // short transient only, so the decay and pressure estimators average over
  // nearly the same fiber window
  const long half = std::min<long>(std::max<long>(burn_in, 8), steps / 8);
  for (long j = 0; j < steps; ++j) {
    const int sym = orbit.symbol(j);
    a = open.matrix(sym).apply(a);
    b = open.matrix(sym).apply(b);
    c = closed.matrix(sym).apply(c);
    double ma = a.lebesgue_mass(), mb = b.lebesgue_mass(), mc = c.lebesgue_mass();
    if (!(ma > 0.0) || !(mb > 0.0))
      throw std::runtime_error("escape_rate: survivor mass vanished at step " +
                               std::to_string(j));
    log_a += std::log(ma);
    log_b += std::log(mb);
    log_c += std::log(mc);
    a.scale(1.0 / ma);
    b.scale(1.0 / mb);
    c.scale(1.0 / mc);
    if (j + 1 == half) {
      log_a_half = log_a;
      log_c_half = log_c;
    }
    if ((j + 1) % std::max<long>(1, steps / 16) == 0 || j + 1 == steps)
      r.table.push_back({static_cast<double>(j + 1), log_a - log_c, log_b - log_c,
                         log_a / static_cast<double>(j + 1)});
  }
  // decay estimate over the second half, discarding the transient
  r.decay_rate = -((log_a - log_c) - (log_a_half - log_c_half)) /
                 static_cast<double>(steps - half);

  MultiplierSequence lc = lambda_closed(closed, orbit, steps, burn_in);
  OpenSpectralData lo = lambda_open(open, orbit, burn_in, steps);
  r.pressure_rate = lc.birkhoff_mean - lo.birkhoff_mean;
  r.gap = std::abs(r.decay_rate - r.pressure_rate);
  return r;
}

}  // namespace openrds
