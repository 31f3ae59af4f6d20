#include "openrds/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace openrds {

TransferMatrix::TransferMatrix(int cells, int symbol, bool open, bool exact)
    : cells_(cells), symbol_(symbol), open_(open), exact_(exact) {}

GridDensity TransferMatrix::apply(const GridDensity& f) const {
  if (f.cells() != cells_) throw std::invalid_argument("TransferMatrix: density size mismatch");
  std::vector<double> out(static_cast<std::size_t>(cells_), 0.0);
  const auto& fv = f.values();
  for (int j = 0; j < cells_; ++j) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[static_cast<std::size_t>(j)];
         k < row_ptr_[static_cast<std::size_t>(j) + 1]; ++k)
      acc += w_[k] * fv[static_cast<std::size_t>(col_[k])];
    out[static_cast<std::size_t>(j)] = acc;
  }
  return GridDensity(Grid(cells_), std::move(out));
}

std::vector<double> TransferMatrix::column_sums() const {
  std::vector<double> s(static_cast<std::size_t>(cells_), 0.0);
  for (std::size_t k = 0; k < col_.size(); ++k) s[static_cast<std::size_t>(col_[k])] += w_[k];
  return s;
}

std::vector<std::tuple<int, int, double>> TransferMatrix::entries() const {
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(col_.size());
  for (int j = 0; j < cells_; ++j)
    for (std::size_t k = row_ptr_[static_cast<std::size_t>(j)];
         k < row_ptr_[static_cast<std::size_t>(j) + 1]; ++k)
      out.emplace_back(j, col_[k], w_[k]);
  return out;
}

TransferMatrix TransferMatrix::column_scaled(const std::vector<double>& factor,
                                             bool still_exact) const {
  TransferMatrix m(cells_, symbol_, true, exact_ && still_exact);
  m.row_ptr_ = row_ptr_;
  m.col_ = col_;
  m.w_ = w_;
  for (std::size_t k = 0; k < m.col_.size(); ++k)
    m.w_[k] *= factor[static_cast<std::size_t>(m.col_[k])];
  return m;
}

TransferMatrix TransferMatrix::build(const PiecewiseLinearMap& map, const WeightSpec& weight,
                                     const Grid& grid, int symbol) {
  const int n = grid.cells();
  const bool exact = grid.exact_for(map);
  TransferMatrix m(n, symbol, false, exact);
  std::vector<std::tuple<int, int, double>> trip;  // (target j, source i, w)
  const auto weights = map.geometric_weights(weight.exponent);

  if (exact) {
    for (std::size_t bi = 0; bi < map.branches().size(); ++bi) {
      const Branch& br = map.branches()[bi];
      const double g = to_double(weights[bi]);
      const auto s = static_cast<long>(boost::multiprecision::numerator(br.slope));
      const rational rlo = br.domain.lo * n, rhi = br.domain.hi * n, rc = br.intercept * n;
      const long i0 = static_cast<long>(boost::multiprecision::numerator(rlo));
      const long i1 = static_cast<long>(boost::multiprecision::numerator(rhi));
      const long cN = static_cast<long>(boost::multiprecision::numerator(rc));
      for (long i = i0; i < i1; ++i) {
        const long t = s > 0 ? s * i + cN : s * (i + 1) + cN;
        for (long j = t; j < t + std::abs(s); ++j)
          trip.emplace_back(static_cast<int>(j), static_cast<int>(i), g);
      }
    }
  } else {
    // Ulam projection, rational set arithmetic per (branch, source cell)
    for (std::size_t bi = 0; bi < map.branches().size(); ++bi) {
      const Branch& br = map.branches()[bi];
      const rational g = weights[bi];
      const int i0 = grid.cell_of(br.domain.lo);
      const int i1 = std::min(n - 1, grid.cell_of(br.domain.hi - make_rational(1, 2 * n)));
      for (int i = i0; i <= i1; ++i) {
        rational lo = std::max(br.domain.lo, make_rational(i, n));
        rational hi = std::min(br.domain.hi, make_rational(i + 1, n));
        if (lo >= hi) continue;
        rational a = br.apply(lo), b = br.apply(hi);
        if (br.slope < 0) std::swap(a, b);
        int j0 = grid.cell_of(a);
        int j1 = std::min(n - 1, grid.cell_of(b - make_rational(1, 4 * n * n)));
        for (int j = j0; j <= j1 && j < n; ++j) {
          rational clo = std::max(a, make_rational(j, n));
          rational chi = std::min(b, make_rational(j + 1, n));
          if (clo >= chi) continue;
          trip.emplace_back(j, i, to_double(g * (chi - clo) * n));
        }
      }
    }
  }

  std::sort(trip.begin(), trip.end());
  std::vector<std::tuple<int, int, double>> merged;
  merged.reserve(trip.size());
  for (const auto& t : trip) {
    if (!merged.empty() && std::get<0>(merged.back()) == std::get<0>(t) &&
        std::get<1>(merged.back()) == std::get<1>(t)) {
      std::get<2>(merged.back()) += std::get<2>(t);
    } else {
      merged.push_back(t);
    }
  }
  m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& t : merged) m.row_ptr_[static_cast<std::size_t>(std::get<0>(t)) + 1]++;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) m.row_ptr_[j + 1] += m.row_ptr_[j];
  m.col_.reserve(merged.size());
  m.w_.reserve(merged.size());
  for (const auto& t : merged) {
    m.col_.push_back(std::get<1>(t));
    m.w_.push_back(std::get<2>(t));
  }
  return m;
}

TransferCocycle::TransferCocycle(std::vector<PiecewiseLinearMap> maps, WeightSpec weight,
                                 Grid grid)
    : maps_(std::move(maps)), weight_(weight), grid_(grid) {
  if (maps_.empty()) throw std::invalid_argument("TransferCocycle: no maps");
  aligned_ = true;
  for (std::size_t s = 0; s < maps_.size(); ++s) {
    matrices_.push_back(
        TransferMatrix::build(maps_[s], weight_, grid_, static_cast<int>(s)));
    weights_.push_back(maps_[s].geometric_weights(weight_.exponent));
    aligned_ = aligned_ && matrices_.back().is_exact();
  }
}

const PiecewiseLinearMap& TransferCocycle::map(int symbol) const {
  return maps_.at(static_cast<std::size_t>(symbol));
}

const TransferMatrix& TransferCocycle::matrix(int symbol) const {
  return matrices_.at(static_cast<std::size_t>(symbol));
}

StepFunction TransferCocycle::exact_push(int symbol, const StepFunction& f) const {
  return maps_.at(static_cast<std::size_t>(symbol))
      .transfer_push(f, weights_.at(static_cast<std::size_t>(symbol)));
}

double CocyclePush::total_log_mass() const {
  double s = 0.0;
  for (double x : log_mass) s += x;
  return s;
}

CocyclePush push_cocycle(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                         const GridDensity& f, long steps, long start) {
  GridDensity cur = f;
  CocyclePush out;
  out.log_mass.reserve(static_cast<std::size_t>(steps));
  for (long j = 0; j < steps; ++j) {
    cur = cocycle.matrix(orbit.symbol(start + j)).apply(cur);
    double mass = cur.lebesgue_mass();
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::runtime_error("push_cocycle: mass underflow at step " + std::to_string(j));
    cur.scale(1.0 / mass);
    out.log_mass.push_back(std::log(mass));
  }
  out.final_density = std::move(cur);
  return out;
}

Sandwich conformal_sandwich(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                            const GridDensity& f, long n) {
  GridDensity num = f;
  GridDensity den(cocycle.grid(), 1.0);
  Sandwich s;
  for (long j = 0; j < n; ++j) {
    const TransferMatrix& m = cocycle.matrix(orbit.symbol(j));
    num = m.apply(num);
    den = m.apply(den);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < den.cells(); ++i) {
      if (den[i] <= 0) continue;  // outside the operator's support
      double r = num[i] / den[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    s.lower.push_back(lo);
    s.upper.push_back(hi);
    // renormalize both by the same factor to keep ratios intact
    double mass = den.lebesgue_mass();
    if (!(mass > 0.0)) throw std::runtime_error("conformal_sandwich: support vanished");
    num.scale(1.0 / mass);
    den.scale(1.0 / mass);
  }
  return s;
}

InvariantDensityResult invariant_density(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                         long burn_in, double tol) {
  const long extra = 8;
  if (orbit.backward() < burn_in + extra)
    throw std::invalid_argument("invariant_density: orbit lacks backward steps");
  auto run = [&](long depth) {
    GridDensity f(cocycle.grid(), 1.0);
    CocyclePush p = push_cocycle(cocycle, orbit, f, depth, -depth);
    double mass = p.final_density.lebesgue_mass();
    p.final_density.scale(1.0 / mass);
    return p.final_density;
  };
  InvariantDensityResult r;
  GridDensity a = run(burn_in);
  GridDensity b = run(burn_in + extra);
  r.last_diff = a.sup_distance(b);
  r.converged = r.last_diff < tol;
  r.density = std::move(b);
  r.burn_in = burn_in + extra;
  return r;
}

MultiplierSequence lambda_closed(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                 long steps, long burn_in) {
  if (orbit.backward() < burn_in)
    throw std::invalid_argument("lambda_closed: orbit lacks backward steps");
  GridDensity f(cocycle.grid(), 1.0);
  // equilibrate from sigma^{-burn_in}
  if (burn_in > 0) {
    CocyclePush warm = push_cocycle(cocycle, orbit, f, burn_in, -burn_in);
    f = warm.final_density;
    f.scale(1.0 / f.lebesgue_mass());
  }
  MultiplierSequence out;
  out.log_lambda.reserve(static_cast<std::size_t>(steps));
  for (long j = 0; j < steps; ++j) {
    f = cocycle.matrix(orbit.symbol(j)).apply(f);
    double mass = f.lebesgue_mass();
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::runtime_error("lambda_closed: mass underflow at step " + std::to_string(j));
    out.log_lambda.push_back(std::log(mass));
    f.scale(1.0 / mass);
  }
  double s = 0.0;
  for (double x : out.log_lambda) s += x;
  out.birkhoff_mean = steps > 0 ? s / static_cast<double>(steps) : 0.0;
  return out;
}

double conformal_mass(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                      const GridDensity& f, long n) {
  if (nu_is_lebesgue(cocycle)) return f.lebesgue_mass();
  return conformal_sandwich(cocycle, orbit, f, n).estimate();
}

std::optional<std::vector<rational>> constant_closed_multipliers(const TransferCocycle& cocycle) {
  std::vector<rational> out;
  const StepFunction one{rational(1)};
  for (std::size_t s = 0; s < cocycle.maps().size(); ++s) {
    StepFunction pushed = cocycle.exact_push(static_cast<int>(s), one);
    if (pushed.piece_count() != 1) return std::nullopt;
    out.push_back(pushed.values().front());
  }
  return out;
}

bool nu_is_lebesgue(const TransferCocycle& cocycle) {
  if (cocycle.weight().conformal_is_lebesgue()) return true;
  for (const auto& m : cocycle.maps()) {
    const rational s0 = m.branches().front().abs_slope();
    for (const auto& br : m.branches())
      if (br.abs_slope() != s0) return false;
  }
  return true;
}

StepFunction fiber_density_step(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                long fiber, long burn_in) {
  if (constant_closed_multipliers(cocycle)) return StepFunction(rational(1));
  InvariantDensityResult r = invariant_density(cocycle, orbit.shifted(fiber), burn_in);
  return r.density.to_step_function();
}

double fiber_mu_mass(const TransferCocycle& cocycle, const FiberOrbit& orbit, long fiber,
                     const IntervalSet& set, long burn_in) {
  StepFunction phi = fiber_density_step(cocycle, orbit, fiber, burn_in);
  if (nu_is_lebesgue(cocycle)) return to_double(phi.masked(set).integral());
  GridDensity f = GridDensity::from_step_function(cocycle.grid(), phi.masked(set));
  return conformal_sandwich(cocycle, orbit.shifted(fiber), f, burn_in).estimate();
}

}  // namespace openrds
