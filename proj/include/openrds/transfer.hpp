#pragma once

#include <optional>
#include <vector>

#include "openrds/driving.hpp"
#include "openrds/grid.hpp"
#include "openrds/maps.hpp"

namespace openrds {

// Weight rule g(x) = |T'(x)|^{-exponent}, constant on each branch.
struct WeightSpec {
  rational exponent{1};
  // With exponent 1 the closed conformal measure is Lebesgue and every
  // closed multiplier equals 1 (the transfer operator preserves the
  // Lebesgue integral).
  bool conformal_is_lebesgue() const { return exponent == 1; }
};

// Sparse action of the (projected) transfer operator on cellwise-constant
// densities. Exact when the grid resolves all breakpoints and slopes are
// integers; otherwise it is the Ulam projection and `exact` is false.
class TransferMatrix {
 public:
  TransferMatrix(int cells, int symbol, bool open, bool exact);

  GridDensity apply(const GridDensity& f) const;
  int cells() const { return cells_; }
  int symbol() const { return symbol_; }
  bool is_open() const { return open_; }
  bool is_exact() const { return exact_; }

  std::vector<double> column_sums() const;
  std::size_t nonzeros() const { return col_.size(); }
  // (target cell, source cell, weight) triples for debugging dumps.
  std::vector<std::tuple<int, int, double>> entries() const;

  // Scales every entry of source column i by factor[i]; used to cut hole
  // cells out of a closed matrix.
  TransferMatrix column_scaled(const std::vector<double>& factor, bool still_exact) const;

  static TransferMatrix build(const PiecewiseLinearMap& map, const WeightSpec& weight,
                              const Grid& grid, int symbol);

 private:
  int cells_;
  int symbol_;
  bool open_;
  bool exact_;
  std::vector<std::size_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> w_;
};

// The closed side of a random system: one map and one matrix per symbol.
class TransferCocycle {
 public:
  TransferCocycle(std::vector<PiecewiseLinearMap> maps, WeightSpec weight, Grid grid);

  const std::vector<PiecewiseLinearMap>& maps() const { return maps_; }
  const PiecewiseLinearMap& map(int symbol) const;
  const TransferMatrix& matrix(int symbol) const;
  const WeightSpec& weight() const { return weight_; }
  const Grid& grid() const { return grid_; }
  bool aligned() const { return aligned_; }

  // Exact step-function push of one closed step at `symbol`.
  StepFunction exact_push(int symbol, const StepFunction& f) const;

 private:
  std::vector<PiecewiseLinearMap> maps_;
  WeightSpec weight_;
  Grid grid_;
  std::vector<TransferMatrix> matrices_;
  std::vector<std::vector<rational>> weights_;
  bool aligned_;
};

struct CocyclePush {
  GridDensity final_density;
  std::vector<double> log_mass;  // per-step scalar factor, log domain
  double total_log_mass() const;
};

// f, Lf, L^2 f, ... renormalized each step; throws on mass underflow naming
// the step.
CocyclePush push_cocycle(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                         const GridDensity& f, long steps, long start = 0);

struct Sandwich {
  std::vector<double> lower;  // per iterate n = 1..N
  std::vector<double> upper;
  double estimate() const { return 0.5 * (lower.back() + upper.back()); }
  double width() const { return upper.back() - lower.back(); }
};

// Nested bounds inf/sup of L^n f / L^n 1 whose common limit is the conformal
// integral of f at the orbit origin.
Sandwich conformal_sandwich(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                            const GridDensity& f, long n);

struct InvariantDensityResult {
  GridDensity density;  // unit Lebesgue mass
  double last_diff = 0;
  bool converged = false;
  long burn_in = 0;
};

// Backward limit of pushed indicator densities; the equivariant density at
// the orbit origin.
InvariantDensityResult invariant_density(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                         long burn_in, double tol = 1e-8);

struct MultiplierSequence {
  std::vector<double> log_lambda;  // fiber sigma^j(omega), j = 0..n-1
  double birkhoff_mean = 0;
};

// Per-step multiplier estimates from an equilibrated forward sweep. With
// exponent 1 the Lebesgue normalization is the conformal normalization and
// the per-fiber values are exact; otherwise individual entries carry a
// normalization wobble that telescopes away in the Birkhoff mean.
MultiplierSequence lambda_closed(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                 long steps, long burn_in);

// Conformal integral of f at the orbit origin via the sandwich, with the
// Lebesgue shortcut when the weight exponent is 1.
double conformal_mass(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                      const GridDensity& f, long n);

// When L(1) is constant for every symbol the invariant density is flat and
// the per-fiber closed multipliers are those constants, exactly.
std::optional<std::vector<rational>> constant_closed_multipliers(const TransferCocycle& cocycle);

// True when the conformal measure is Lebesgue: exponent 1, or every map has
// a single expansion rate (then Lebesgue is conformal for every exponent).
bool nu_is_lebesgue(const TransferCocycle& cocycle);

// Equivariant density at a given fiber of the orbit as an exact step
// function: flat when L(1) is constant per symbol, grid estimate otherwise.
StepFunction fiber_density_step(const TransferCocycle& cocycle, const FiberOrbit& orbit,
                                long fiber, long burn_in = 50);

// mu_0-mass of a set at a fiber (integral of the equivariant density against
// the conformal measure over the set).
double fiber_mu_mass(const TransferCocycle& cocycle, const FiberOrbit& orbit, long fiber,
                     const IntervalSet& set, long burn_in = 50);

}  // namespace openrds
