#pragma once

#include <optional>
#include <string>
#include <vector>

#include "openrds/transfer.hpp"

namespace openrds {

// Per-symbol holes: either fixed sets or a shrinking family parameterized by
// epsilon (balls around a center point; the family is nested by construction).
class HoleFamily {
 public:
  static HoleFamily fixed(std::vector<IntervalSet> per_symbol);
  // ball of radius epsilon * radius_factor around center, clipped to [0,1)
  static HoleFamily balls(std::vector<rational> centers, std::vector<rational> radius_factors);
  static HoleFamily balls(std::vector<rational> centers);
  static HoleFamily empty(int symbols);

  IntervalSet hole(int symbol, const rational& eps) const;
  int symbols() const { return symbols_; }
  bool parametric() const { return !fixed_.has_value(); }

  // monotone nesting along a decreasing epsilon schedule
  bool nested(int symbol, const std::vector<rational>& eps_desc) const;

 private:
  int symbols_ = 0;
  std::optional<std::vector<IntervalSet>> fixed_;
  std::vector<rational> centers_;
  std::vector<rational> radius_factors_;
};

// Concrete holes at one epsilon, bound to a closed cocycle.
class OpenCocycle {
 public:
  OpenCocycle(const TransferCocycle& closed, std::vector<IntervalSet> holes);
  OpenCocycle(const TransferCocycle& closed, const HoleFamily& family, const rational& eps);

  const TransferCocycle& closed() const { return *closed_; }
  const IntervalSet& hole(int symbol) const;
  const IntervalSet& surviving(int symbol) const;  // complement of the hole
  const TransferMatrix& matrix(int symbol) const;  // open matrix
  bool holes_aligned() const { return holes_aligned_; }

  // every symbol keeps a full branch disjoint from its hole
  bool full_branch_outside_holes() const;

  StepFunction exact_open_push(int symbol, const StepFunction& f) const;

 private:
  void build();
  const TransferCocycle* closed_;
  std::vector<IntervalSet> holes_;
  std::vector<IntervalSet> surviving_;
  std::vector<TransferMatrix> open_matrices_;
  bool holes_aligned_ = true;
};

// Standalone form of the matrix surgery: closed matrix with contributions
// from source material inside the hole removed (exact when hole endpoints
// are grid points, Ulam fraction otherwise).
TransferMatrix open_matrix(const TransferMatrix& closed, const IntervalSet& hole,
                           const Grid& grid);

struct SurvivorSet {
  long depth = 0;         // n: trajectories avoid holes at steps 0..n
  IntervalSet body;
  std::string eps_tag;
};

struct SurvivorBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySurvivorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact backward-sweep survivor set; throws EmptySurvivorError naming the
// fiber window if some depth empties out, SurvivorBudgetError if the piece
// count explodes past max_pieces.
SurvivorSet survivor_set(const OpenCocycle& open, const FiberOrbit& orbit, long depth,
                         std::size_t max_pieces = 200000);

rational survivor_lebesgue(const SurvivorSet& s);
double survivor_mu_mass(const SurvivorSet& s, const GridDensity& phi);

struct OpenSpectralData {
  std::vector<double> log_lambda_eps;  // fibers 0..n-1
  double birkhoff_mean = 0;
  GridDensity phi_eps;                 // open equivariant density at the origin
  double crosscheck_gap = 0;           // decay-vs-multiplier consistency
};

// Open multipliers by equilibrated forward sweep plus the survivor-decay
// cross-check; throws if the two estimators disagree wildly.
OpenSpectralData lambda_open(const OpenCocycle& open, const FiberOrbit& orbit, long burn_in,
                             long steps, double tol = 1e-6);

struct EscapeRateResult {
  double decay_rate = 0;     // from survivor-mass decay
  double pressure_rate = 0;  // closed minus open expected pressure
  double gap = 0;
  // checkpoint rows: N, log nu-survivor, log mu-survivor, mean log lambda_eps
  std::vector<std::array<double, 4>> table;
};

EscapeRateResult escape_rate(const OpenCocycle& open, const FiberOrbit& orbit, long steps,
                             long burn_in, const GridDensity* phi0 = nullptr);

// Exact per-symbol open multipliers when the opened L(1) is constant (holes
// made of whole full branches); the open equivariant density is flat then.
std::optional<std::vector<rational>> constant_open_multipliers(const OpenCocycle& open);

}  // namespace openrds
