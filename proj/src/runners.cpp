#include "openrds/runners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "openrds/perturb.hpp"
#include "openrds/pressure.hpp"
#include "openrds/raccim.hpp"
#include "openrds/rng.hpp"

namespace openrds {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const ExperimentConfig& cfg, const std::string& name, const std::string& header) {
    std::filesystem::create_directories(cfg.out_dir);
    path_ = cfg.out_dir + "/" + name;
    out_.open(path_);
    out_ << "# openrds " << kVersion << " config=" << cfg.hash << "\n" << header << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
  }
  void raw_row(const std::string& line) { out_ << line << "\n"; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_summary(const ExperimentConfig& cfg, const std::string& name, json body) {
  std::filesystem::create_directories(cfg.out_dir);
  body["version"] = kVersion;
  body["config_hash"] = cfg.hash;
  body["config"] = cfg.raw;
  std::ofstream out(cfg.out_dir + "/" + name);
  out << body.dump(2) << "\n";
}

struct Workspace {
  FiberOrbit orbit;
  Grid grid;
  TransferCocycle cocycle;
};

Workspace build_workspace(const ExperimentConfig& cfg,
                          const std::vector<IntervalSet>& extra_holes = {}, long forward_min = 0) {
  long backward = std::max({cfg.orbit_backward, cfg.burn_density + 16, cfg.burn_spectral + 4,
                            static_cast<long>(cfg.k_max) + 3});
  long forward = std::max({cfg.orbit_forward, cfg.steps, forward_min}) + 4;
  std::vector<IntervalSet> align = cfg.holes_at(cfg.eps_schedule().back());
  std::vector<IntervalSet> at0 = cfg.holes_at(cfg.eps0);
  align.insert(align.end(), at0.begin(), at0.end());
  align.insert(align.end(), extra_holes.begin(), extra_holes.end());
  auto [cells, aligned] = choose_grid_cells(cfg.maps, align, cfg.grid_hint);
  (void)aligned;
  return Workspace{cfg.driving.orbit(backward, forward), Grid(cells),
                   TransferCocycle(cfg.maps, cfg.weight, Grid(cells))};
}

// ---- subcommands ----------------------------------------------------------

int run_closed_spectrum(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  const long n = std::min<long>(cfg.steps, 2000);
  MultiplierSequence seq = lambda_closed(ws.cocycle, ws.orbit, n, cfg.burn_spectral);
  GridDensity f = GridDensity::indicator(ws.grid, IntervalSet(make_interval(0.0, 0.5)));
  Sandwich sw = conformal_sandwich(ws.cocycle, ws.orbit, f, std::min<long>(n, cfg.burn_spectral));
  InvariantDensityResult phi = invariant_density(ws.cocycle, ws.orbit, cfg.burn_density);

  CsvFile csv(cfg, "closed_spectrum.csv", "step,symbol,log_lambda,sandwich_lo,sandwich_hi");
  for (long j = 0; j < n; ++j) {
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(j), sw.lower.size() - 1);
    csv.row({static_cast<double>(j), static_cast<double>(ws.orbit.symbol(j)),
             seq.log_lambda[static_cast<std::size_t>(j)], sw.lower[k], sw.upper[k]});
  }
  CsvFile dens(cfg, "invariant_density.csv", "cell,lo,hi,value");
  for (int i = 0; i < ws.grid.cells(); ++i)
    dens.row({static_cast<double>(i), static_cast<double>(i) / ws.grid.cells(),
              static_cast<double>(i + 1) / ws.grid.cells(), phi.density[i]});

  write_summary(cfg, "closed_spectrum.json",
                {{"expected_pressure_closed", seq.birkhoff_mean},
                 {"sandwich_estimate", sw.estimate()},
                 {"sandwich_width", sw.width()},
                 {"density_converged", phi.converged},
                 {"density_last_diff", phi.last_diff},
                 {"grid_cells", ws.grid.cells()},
                 {"grid_exact", ws.cocycle.aligned()}});
  log << "closed-spectrum: EP=" << seq.birkhoff_mean << " sandwich width " << sw.width() << "\n";
  if (!phi.converged) return 3;
  return 0;
}

int run_escape_rate(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  OpenCocycle open(ws.cocycle, cfg.holes_at(cfg.eps0));
  GridDensity phi0 = constant_closed_multipliers(ws.cocycle)
                         ? GridDensity(ws.grid, 1.0)
                         : invariant_density(ws.cocycle, ws.orbit, cfg.burn_density).density;
  EscapeRateResult r = escape_rate(open, ws.orbit, cfg.steps, cfg.burn_spectral, &phi0);

  CsvFile csv(cfg, "escape_rate.csv",
              "N,leb_survivor,mu_survivor,log_leb_survivor,log_mu_survivor,"
              "log_lambda_eps_mean,escape_decay,escape_pressure");
  for (const auto& row : r.table)
    csv.row({row[0], std::exp(row[1]), std::exp(row[2]), row[1], row[2], row[3], r.decay_rate,
             r.pressure_rate});
  write_summary(cfg, "escape_rate.json",
                {{"escape_decay", r.decay_rate},
                 {"escape_pressure", r.pressure_rate},
                 {"gap", r.gap},
                 {"steps", cfg.steps}});
  log << "escape-rate: decay=" << r.decay_rate << " pressure=" << r.pressure_rate << " gap "
      << r.gap << "\n";
  return 0;
}

int run_extremal_index(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  const auto schedule = cfg.eps_schedule();

  CsvFile qcsv(cfg, "return_ratios.csv", "omega_index,eps,k,qhat");
  CsvFile tcsv(cfg, "extremal_index.csv", "omega_index,eps,theta_raw,theta_clamped,tail");
  const long report_origins = std::min<long>(8, ws.orbit.forward() - cfg.k_max - 2);
  json per_origin = json::array();
  for (long origin = 0; origin < report_origins; ++origin) {
    ExtremalIndexEstimate est =
        extremal_index(ws.cocycle, ws.orbit, cfg.holes, schedule, cfg.k_max, origin);
    for (std::size_t i = 0; i < est.eps.size(); ++i)
      tcsv.row({static_cast<double>(origin), est.eps[i], est.theta_raw[i], est.theta_clamped[i],
                est.tail[i]});
    ReturnRatioSeries series =
        return_ratios(ws.cocycle, ws.orbit, cfg.holes, schedule.back(), origin, cfg.k_max);
    for (int k = 0; k <= cfg.k_max; ++k)
      qcsv.row({static_cast<double>(origin), series.eps, static_cast<double>(k),
                series.values[static_cast<std::size_t>(k)]});
    per_origin.push_back({{"origin", origin},
                          {"prev_symbol", ws.orbit.symbol(origin - 1)},
                          {"theta", est.theta()},
                          {"converged", est.converged},
                          {"extrapolated", est.extrapolated}});
  }

  // orbit average at the deepest pair of the schedule
  const rational eps_fine = schedule.back();
  const long n_avg = std::min<long>(cfg.steps, ws.orbit.forward() - 2);
  OrbitThetaAverage avg =
      extremal_index_orbit_average(ws.cocycle, ws.orbit, cfg.holes, eps_fine, cfg.k_max, n_avg);
  write_summary(cfg, "extremal_index.json",
                {{"per_origin", per_origin},
                 {"orbit_average", avg.mean},
                 {"orbit_average_origins", n_avg},
                 {"eps_final", to_double(eps_fine)},
                 {"k_max", cfg.k_max}});
  log << "extremal-index: orbit average " << avg.mean << " over " << n_avg << " origins\n";
  return 0;
}

int run_gumbel(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.observations.empty())
    throw std::invalid_argument("gumbel: config needs an observation block");
  // provisional cocycle only steers the threshold solver on non-flat systems
  TransferCocycle provisional(cfg.maps, cfg.weight, Grid(std::max(cfg.grid_hint / 8, 64)));
  long max_n = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  long backward = std::max(cfg.orbit_backward, cfg.burn_spectral + 4);
  FiberOrbit orbit0 = cfg.driving.orbit(backward, max_n + cfg.burn_spectral + 4);
  ThresholdSchedule sched = solve_thresholds(provisional, orbit0, cfg.observations, cfg.t,
                                             cfg.n_list, false);
  std::vector<IntervalSet> align;
  for (const auto& e : sched.entries)
    align.insert(align.end(), e.holes.begin(), e.holes.end());
  auto [cells, aligned] = choose_grid_cells(cfg.maps, align, cfg.grid_hint);
  (void)aligned;
  TransferCocycle cocycle(cfg.maps, cfg.weight, Grid(cells));
  std::vector<EvtCurveRow> curve = survivor_probability_curve(cocycle, orbit0, sched,
                                                              cfg.burn_spectral);

  // extremal index at the finest solved hole scale
  HoleFamily fine = HoleFamily::fixed(sched.entries.back().holes);
  const long n_avg = std::min<long>(4000, orbit0.forward() - cfg.k_max - 4);
  OrbitThetaAverage avg =
      extremal_index_orbit_average(cocycle, orbit0, fine, rational(1), cfg.k_max, n_avg);
  double prediction = gumbel_prediction(avg.per_origin, cfg.t, orbit0);

  CsvFile csv(cfg, "gumbel_curve.csv", "N,nu_survivor,mu_survivor,lambda_ratio,gumbel_prediction");
  for (const auto& row : curve)
    csv.row({static_cast<double>(row.N), row.nu_survivor, row.mu_survivor, row.lambda_ratio,
             prediction});
  json xi = json::array();
  for (const auto& e : sched.entries) xi.push_back(e.xi);
  write_summary(cfg, "gumbel.json",
                {{"prediction", prediction},
                 {"theta_average", avg.mean},
                 {"final_nu", curve.back().nu_survivor},
                 {"final_mu", curve.back().mu_survivor},
                 {"final_lambda_ratio", curve.back().lambda_ratio},
                 {"xi", xi},
                 {"grid_cells", cells}});
  log << "gumbel: curve end " << curve.back().nu_survivor << " prediction " << prediction << "\n";
  return 0;
}

int run_hitting_times(const ExperimentConfig& cfg, std::ostream& log, int threads) {
  if (cfg.observations.empty())
    throw std::invalid_argument("hitting-times: config needs an observation block");
  TransferCocycle provisional(cfg.maps, cfg.weight, Grid(std::max(cfg.grid_hint / 8, 64)));
  long backward = std::max(cfg.orbit_backward, cfg.burn_spectral + 4);
  FiberOrbit orbit = cfg.driving.orbit(backward, std::max<long>(cfg.mc_n, 4096));
  ThresholdSchedule sched =
      solve_thresholds(provisional, orbit, cfg.observations, cfg.t, {cfg.mc_n}, false);
  const auto& holes = sched.entries.front().holes;
  double mass = fiber_mu_mass(provisional, orbit, 0, holes[static_cast<std::size_t>(orbit.symbol(0))]);

  HoleFamily family = HoleFamily::fixed(holes);
  const long n_avg = std::min<long>(4000, orbit.forward() - cfg.k_max - 4);
  OrbitThetaAverage avg =
      extremal_index_orbit_average(provisional, orbit, family, rational(1), cfg.k_max, n_avg);
  double rate = 0;
  for (long j = 0; j < n_avg; ++j)
    rate += cfg.t[static_cast<std::size_t>(orbit.symbol(j))] *
            avg.per_origin[static_cast<std::size_t>(j)];
  rate /= static_cast<double>(n_avg) * cfg.t[0];

  std::vector<double> phi_cells =
      constant_closed_multipliers(provisional)
          ? std::vector<double>(64, 1.0)
          : invariant_density(provisional, orbit, cfg.burn_density).density.values();
  HittingTimeResult mc = hitting_time_mc(cfg.maps, cfg.driving, holes, phi_cells, mass,
                                         cfg.mc_samples, cfg.seed, rate, threads);

  CsvFile csv(cfg, "hitting_times.csv", "sample,tau,scaled_tau");
  for (std::size_t i = 0; i < mc.scaled_tau.size(); ++i)
    csv.row({static_cast<double>(i), mc.scaled_tau[i] / mass, mc.scaled_tau[i]});
  write_summary(cfg, "hitting_times.json",
                {{"ks_statistic", mc.ks_statistic},
                 {"rate", mc.rate},
                 {"hole_mass", mass},
                 {"samples", cfg.mc_samples},
                 {"buffer_extensions", mc.buffer_extensions},
                 {"exact_in_law", mc.exact_in_law}});
  log << "hitting-times: KS=" << mc.ks_statistic << " against Exp(" << rate << ")\n";
  return 0;
}

int run_bowen(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  std::vector<IntervalSet> holes = cfg.holes_at(cfg.eps0);
  PressureOptions opt;
  opt.steps = std::min<long>(cfg.steps, 2000);
  opt.burn_in = cfg.burn_spectral;
  opt.grid_hint = cfg.grid_hint;
  PressureCurve curve = pressure_curve(cfg.maps, cfg.driving, ws.orbit, holes,
                                       {0.0, 0.25, 0.5, 0.75, 1.0}, opt);
  BowenResult r = bowen_dimension(cfg.maps, cfg.driving, ws.orbit, holes, 1e-9, 60, opt);

  CsvFile csv(cfg, "pressure_curve.csv", "t,EP_closed,EP_open");
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    csv.row({curve.t[i], curve.ep_closed[i], curve.ep_open[i]});
  write_summary(cfg, "bowen.json",
                {{"h", r.h},
                 {"bracket", {r.bracket_lo, r.bracket_hi}},
                 {"iterations", r.iterations},
                 {"ep_at_h", r.ep_at_h},
                 {"bounded_distortion", r.bounded_distortion},
                 {"large_images", r.large_images},
                 {"large_images_wrt_hole", r.large_images_wrt_hole}});
  log << "bowen: h=" << r.h << " after " << r.iterations << " bisections\n";
  return 0;
}

int run_raccim(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  OpenCocycle open(ws.cocycle, cfg.holes_at(cfg.eps0));
  ConditionallyInvariantDensity eta = raccim_density(open, ws.orbit, cfg.burn_spectral);
  double ci_residual = conditional_invariance_residual(
      open, ws.orbit, IntervalSet(make_interval(0.0, 0.25)), 2, cfg.burn_spectral);
  SurvivorMassIdentity identity = survivor_mass_identity(open, ws.orbit, 6, cfg.burn_spectral);

  CsvFile csv(cfg, "raccim_density.csv", "cell,lo,hi,value");
  for (int i = 0; i < ws.grid.cells(); ++i)
    csv.row({static_cast<double>(i), static_cast<double>(i) / ws.grid.cells(),
             static_cast<double>(i + 1) / ws.grid.cells(), eta.density[i]});
  write_summary(cfg, "raccim.json",
                {{"alpha", eta.alpha},
                 {"normalization", eta.normalization},
                 {"conditional_invariance_residual", ci_residual},
                 {"survivor_mass_eta", identity.eta_mass},
                 {"survivor_mass_ratio", identity.multiplier_ratio},
                 {"survivor_mass_gap", identity.gap()}});
  log << "raccim: alpha=" << eta.alpha << " invariance residual " << ci_residual << "\n";
  return 0;
}

int run_decay(const ExperimentConfig& cfg, std::ostream& log) {
  Workspace ws = build_workspace(cfg);
  // mean-zero indicator observables over [0,1/3)
  IntervalSet support(Interval(rational(0), make_rational(1, 3)));
  GridDensity ind = GridDensity::indicator(ws.grid, support);
  double mean = ind.lebesgue_mass();
  GridDensity f = ind;
  for (auto& v : f.values()) v -= mean;
  DecayReport rep = decay_rate_estimate(ws.cocycle, ws.orbit, f, f, 24, 3, 20,
                                        cfg.burn_density);

  CsvFile csv(cfg, "decay.csv", "lag,gap");
  for (std::size_t i = 0; i < rep.gaps.size(); ++i)
    csv.row({static_cast<double>(i + 1), rep.gaps[i]});
  write_summary(cfg, "decay.json",
                {{"kappa", rep.kappa},
                 {"r_squared", rep.r_squared},
                 {"resolvable", rep.resolvable},
                 {"fit_window", {rep.fit_lo, rep.fit_hi}}});
  log << "decay: kappa=" << rep.kappa << " R2=" << rep.r_squared << "\n";
  return 0;
}

}  // namespace

namespace {

// ---- always-on property suite ----------------------------------------------

struct SelftestRig {
  std::vector<PiecewiseLinearMap> maps;
  DrivingSystem driving = DrivingSystem::constant(0);
  WeightSpec weight;
  std::vector<IntervalSet> holes;
};

SelftestRig rig_doubling_escape() {
  SelftestRig r;
  r.maps = {PiecewiseLinearMap::linear_full(2)};
  r.holes = {IntervalSet(Interval(make_rational(1, 2), rational(1)))};
  return r;
}

SelftestRig rig_beta3_escape() {
  SelftestRig r;
  r.maps = {PiecewiseLinearMap::beta(rational(3))};
  r.holes = {IntervalSet(Interval(make_rational(2, 3), rational(1)))};
  return r;
}

SelftestRig rig_iid_beta35() {
  SelftestRig r;
  r.maps = {PiecewiseLinearMap::beta(rational(3)), PiecewiseLinearMap::beta(rational(5))};
  r.driving = DrivingSystem::iid({0.5, 0.5}, 20240801);
  r.holes = {IntervalSet(Interval(make_rational(2, 3), rational(1))),
             IntervalSet(Interval(make_rational(4, 5), rational(1)))};
  return r;
}

void check(std::vector<SelftestItem>& items, const std::string& name, bool passed,
           const std::string& detail) {
  items.push_back({name, passed, detail});
}

}  // namespace

std::vector<SelftestItem> run_selftest(std::ostream& log) {
  std::vector<SelftestItem> items;

  // (1) first-return ratios sum to 1 (Poincare recurrence of the holes)
  for (auto rig : {rig_doubling_escape(), rig_beta3_escape()}) {
    TransferCocycle cc(rig.maps, rig.weight, Grid(64));
    FiberOrbit orbit = rig.driving.orbit(48, 48);
    ReturnRatioSeries series = return_ratios(cc, orbit, HoleFamily::fixed(rig.holes),
                                             make_rational(1, 1024), 0, 40);
    double sum = series.partial_sum();
    check(items, "return-ratio sum K=40 (" + rig.maps[0].label() + ")", sum > 1.0 - 1e-3,
          "sum=" + fmt(sum));
  }

  // (2) open multipliers never exceed closed ones
  {
    SelftestRig rig = rig_iid_beta35();
    auto [cells, ok] = choose_grid_cells(rig.maps, rig.holes, 240);
    (void)ok;
    TransferCocycle cc(rig.maps, rig.weight, Grid(cells));
    OpenCocycle open(cc, rig.holes);
    FiberOrbit orbit = rig.driving.orbit(80, 260);
    MultiplierSequence closed = lambda_closed(cc, orbit, 200, 60);
    OpenSpectralData opened = lambda_open(open, orbit, 60, 200);
    bool mono = true;
    double worst = 0;
    for (std::size_t j = 0; j < closed.log_lambda.size(); ++j) {
      double gap = opened.log_lambda_eps[j] - closed.log_lambda[j];
      worst = std::max(worst, gap);
      if (gap > 1e-12) mono = false;
    }
    check(items, "lambda_0 >= lambda_eps on every fiber", mono, "max excess=" + fmt(worst));
  }

  // (3) survivor nesting, in depth and in eps
  {
    SelftestRig rig = rig_doubling_escape();
    TransferCocycle cc(rig.maps, rig.weight, Grid(64));
    OpenCocycle open(cc, rig.holes);
    FiberOrbit orbit = rig.driving.orbit(4, 24);
    bool nested = true;
    SurvivorSet prev = survivor_set(open, orbit, 0);
    for (long n = 1; n <= 10; ++n) {
      SurvivorSet cur = survivor_set(open, orbit, n);
      nested = nested && prev.body.contains_set(cur.body);
      prev = cur;
    }
    HoleFamily balls = HoleFamily::balls({rational(0)});
    OpenCocycle big(cc, balls, make_rational(1, 8));
    OpenCocycle small(cc, balls, make_rational(1, 16));
    SurvivorSet xb = survivor_set(big, orbit, 6);
    SurvivorSet xs = survivor_set(small, orbit, 6);
    nested = nested && xs.body.contains_set(xb.body);
    check(items, "survivor nesting exact (depth and eps)", nested, "");
  }

  // (4) conformality residual against the sandwich functional
  {
    std::vector<PiecewiseLinearMap> maps = {PiecewiseLinearMap::three_branch(rational(2))};
    TransferCocycle cc(maps, WeightSpec{rational(0)}, Grid(256));
    FiberOrbit orbit = DrivingSystem::constant(0).orbit(2, 80);
    Rng rng(7);
    bool all_ok = true;
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> vals(256);
      for (auto& v : vals) v = rng.next_double();
      GridDensity f(Grid(256), vals);
      Sandwich sf = conformal_sandwich(cc, orbit, f, 60);
      GridDensity lf = cc.matrix(0).apply(f);
      Sandwich slf = conformal_sandwich(cc, orbit, lf, 60);
      // closed multiplier of the three full branches at exponent 0 is 3
      double residual = std::abs(slf.estimate() - 3.0 * sf.estimate());
      double budget = 10.0 * (sf.width() * 3.0 + slf.width()) + 1e-12;
      worst = std::max(worst, residual - budget);
      if (residual > budget) all_ok = false;
    }
    check(items, "conformality residual within sandwich width (20-function panel)", all_ok,
          "worst overshoot=" + fmt(worst));
  }

  // (5) cross-engine exactness: matrix vs exact step-function pushes
  {
    bool all_ok = true;
    double worst = 0;
    struct Case {
      PiecewiseLinearMap map;
      rational exponent;
      IntervalSet set;
    };
    std::vector<Case> cases = {
        {PiecewiseLinearMap::linear_full(2), rational(1),
         IntervalSet(Interval(rational(0), make_rational(1, 2)))},
        {PiecewiseLinearMap::beta(rational(3)), rational(1),
         IntervalSet(Interval(make_rational(1, 3), make_rational(2, 3)))},
        {PiecewiseLinearMap::beta(rational(3)), rational(0),
         IntervalSet(Interval(rational(0), make_rational(1, 3)))}};
    for (auto& c : cases) {
      TransferCocycle cc({c.map}, WeightSpec{c.exponent}, Grid(48));
      GridDensity g = GridDensity::indicator(Grid(48), c.set);
      StepFunction s = StepFunction::indicator(c.set);
      for (int n = 0; n < 6; ++n) {
        g = cc.matrix(0).apply(g);
        s = cc.exact_push(0, s);
        double diff = std::abs(g.lebesgue_mass() - to_double(s.integral()));
        worst = std::max(worst, diff);
        if (diff > 1e-12) all_ok = false;
      }
    }
    check(items, "cross-engine exactness on aligned grids", all_ok, "worst=" + fmt(worst));
  }

  // (6) conditional invariance of the RACCIM, exactly
  {
    SelftestRig rig = rig_doubling_escape();
    TransferCocycle cc(rig.maps, rig.weight, Grid(64));
    OpenCocycle open(cc, rig.holes);
    FiberOrbit orbit = rig.driving.orbit(64, 64);
    double worst = 0;
    for (long n = 1; n <= 4; ++n)
      worst = std::max(worst, conditional_invariance_residual(
                                  open, orbit, IntervalSet(make_interval(0.0, 0.25)), n));
    check(items, "conditional invariance residual (doubling preset)", worst < 1e-12,
          "worst=" + fmt(worst));
  }

  // (7) eta(X_n) equals the multiplier ratio product
  {
    bool all_ok = true;
    double worst = 0;
    for (auto rig : {rig_doubling_escape(), rig_beta3_escape()}) {
      TransferCocycle cc(rig.maps, rig.weight, Grid(64));
      OpenCocycle open(cc, rig.holes);
      FiberOrbit orbit = rig.driving.orbit(64, 64);
      SurvivorMassIdentity id = survivor_mass_identity(open, orbit, 8);
      worst = std::max(worst, id.gap());
      if (id.gap() > 1e-10) all_ok = false;
    }
    check(items, "survivor mass identity eta(X_n) = prod lambda_eps/lambda_0", all_ok,
          "worst=" + fmt(worst));
  }

  // (8) expected pressure strictly decreasing on every sampled curve
  {
    bool all_ok = true;
    std::vector<SelftestRig> rigs = {rig_doubling_escape(), rig_beta3_escape(), rig_iid_beta35()};
    for (auto& rig : rigs) {
      FiberOrbit orbit = rig.driving.orbit(80, 2100);
      PressureCurve curve = pressure_curve(rig.maps, rig.driving, orbit, rig.holes,
                                           {0.0, 0.25, 0.5, 0.75, 1.0});
      for (std::size_t i = 1; i < curve.t.size(); ++i) {
        if (!(curve.ep_open[i] < curve.ep_open[i - 1] - 1e-8)) all_ok = false;
        if (!(curve.ep_closed[i] < curve.ep_closed[i - 1] - 1e-8)) all_ok = false;
        if (!(curve.ep_open[i] <= curve.ep_closed[i] + 1e-12)) all_ok = false;
      }
    }
    check(items, "expected pressure strictly decreasing, open <= closed", all_ok, "");
  }

  for (const auto& item : items)
    log << (item.passed ? "[PASS] " : "[FAIL] ") << item.name
        << (item.detail.empty() ? "" : " (" + item.detail + ")") << "\n";
  return items;
}

std::vector<std::string> subcommand_names() {
  return {"closed-spectrum", "escape-rate", "extremal-index", "gumbel", "hitting-times",
          "bowen",           "raccim",      "decay",          "selftest"};
}

int run_subcommand(const std::string& name, const ExperimentConfig& cfg, int threads,
                   std::ostream& log) {
  ValidationReport report = validate(cfg);
  log << report.summary();
  if (!report.ok()) return 2;
  try {
    if (name == "closed-spectrum") return run_closed_spectrum(cfg, log);
    if (name == "escape-rate") return run_escape_rate(cfg, log);
    if (name == "extremal-index") return run_extremal_index(cfg, log);
    if (name == "gumbel") return run_gumbel(cfg, log);
    if (name == "hitting-times") return run_hitting_times(cfg, log, threads);
    if (name == "bowen") return run_bowen(cfg, log);
    if (name == "raccim") return run_raccim(cfg, log);
    if (name == "decay") return run_decay(cfg, log);
    if (name == "selftest") {
      auto items = run_selftest(log);
      bool ok = true;
      for (const auto& item : items) ok = ok && item.passed;
      return ok ? 0 : 3;
    }
  } catch (const std::invalid_argument& e) {
    log << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "numerical error: " << e.what() << "\n";
    return 3;
  }
  log << "unknown subcommand " << name << "\n";
  return 2;
}

}  // namespace openrds
