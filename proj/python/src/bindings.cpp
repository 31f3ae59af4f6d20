#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "openrds/evt.hpp"
#include "openrds/perturb.hpp"
#include "openrds/pressure.hpp"
#include "openrds/raccim.hpp"
#include "openrds/runners.hpp"

namespace py = pybind11;
using namespace openrds;

namespace {

IntervalSet set_from_pairs(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Interval> parts;
  for (auto& [lo, hi] : pairs)
    parts.emplace_back(rational_from_double(lo), rational_from_double(hi));
  return IntervalSet(std::move(parts));
}

std::vector<IntervalSet> sets_from_nested(
    const std::vector<std::vector<std::pair<double, double>>>& nested, std::size_t symbols) {
  std::vector<IntervalSet> out;
  for (auto& pairs : nested) out.push_back(set_from_pairs(pairs));
  if (out.size() == 1 && symbols > 1) out.resize(symbols, out.front());
  if (out.size() != symbols)
    throw std::invalid_argument("need one hole list per symbol (or a single shared one)");
  return out;
}

// Convenience bundle mirroring the CLI workflow: maps + driving + weight,
// with lazily built cocycles per grid request.
struct System {
  std::vector<PiecewiseLinearMap> maps;
  DrivingSystem driving = DrivingSystem::constant(0);
  rational exponent{1};

  TransferCocycle cocycle(const std::vector<IntervalSet>& holes, int hint) const {
    auto [cells, aligned] = choose_grid_cells(maps, holes, hint);
    (void)aligned;
    return TransferCocycle(maps, WeightSpec{exponent}, Grid(cells));
  }

  py::dict escape_rate_py(const std::vector<std::vector<std::pair<double, double>>>& holes_in,
                          long steps, int grid_hint) const {
    std::vector<IntervalSet> holes = sets_from_nested(holes_in, maps.size());
    TransferCocycle cc = cocycle(holes, grid_hint);
    OpenCocycle open(cc, holes);
    FiberOrbit orbit = driving.orbit(80, steps + 80);
    EscapeRateResult r = escape_rate(open, orbit, steps, 60);
    py::dict d;
    d["decay"] = r.decay_rate;
    d["pressure"] = r.pressure_rate;
    d["gap"] = r.gap;
    return d;
  }

  py::dict extremal_index_py(const std::vector<double>& centers, double eps0, int levels,
                             int k_max, long average_over) const {
    std::vector<rational> c;
    for (double x : centers) c.push_back(rational_from_double(x));
    if (c.size() == 1 && maps.size() > 1) c.resize(maps.size(), c.front());
    HoleFamily holes = HoleFamily::balls(std::move(c));
    TransferCocycle cc(maps, WeightSpec{exponent}, Grid(16));
    FiberOrbit orbit = driving.orbit(k_max + 4, std::max<long>(average_over + 2, 16));
    auto schedule = geometric_schedule(rational_from_double(eps0), levels);
    ExtremalIndexEstimate est = extremal_index(cc, orbit, holes, schedule, k_max, 0);
    py::dict d;
    d["theta"] = est.theta();
    d["converged"] = est.converged;
    d["eps"] = est.eps;
    d["theta_by_eps"] = est.theta_raw;
    if (average_over > 0) {
      OrbitThetaAverage avg = extremal_index_orbit_average(
          cc, orbit, holes, schedule[est.converged ? est.converged_index : levels - 1], k_max,
          average_over);
      d["orbit_average"] = avg.mean;
    }
    return d;
  }

  double bowen_py(const std::vector<std::vector<std::pair<double, double>>>& holes_in) const {
    std::vector<IntervalSet> holes = sets_from_nested(holes_in, maps.size());
    FiberOrbit orbit = driving.orbit(80, 2100);
    return bowen_dimension(maps, driving, orbit, holes).h;
  }

  std::vector<py::dict> gumbel_curve_py(const std::vector<double>& centers,
                                        const std::vector<double>& t,
                                        const std::vector<long>& n_list, int grid_hint) const {
    std::vector<ObservationFunction> obs;
    for (double x : centers) {
      ObservationFunction f;
      f.center = rational_from_double(x);
      obs.push_back(f);
    }
    if (obs.size() == 1 && maps.size() > 1) obs.resize(maps.size(), obs.front());
    std::vector<double> scaling = t;
    if (scaling.size() == 1 && maps.size() > 1) scaling.resize(maps.size(), scaling.front());
    long maxN = *std::max_element(n_list.begin(), n_list.end());
    FiberOrbit orbit = driving.orbit(80, maxN + 80);
    TransferCocycle probe(maps, WeightSpec{exponent}, Grid(64));
    ThresholdSchedule sched = solve_thresholds(probe, orbit, obs, scaling, n_list);
    std::vector<IntervalSet> align;
    for (auto& e : sched.entries) align.insert(align.end(), e.holes.begin(), e.holes.end());
    TransferCocycle cc = cocycle(align, grid_hint);
    auto rows = survivor_probability_curve(cc, orbit, sched);
    std::vector<py::dict> out;
    for (auto& r : rows) {
      py::dict d;
      d["N"] = r.N;
      d["nu"] = r.nu_survivor;
      d["mu"] = r.mu_survivor;
      d["lambda_ratio"] = r.lambda_ratio;
      out.push_back(d);
    }
    return out;
  }

  py::dict hitting_times_py(double center, long N, long samples, std::uint64_t seed,
                            double rate, int threads) const {
    ObservationFunction obs;
    obs.center = rational_from_double(center);
    TransferCocycle probe(maps, WeightSpec{exponent}, Grid(64));
    FiberOrbit orbit = driving.orbit(24, 4096);
    ThresholdSchedule sched = solve_thresholds(
        probe, orbit, std::vector<ObservationFunction>(maps.size(), obs),
        std::vector<double>(maps.size(), 1.0), {N});
    const auto& holes = sched.entries.front().holes;
    double mass = fiber_mu_mass(probe, orbit, 0,
                                holes[static_cast<std::size_t>(orbit.symbol(0))]);
    std::vector<double> phi =
        constant_closed_multipliers(probe)
            ? std::vector<double>(64, 1.0)
            : invariant_density(probe, orbit, 50).density.values();
    HittingTimeResult r =
        hitting_time_mc(maps, driving, holes, phi, mass, samples, seed, rate, threads);
    py::dict d;
    d["ks"] = r.ks_statistic;
    d["rate"] = r.rate;
    d["hole_mass"] = mass;
    d["scaled_tau_head"] =
        std::vector<double>(r.scaled_tau.begin(),
                            r.scaled_tau.begin() + std::min<std::size_t>(16, r.scaled_tau.size()));
    d["exact_in_law"] = r.exact_in_law;
    return d;
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quenched transfer-operator laboratory for random open interval maps";
  m.attr("__version__") = kVersion;

  py::class_<PiecewiseLinearMap>(m, "Map")
      .def_static("linear_full", &PiecewiseLinearMap::linear_full, py::arg("k"))
      .def_static("beta",
                  [](double b) { return PiecewiseLinearMap::beta(rational_from_double(b)); })
      .def_static("three_branch",
                  [](double s) {
                    return PiecewiseLinearMap::three_branch(rational_from_double(s));
                  })
      .def_static("beta_shift",
                  [](double b, double r) {
                    return PiecewiseLinearMap::beta_shift(rational_from_double(b),
                                                          rational_from_double(r));
                  })
      .def("__call__", &PiecewiseLinearMap::evaluate)
      .def("derivative_magnitude", &PiecewiseLinearMap::derivative_magnitude)
      .def("preimages",
           [](const PiecewiseLinearMap& self, double y) {
             std::vector<double> out;
             for (auto& [x, b] : self.preimage_points(rational_from_double(y)))
               out.push_back(to_double(x));
             return out;
           })
      .def("pullback",
           [](const PiecewiseLinearMap& self,
              const std::vector<std::pair<double, double>>& s) {
             std::vector<std::pair<double, double>> out;
             for (auto& iv : self.pullback(set_from_pairs(s)).parts())
               out.emplace_back(to_double(iv.lo), to_double(iv.hi));
             return out;
           })
      .def_property_readonly("label", &PiecewiseLinearMap::label);

  py::class_<DrivingSystem>(m, "Driving")
      .def_static("iid", &DrivingSystem::iid, py::arg("p"), py::arg("seed"))
      .def_static("constant", &DrivingSystem::constant, py::arg("symbol"))
      .def_static("periodic", &DrivingSystem::periodic, py::arg("word"))
      .def("symbols",
           [](const DrivingSystem& self, long backward, long forward) {
             FiberOrbit o = self.orbit(backward, forward);
             std::vector<int> out;
             for (long n = -backward; n <= forward; ++n) out.push_back(o.symbol(n));
             return out;
           })
      .def("marginals", &DrivingSystem::marginals)
      .def("describe", &DrivingSystem::describe);

  py::class_<System>(m, "System")
      .def(py::init([](std::vector<PiecewiseLinearMap> maps, DrivingSystem driving,
                       double weight_exponent) {
             System s;
             s.maps = std::move(maps);
             s.driving = std::move(driving);
             s.exponent = rational_from_double(weight_exponent);
             if (static_cast<int>(s.maps.size()) < s.driving.symbol_count())
               throw std::invalid_argument("need one map per driving symbol");
             return s;
           }),
           py::arg("maps"), py::arg("driving"), py::arg("weight_exponent") = 1.0)
      .def("escape_rate", &System::escape_rate_py, py::arg("holes"), py::arg("steps") = 2000,
           py::arg("grid") = 1024)
      .def("extremal_index", &System::extremal_index_py, py::arg("centers"),
           py::arg("eps0") = 1.0 / 1024.0, py::arg("levels") = 8, py::arg("k_max") = 20,
           py::arg("average_over") = 0)
      .def("bowen_dimension", &System::bowen_py, py::arg("holes"))
      .def("gumbel_curve", &System::gumbel_curve_py, py::arg("centers"), py::arg("t"),
           py::arg("n_list"), py::arg("grid") = 4096)
      .def("hitting_times", &System::hitting_times_py, py::arg("center"), py::arg("N"),
           py::arg("samples") = 20000, py::arg("seed") = 1, py::arg("rate") = 1.0,
           py::arg("threads") = 1);

  m.def("selftest", [] {
    std::ostringstream log;
    auto items = run_selftest(log);
    bool ok = true;
    for (auto& item : items) ok = ok && item.passed;
    return py::make_tuple(ok, log.str());
  });

  m.def("run_config", [](const std::string& config_json, const std::string& subcommand) {
    std::ostringstream log;
    ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
    int code = run_subcommand(subcommand, cfg, 1, log);
    return py::make_tuple(code, log.str());
  });
}
