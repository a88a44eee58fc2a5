#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "holelab/config.hpp"
#include "holelab/errors.hpp"
#include "holelab/experiments.hpp"
#include "holelab/montecarlo.hpp"
#include "holelab/observables.hpp"
#include "holelab/operators.hpp"
#include "holelab/reachability.hpp"
#include "holelab/spectral.hpp"

namespace {

using namespace holelab;

constexpr int kExitPlanInvalid = 2;
constexpr int kExitPointError = 3;

struct Common {
  std::string config;
  std::string map;
  std::optional<double> sigma;
  std::optional<double> delta;
  std::string grid;
  std::optional<long> seed;
  std::string output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value configuration file");
  cmd->add_option("--map", c.map, "doubling-e1, tent-e2, doubling, tent or custom");
  cmd->add_option("--sigma", c.sigma, "noise half-width");
  cmd->add_option("--delta", c.delta, "hole radius");
  cmd->add_option("--grid", c.grid, "number of cells or 'auto'");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--output", c.output, "output CSV path (stdout when omitted)");
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentPlan load_plan(const Common& c, bool validate = true) {
  Config cfg = c.config.empty() ? Config{} : Config::load(c.config);
  if (!c.map.empty()) cfg.set("map", c.map);
  if (c.sigma) {
    cfg.erase("sigmas");
    cfg.erase("sigma_range");
    cfg.erase("points");
    cfg.set("sigma", exact(*c.sigma));
  }
  if (c.delta) {
    cfg.erase("deltas");
    cfg.erase("delta_range");
    cfg.erase("points");
    cfg.set("delta", exact(*c.delta));
  }
  if (!c.grid.empty()) {
    cfg.erase("grids");
    cfg.set("grid", c.grid);
  }
  if (c.seed) {
    cfg.erase("seeds");
    cfg.set("seed", std::to_string(*c.seed));
  }
  if (!c.output.empty()) cfg.set("output", c.output);
  auto plan = plan_from_config(cfg);
  if (validate) validate_plan(plan);
  return plan;
}

PlanPoint single_point(const ExperimentPlan& plan) {
  const auto points = plan.expand();
  if (points.size() != 1) {
    throw Error(ErrorKind::PlanInvalid, "this command takes exactly one (sigma, delta, grid, seed) point, got " +
                                            std::to_string(points.size()));
  }
  return points.front();
}

// CSV goes to `path` (or stdout), the metadata record to path + ".meta" (or
// stderr).
struct Sink {
  explicit Sink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
      meta_ = std::make_unique<std::ofstream>(path + ".meta");
    }
  }
  std::ostream& csv() { return file_ ? *file_ : std::cout; }
  std::ostream& meta() { return meta_ ? *meta_ : std::cerr; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::unique_ptr<std::ofstream> meta_;
};

void write_point_meta(std::ostream& out, const ExperimentPlan& plan, const PlanPoint& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "map = %s\nsigma = %.17g\ndelta = %.17g\nn = %d\nseed = %llu\n", plan.map.c_str(),
                p.sigma, p.delta, p.n, static_cast<unsigned long long>(p.seed));
  out << buf;
}

void export_operator(const UlamOperator& op, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  write_triplets(op, out);
}

int cmd_spectral(const Common& c, bool conditioned, const std::string& export_path) {
  const auto plan = load_plan(c);
  const auto p = single_point(plan);
  const MapModel m = build_map(plan.map_spec(p.sigma, p.delta));
  const Grid grid(m.phase, p.n);
  const UlamOperator L = assemble_annealed(m, NoiseModel{p.sigma}, grid);
  const UlamOperator op = conditioned ? assemble_conditioned(L, hole_mask(m, grid)) : L;
  export_operator(op, export_path);
  const SpectralResult r = conditioned ? qsd_eigenpair(op) : stationary_density(op);
  Sink sink(plan.output);
  write_density_csv(r.density, sink.csv());
  write_point_meta(sink.meta(), plan, p);
  write_result_meta(r, sink.meta());
  if (conditioned) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "escape_rate = %.17g\n", -std::log(r.eigenvalue));
    sink.meta() << buf;
  }
  return 0;
}

// Reachability needs no grid and accepts sigma = 0.
int cmd_gap(const Common& c) {
  const auto plan = load_plan(c, false);
  if (plan.points.size() != 1) {
    throw Error(ErrorKind::PlanInvalid, "gap takes exactly one (sigma, delta) point, got " +
                                            std::to_string(plan.points.size()));
  }
  PlanPoint p{plan.points[0].first, plan.points[0].second, 0, plan.seeds.front()};
  if (!(p.sigma >= 0.0) || !(p.delta >= 0.0)) throw Error(ErrorKind::PlanInvalid, "sigma and delta must be >= 0");
  const MapModel m = build_map(plan.map_spec(p.sigma, p.delta));
  const NoiseModel noise{p.sigma};
  const GapTime gap = gap_time(m, noise);
  const H2Report h2 = check_h2(m, noise, gap.k);
  Sink sink(plan.output);
  write_sweep_csv(gap.sweep, sink.csv());
  write_point_meta(sink.meta(), plan, p);
  sink.meta() << "k = " << gap.k << "\ncap = " << gap.sweep.cap << "\ncap_hit = " << (gap.cap_hit ? "true" : "false")
              << "\nfirst_return = " << gap.sweep.first_return << "\nh2_holds = " << (h2.holds ? "true" : "false")
              << "\n";
  if (!h2.holds) sink.meta() << "h2_step = " << h2.step << "\nh2_point = " << h2.kink << "\n";
  return 0;
}

int cmd_lyapunov(const Common& c) {
  auto plan = load_plan(c);
  plan.observables = {"spectral", "lyapunov"};
  const auto p = single_point(plan);
  const ResultRow row = run_point(plan, p);
  if (!row.error.empty()) {
    std::cerr << row.error << "\n";
    return kExitPointError;
  }
  const MapModel m = build_map(plan.map_spec(p.sigma, p.delta));
  const GapPrediction pred = lyapunov_gap_prediction(m, NoiseModel{p.sigma}, row.k);
  Sink sink(plan.output);
  char buf[512];
  sink.csv() << "sigma,delta,n,k,xi,xi_finite,r,prediction_hole,prediction_noise,prediction_total,flags\n";
  std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n", row.sigma, row.delta,
                row.n, row.k, row.xi, row.xi_finite, row.r, pred.hole_term, pred.noise_term, pred.total,
                row.flags.c_str());
  sink.csv() << buf;
  write_point_meta(sink.meta(), plan, p);
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto plan = load_plan(c);
  const auto rows = run_plan(plan);
  Sink sink(plan.output);
  write_csv(rows, plan.timing, sink.csv());
  std::size_t errors = 0;
  for (const auto& r : rows) errors += r.error.empty() ? 0 : 1;
  sink.meta() << "map = " << plan.map << "\nrows = " << rows.size() << "\nerror_rows = " << errors << "\n";
  return errors > 0 ? kExitPointError : 0;
}

struct SimulateOptions {
  std::uint64_t steps = 1'000'000;
  std::uint64_t burn_in = 1'000;
  int particles = 10'000;
  bool kill = false;
};

int cmd_simulate(const Common& c, const SimulateOptions& s) {
  const auto plan = load_plan(c);
  const auto p = single_point(plan);
  const MapModel m = build_map(plan.map_spec(p.sigma, p.delta));
  const NoiseModel noise{p.sigma};
  const Grid grid(m.phase, p.n);
  SimConfig cfg;
  cfg.seed = p.seed;
  cfg.steps = s.steps;
  cfg.burn_in = s.burn_in;
  cfg.ensemble_size = s.particles;
  cfg.kill_on = s.kill;
  Sink sink(plan.output);
  write_point_meta(sink.meta(), plan, p);
  char buf[256];
  std::snprintf(buf, sizeof buf, "steps = %llu\nburn_in = %llu\n", static_cast<unsigned long long>(cfg.steps),
                static_cast<unsigned long long>(cfg.burn_in));
  sink.meta() << buf;
  const Histogram* hist = nullptr;
  Histogram single;
  KilledEnsemble ensemble;
  if (s.kill) {
    ensemble = killed_ensemble(m, noise, grid, cfg);
    hist = &ensemble.histogram;
    std::snprintf(buf, sizeof buf,
                  "particles = %d\nkills = %llu\nsurvival = %.17g\nsurvival_se = %.17g\nescape_rate = %.17g\n",
                  cfg.ensemble_size, static_cast<unsigned long long>(ensemble.kills), ensemble.survival,
                  ensemble.survival_se, ensemble.escape_rate);
    sink.meta() << buf;
  } else {
    single = simulate_histogram(m, noise, grid, cfg);
    hist = &single;
  }
  std::snprintf(buf, sizeof buf, "samples = %llu\ncoverage = %.6f\nnon_ergodic_suspect = %s\n",
                static_cast<unsigned long long>(hist->samples), hist->coverage,
                hist->non_ergodic_suspect ? "true" : "false");
  sink.meta() << buf;
  write_density_csv(hist->density, sink.csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holelab: transfer operators of noisy expanding maps with a contracting hole"};
  app.require_subcommand(1);

  Common stationary_opts, qsd_opts, gap_opts, lyap_opts, sweep_opts, sim_opts;
  std::string stationary_export, qsd_export;
  SimulateOptions sim;

  auto* stationary = app.add_subcommand("stationary", "stationary density of the annealed operator");
  add_common(stationary, stationary_opts);
  stationary->add_option("--export-operator", stationary_export, "write the operator as row col value triplets");

  auto* qsd = app.add_subcommand("qsd", "quasi-stationary eigenpair of the conditioned operator");
  add_common(qsd, qsd_opts);
  qsd->add_option("--export-operator", qsd_export, "write the operator as row col value triplets");

  auto* gap = app.add_subcommand("gap", "gap time and reachability sweep of the hole");
  add_common(gap, gap_opts);

  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponent of the stationary density");
  add_common(lyap, lyap_opts);

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write one CSV row per point");
  add_common(sweep, sweep_opts);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo histogram or killed ensemble");
  add_common(simulate, sim_opts);
  simulate->add_option("--steps", sim.steps, "steps per trajectory");
  simulate->add_option("--burn-in", sim.burn_in, "discarded initial steps");
  simulate->add_option("--particles", sim.particles, "ensemble size with --kill");
  simulate->add_flag("--kill", sim.kill, "kill particles in the hole and resample from survivors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stationary) return cmd_spectral(stationary_opts, false, stationary_export);
    if (*qsd) return cmd_spectral(qsd_opts, true, qsd_export);
    if (*gap) return cmd_gap(gap_opts);
    if (*lyap) return cmd_lyapunov(lyap_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*simulate) return cmd_simulate(sim_opts, sim);
  } catch (const Error& e) {
    std::cerr << "holelab: " << e.what() << "\n";
    return e.kind() == ErrorKind::PlanInvalid ? kExitPlanInvalid : kExitPointError;
  }
  return 0;
}
