#include <doctest.h>

#include <cmath>

#include "holelab/errors.hpp"
#include "holelab/montecarlo.hpp"
#include "holelab/observables.hpp"
#include "holelab/operators.hpp"
#include "holelab/spectral.hpp"

using namespace holelab;

namespace {

MapModel smooth_sink(double delta) {
  MapSpec spec;
  spec.base = "doubling";
  spec.delta = delta;
  spec.sink = {SinkKind::Power, 2.0};
  return build_map(spec);
}

}  // namespace

TEST_CASE("counter RNG is reproducible and uniform") {
  const CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  CHECK(a.bits(12) == b.bits(12));
  CHECK(a.bits(12) != c.bits(12));
  CHECK(a.bits(12) != d.bits(12));
  double mean = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("simulation is deterministic for a seed") {
  const MapModel m = build_map(builtin_spec("tent-e2", 0.01));
  const Grid grid(m.phase, 256);
  SimConfig cfg;
  cfg.steps = 100000;
  const Histogram a = simulate_histogram(m, NoiseModel{0.02}, grid, cfg);
  const Histogram b = simulate_histogram(m, NoiseModel{0.02}, grid, cfg);
  CHECK(a.density.values == b.density.values);
  cfg.seed = 2;
  const Histogram c = simulate_histogram(m, NoiseModel{0.02}, grid, cfg);
  CHECK(a.density.values != c.density.values);
  CHECK(a.samples == cfg.steps - cfg.burn_in);
}

TEST_CASE("histogram of the noisy doubling map is uniform") {
  const MapModel m = build_map(builtin_spec("doubling-e1", 0.0));
  const Grid grid(m.phase, 1024);
  SimConfig cfg;
  cfg.steps = 10'000'000;
  const Histogram h = simulate_histogram(m, NoiseModel{0.01}, grid, cfg);
  CHECK(bv_distance(h.density, Density::constant(grid, 1.0)).l1 < 0.02);
  CHECK(h.coverage == 1.0);
  CHECK_FALSE(h.non_ergodic_suspect);
}

TEST_CASE("plateau traps a small-noise trajectory") {
  const double delta = 0.01, sigma = 0.0005;
  const MapModel m = build_map(builtin_spec("doubling-e1", delta));
  const Grid grid(m.phase, 8192);
  SimConfig cfg;
  cfg.steps = 1'000'000;
  const Histogram h = simulate_histogram(m, NoiseModel{sigma}, grid, cfg);
  double inside = 0;
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(grid.phase.offset(grid.cell_center(i), 0.0)) <= delta + 3 * sigma) inside += h.density.values[i] * grid.h();
  CHECK(inside > 0.9);
}

TEST_CASE("histogram agrees with the Ulam stationary density") {
  const MapModel m = build_map(builtin_spec("tent-e2", 0.01));
  const Grid grid(m.phase, 256);
  const NoiseModel noise{0.02};
  const Density rho = stationary_density(assemble_annealed(m, noise, Grid(m.phase, 4096))).density;
  SimConfig cfg;
  cfg.steps = 4'000'000;
  const Histogram h = simulate_histogram(m, noise, grid, cfg);
  CHECK(bv_distance(h.density, coarsen(rho, 16)).l1 < 0.05);
}

TEST_CASE("histograms from disjoint seeds agree within the binomial envelope") {
  const MapModel m = build_map(builtin_spec("doubling-e1", 0.0));
  const Grid grid(m.phase, 256);
  SimConfig cfg;
  cfg.steps = 2'000'000;
  const Histogram a = simulate_histogram(m, NoiseModel{0.05}, grid, cfg);
  cfg.seed = 0xdead;
  const Histogram b = simulate_histogram(m, NoiseModel{0.05}, grid, cfg);
  const double nsamp = static_cast<double>(a.samples);
  int inside = 0;
  for (int i = 0; i < grid.n; ++i) {
    auto se = [&](double dens) {
      const double p = dens * grid.h();
      return std::sqrt(p * (1 - p) / nsamp) / grid.h();
    };
    const double envelope = se(a.density.values[i]) + se(b.density.values[i]);
    if (std::abs(a.density.values[i] - b.density.values[i]) <= 2 * envelope) ++inside;
  }
  CHECK(inside >= 0.95 * grid.n);
}

TEST_CASE("killed ensemble") {
  const MapModel m = build_map(builtin_spec("doubling-e1", 0.01));
  const Grid grid(m.phase, 512);
  const NoiseModel noise{0.02};
  SimConfig cfg;
  cfg.steps = 2000;
  cfg.burn_in = 200;
  cfg.ensemble_size = 2000;
  cfg.kill_on = true;

  SUBCASE("serial and parallel runs are identical") {
    const KilledEnsemble a = killed_ensemble(m, noise, grid, cfg, Execution::Parallel);
    const KilledEnsemble b = killed_ensemble(m, noise, grid, cfg, Execution::Serial);
    CHECK(a.histogram.density.values == b.histogram.density.values);
    CHECK(a.kills == b.kills);
    CHECK(a.survival == b.survival);
  }
  SUBCASE("no hole, no kills") {
    const MapModel m0 = build_map(builtin_spec("doubling-e1", 0.0));
    const KilledEnsemble a = killed_ensemble(m0, noise, grid, cfg);
    CHECK(a.kills == 0);
    CHECK(a.survival == 1.0);
    CHECK(a.escape_rate == 0.0);
  }
  SUBCASE("escape rate matches -ln lambda") {
    const Grid fine(m.phase, 4096);
    const UlamOperator L = assemble_annealed(m, noise, fine);
    const double lambda = qsd_eigenpair(assemble_conditioned(L, hole_mask(m, fine))).eigenvalue;
    cfg.ensemble_size = 10000;
    const KilledEnsemble a = killed_ensemble(m, noise, grid, cfg);
    CHECK(std::abs(a.survival - lambda) <= 3 * a.survival_se + 1e-4);
    CHECK(a.escape_rate == doctest::Approx(-std::log(a.survival)));
  }
  SUBCASE("seeds change the sample but not the estimate") {
    const KilledEnsemble a = killed_ensemble(m, noise, grid, cfg);
    cfg.seed = 99;
    const KilledEnsemble b = killed_ensemble(m, noise, grid, cfg);
    CHECK(a.histogram.density.values != b.histogram.density.values);
    CHECK(std::abs(a.survival - b.survival) <= 4 * std::hypot(a.survival_se, b.survival_se) + 1e-4);
  }
}

TEST_CASE("extinction") {
  // Hole = everything but B_{0.01}(1/2); that ball doubles into the hole.
  MapSpec spec;
  spec.base = "doubling";
  spec.delta = 0.49;
  const MapModel m = build_map(spec);
  const Grid grid(m.phase, 64);
  SimConfig cfg;
  cfg.steps = 50;
  cfg.burn_in = 0;
  cfg.ensemble_size = 100;
  cfg.kill_on = true;
  CHECK_THROWS_WITH_AS(killed_ensemble(m, NoiseModel{0.001}, grid, cfg), doctest::Contains("Extinction"), Error);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.steps = 10;
  cfg.burn_in = 10;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.steps = 100;
  cfg.kill_on = true;
  cfg.ensemble_size = 10;
  CHECK_THROWS_AS(cfg.validate(), Error);
  const MapModel m = build_map(builtin_spec("tent-e2", 0.01));
  SimConfig ok;
  CHECK_THROWS_AS(simulate_histogram(m, NoiseModel{0.01}, Grid(Phase::interval(0, 1), 16), ok), Error);
}

TEST_CASE("Birkhoff average agrees with the cell integral") {
  const MapModel m = smooth_sink(0.01);
  const NoiseModel noise{0.05};
  const Density rho = stationary_density(assemble_annealed(m, noise, Grid(m.phase, 2048))).density;
  SimConfig cfg;
  cfg.steps = 10'000'000;
  const BirkhoffAverage b = birkhoff_lyapunov(m, noise, cfg);
  CHECK(std::abs(b.mean - lyapunov(m, rho).xi) < 0.02);
  CHECK(b.samples + b.zero_derivative_hits == cfg.steps - cfg.burn_in);
}
