#pragma once

#include <cstdint>

#include "holelab/density.hpp"
#include "holelab/map_model.hpp"
#include "holelab/sparse.hpp"

namespace holelab {

struct SimConfig {
  std::uint64_t seed = 1;
  std::uint64_t steps = 1'000'000;
  std::uint64_t burn_in = 1'000;
  int ensemble_size = 10'000;
  bool kill_on = false;

  void validate() const;
};

// Stateless generator: draw number `counter` of stream `stream` is a hash of
// (seed, stream, counter), so any particle can be replayed independently.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;  // [0, 1)

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Histogram {
  Density density;
  std::uint64_t samples = 0;
  double coverage = 0.0;  // fraction of cells visited
  bool non_ergodic_suspect = false;
};

// Occupation histogram of one trajectory from a uniform random start.
Histogram simulate_histogram(const MapModel& m, const NoiseModel& noise, const Grid& grid, const SimConfig& cfg);

struct KilledEnsemble {
  Histogram histogram;      // survivors after each post-burn-in step
  double escape_rate = 0.0;  // -ln(mean survival fraction)
  double survival = 1.0;     // mean fraction of particles outside the hole
  double survival_se = 0.0;  // batch-means standard error of `survival`
  std::uint64_t kills = 0;
};

// Constant-population ensemble: particles found in the hole are replaced by
// copies of uniformly chosen survivors, then every particle takes one noisy
// step. Throws Extinction when no particle survives a step.
KilledEnsemble killed_ensemble(const MapModel& m, const NoiseModel& noise, const Grid& grid, const SimConfig& cfg,
                               Execution exec = Execution::Parallel);

struct BirkhoffAverage {
  double mean = 0.0;  // over finite terms
  std::uint64_t samples = 0;
  std::uint64_t zero_derivative_hits = 0;
};

// Time average of log|f_delta'| along one trajectory.
BirkhoffAverage birkhoff_lyapunov(const MapModel& m, const NoiseModel& noise, const SimConfig& cfg);

}  // namespace holelab
