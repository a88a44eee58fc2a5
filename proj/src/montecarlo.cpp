#include "holelab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "holelab/errors.hpp"

namespace holelab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

void SimConfig::validate() const {
  if (steps <= burn_in) throw Error(ErrorKind::InvalidArgument, "steps must exceed burn_in");
  if (kill_on && ensemble_size < 100) throw Error(ErrorKind::InvalidArgument, "killed ensembles need >= 100 particles");
}

namespace {

Histogram finish_histogram(const Grid& grid, const std::vector<std::uint64_t>& counts) {
  Histogram out;
  std::uint64_t total = 0;
  std::size_t visited = 0;
  for (auto c : counts) {
    total += c;
    if (c > 0) ++visited;
  }
  std::vector<double> v(counts.size(), 0.0);
  if (total > 0) {
    const double scale = 1.0 / (static_cast<double>(total) * grid.h());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(counts[i]) * scale;
  }
  out.density = Density(grid, std::move(v));
  out.samples = total;
  out.coverage = static_cast<double>(visited) / static_cast<double>(counts.size());
  out.non_ergodic_suspect = out.coverage < 0.1;
  return out;
}

double noise_offset(const NoiseModel& noise, const CounterRng& rng, std::uint64_t counter) {
  return noise.sigma * (2.0 * rng.uniform(counter) - 1.0);
}

double random_point(const Phase& phase, const CounterRng& rng, std::uint64_t counter) {
  return phase.lo + phase.length() * rng.uniform(counter);
}

}  // namespace

Histogram simulate_histogram(const MapModel& m, const NoiseModel& noise, const Grid& grid, const SimConfig& cfg) {
  cfg.validate();
  if (!(grid.phase == m.phase)) throw Error(ErrorKind::GridMismatch, "grid and map phases differ");
  const CounterRng rng(cfg.seed, 0);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(grid.n), 0);
  double x = random_point(m.phase, rng, 0);
  for (std::uint64_t t = 0; t < cfg.steps; ++t) {
    x = eval_noisy(m, noise, x, noise_offset(noise, rng, t + 1));
    if (t >= cfg.burn_in) ++counts[grid.cell_of(x)];
  }
  return finish_histogram(grid, counts);
}

KilledEnsemble killed_ensemble(const MapModel& m, const NoiseModel& noise, const Grid& grid, const SimConfig& cfg,
                               Execution exec) {
  cfg.validate();
  if (!(grid.phase == m.phase)) throw Error(ErrorKind::GridMismatch, "grid and map phases differ");
  const int count = cfg.ensemble_size;
  // Streams 0..count-1 drive the particles, stream `count` the resampling.
  std::vector<CounterRng> streams;
  streams.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) streams.emplace_back(cfg.seed, static_cast<std::uint64_t>(i));
  const CounterRng resample(cfg.seed, static_cast<std::uint64_t>(count));
  std::uint64_t resample_counter = 0;

  std::vector<double> x(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) x[i] = random_point(m.phase, streams[i], 0);

  const std::uint64_t recorded = cfg.steps - cfg.burn_in;
  const std::uint64_t batches = std::min<std::uint64_t>(20, recorded);
  std::vector<double> batch_sum(batches, 0.0);
  std::vector<std::uint64_t> batch_len(batches, 0);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(grid.n), 0);
  std::vector<int> alive;
  std::vector<int> dead;
  KilledEnsemble out;

  for (std::uint64_t t = 0; t < cfg.steps; ++t) {
    alive.clear();
    dead.clear();
    for (int i = 0; i < count; ++i) (cfg.kill_on && m.in_hole(x[i]) ? dead : alive).push_back(i);
    if (alive.empty()) {
      throw Error(ErrorKind::Extinction, "every particle was in the hole at step " + std::to_string(t));
    }
    for (int i : dead) {
      const auto pick = resample.bits(resample_counter++) % alive.size();
      x[i] = x[alive[pick]];
    }
    if (t >= cfg.burn_in) {
      const std::uint64_t r = t - cfg.burn_in;
      const std::uint64_t b = r * batches / recorded;
      batch_sum[b] += static_cast<double>(alive.size()) / count;
      ++batch_len[b];
      out.kills += dead.size();
    }

    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < count; ++i) x[i] = eval_noisy(m, noise, x[i], noise_offset(noise, streams[i], t + 1));
    } else {
      for (int i = 0; i < count; ++i) x[i] = eval_noisy(m, noise, x[i], noise_offset(noise, streams[i], t + 1));
    }
    if (t >= cfg.burn_in) {
      for (int i = 0; i < count; ++i) ++counts[grid.cell_of(x[i])];
    }
  }

  out.histogram = finish_histogram(grid, counts);
  double mean = 0.0;
  std::vector<double> means;
  for (std::uint64_t b = 0; b < batches; ++b) {
    if (batch_len[b] == 0) continue;
    means.push_back(batch_sum[b] / static_cast<double>(batch_len[b]));
  }
  for (double v : means) mean += v;
  mean /= static_cast<double>(means.size());
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  if (means.size() > 1) var /= static_cast<double>(means.size() - 1);
  out.survival = mean;
  out.survival_se = std::sqrt(var / static_cast<double>(means.size()));
  out.escape_rate = -std::log(mean);
  return out;
}

BirkhoffAverage birkhoff_lyapunov(const MapModel& m, const NoiseModel& noise, const SimConfig& cfg) {
  cfg.validate();
  const CounterRng rng(cfg.seed, 0);
  BirkhoffAverage out;
  double sum = 0.0;
  double x = random_point(m.phase, rng, 0);
  for (std::uint64_t t = 0; t < cfg.steps; ++t) {
    if (t >= cfg.burn_in) {
      const double d = std::abs(m.derivative(x));
      if (d == 0.0) {
        ++out.zero_derivative_hits;
      } else {
        sum += std::log(d);
        ++out.samples;
      }
    }
    x = eval_noisy(m, noise, x, noise_offset(noise, rng, t + 1));
  }
  out.mean = out.samples > 0 ? sum / static_cast<double>(out.samples) : 0.0;
  return out;
}

}  // namespace holelab
