#include "holelab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "holelab/errors.hpp"

namespace holelab {

Distance bv_distance(const Density& d1, const Density& d2) {
  require_same_grid(d1.grid, d2.grid);
  std::vector<double> diff(d1.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = d1.values[i] - d2.values[i];
  return {l1_norm(diff, d1.grid), bv_norm(diff, d1.grid)};
}

namespace {

Lyapunov integrate_log_derivative(const MapModel& m, const std::vector<Piece>& pieces, const Density& d) {
  if (!(d.grid.phase == m.phase)) throw Error(ErrorKind::GridMismatch, "density and map phases differ");
  Lyapunov out;
  const Grid& g = d.grid;
  for (int j = 0; j < g.n; ++j) {
    const double w = d.values[j];
    if (w == 0.0) continue;
    const double c0 = g.cell_lo(j);
    const double c1 = g.cell_hi(j);
    auto it = std::upper_bound(pieces.begin(), pieces.end(), c0,
                               [](double v, const Piece& p) { return v < p.hi(); });
    for (; it != pieces.end() && it->lo() < c1; ++it) {
      const double a = std::max(c0, it->lo());
      const double b = std::min(c1, it->hi());
      if (b <= a) continue;
      const double integral = it->log_derivative_integral(a, b);
      if (std::isinf(integral) && integral < 0.0) {
        out.neg_inf = true;
      } else {
        out.finite_part += w * integral;
      }
    }
  }
  out.xi = out.neg_inf ? -std::numeric_limits<double>::infinity() : out.finite_part;
  return out;
}

}  // namespace

Lyapunov lyapunov(const MapModel& m, const Density& d) { return integrate_log_derivative(m, m.pieces, d); }

Lyapunov base_lyapunov(const MapModel& m, const Density& d) { return integrate_log_derivative(m, m.base_pieces, d); }

GapPrediction lyapunov_gap_prediction(const MapModel& m, const NoiseModel& noise, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "period must be >= 1");
  if (!(noise.sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "prediction needs sigma > 0");
  const double delta = m.hole.radius;
  const double sigma = noise.sigma;
  const double l = m.sink.exponent;
  const double p = k;
  const double dlog = delta > 0.0 ? delta * std::abs(std::log(delta)) : 0.0;
  GapPrediction out;
  out.noise_term = sigma * std::abs(std::log(sigma));
  out.hole_term = l * delta * dlog / (std::pow(m.lambda_min, p - 1.0) * sigma);
  if (k == 1) {
    out.total = out.hole_term + out.noise_term;
  } else {
    out.total = p * delta + (1.0 + p * delta) * (out.hole_term + out.noise_term + dlog);
  }
  return out;
}

void write_sweep_csv(const ReachabilitySweep& sweep, std::ostream& out) {
  out << "step,interval_lo,interval_hi\n";
  char buf[96];
  for (const auto& step : sweep.steps) {
    for (const auto& a : step.arcs) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", step.step, a.lo, a.hi);
      out << buf;
    }
  }
}

}  // namespace holelab
