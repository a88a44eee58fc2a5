#pragma once

#include <iosfwd>

#include "holelab/density.hpp"
#include "holelab/map_model.hpp"
#include "holelab/reachability.hpp"

namespace holelab {

struct Distance {
  double l1 = 0.0;
  double bv = 0.0;
};

// |d1 - d2|_1 and the discrete BV norm of d1 - d2.
Distance bv_distance(const Density& d1, const Density& d2);

struct Lyapunov {
  double xi = 0.0;           // -inf when flagged
  double finite_part = 0.0;  // contribution of cells where log|f_delta'| is integrable
  bool neg_inf = false;      // positive mass sits where f_delta' vanishes on an interval
};

// Integral of log|f_delta'| against the step density d, cell by cell in
// closed form.
Lyapunov lyapunov(const MapModel& m, const Density& d);
// Same integral for the unmodified base map f.
Lyapunov base_lyapunov(const MapModel& m, const Density& d);

struct GapPrediction {
  double hole_term = 0.0;   // l delta^2 |ln delta| / (lambda^{p-1} sigma)
  double noise_term = 0.0;  // sigma |ln sigma|
  double total = 0.0;
};

// Order-of-magnitude prediction for the Lyapunov gap with p = k and the
// model's sink exponent; no constants are implied.
GapPrediction lyapunov_gap_prediction(const MapModel& m, const NoiseModel& noise, int k);

// "step,interval_lo,interval_hi" per arc.
void write_sweep_csv(const ReachabilitySweep& sweep, std::ostream& out);

}  // namespace holelab
