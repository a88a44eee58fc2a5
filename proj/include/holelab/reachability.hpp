#pragma once

#include <optional>
#include <vector>

#include "holelab/map_model.hpp"

namespace holelab {

// Closed arc [lo, hi] in lifted coordinates; on the circle lo is kept in the
// fundamental domain and hi - lo < length (longer arcs become the full circle).
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
};

// Normalizes, sorts and merges overlapping arcs. When more than `cap` arcs
// remain the smallest gaps are bridged, which only enlarges the set.
std::vector<Arc> merge_arcs(std::vector<Arc> arcs, const Phase& phase, std::size_t cap = 10000);

// Images of the arcs under f_delta (branch by branch, exact for monotone
// branches), merged.
std::vector<Arc> image_of_arcs(const MapModel& m, const std::vector<Arc>& arcs);

// Overlap of an arc with the open hole; a degenerate arc counts when it lies
// strictly inside. Returns the overlapping piece, if any.
std::optional<Arc> hole_intersection(const MapModel& m, const Arc& arc);

bool arc_contains(const Phase& phase, const Arc& arc, double x);

struct ReachabilityStep {
  int step = 0;
  std::vector<Arc> arcs;
};

struct ReachabilitySweep {
  std::vector<ReachabilityStep> steps;
  int first_return = 0;  // 0 when the images never returned within the cap
  int cap = 0;
};

struct GapTime {
  int k = 1;
  bool cap_hit = false;
  ReachabilitySweep sweep;
};

// k = min(first n >= 1 at which the sigma-inflated image of the hole meets
// the hole, floor(|ln delta|)). Without a hole k = 1.
GapTime gap_time(const MapModel& m, const NoiseModel& noise);

struct H2Report {
  bool holds = true;
  int step = 0;                // first offending step
  double kink = 0.0;           // offending non-differentiability point
  std::optional<Arc> overlap;  // image arc containing it
};

// Checks that the sigma-inflated images f^j(H) for 1 <= j <= k avoid the
// non-differentiability points of the base map outside the hole.
H2Report check_h2(const MapModel& m, const NoiseModel& noise, int k);

}  // namespace holelab
