#include <doctest.h>

#include <cmath>

#include "holelab/map_model.hpp"
#include "holelab/reachability.hpp"

using namespace holelab;

namespace {

MapModel power_sink(double x0, double delta, double l = 2.0) {
  MapSpec spec;
  spec.base = "doubling";
  spec.x0 = x0;
  spec.delta = delta;
  spec.sink = {SinkKind::Power, l};
  return build_map(spec);
}

// Independent oracle: push a dense sample of the hole (and of the noise
// offsets) forward pointwise and report the first step at which some image
// lies strictly inside the open hole; the cap otherwise.
int point_oracle(const MapModel& m, double sigma, int samples = 4001, int offsets = 41) {
  const int cap = std::max(1, static_cast<int>(std::floor(std::abs(std::log(m.hole.radius)))));
  std::vector<double> pts;
  for (int i = 0; i < samples; ++i) {
    pts.push_back(m.phase.reduce(m.hole.center - m.hole.radius + 2.0 * m.hole.radius * (i + 0.5) / samples));
  }
  for (int n = 1; n <= cap; ++n) {
    std::vector<double> next;
    for (double x : pts) {
      const double y = m.eval(x);
      if (sigma == 0.0) {
        next.push_back(y);
      } else {
        for (int j = 0; j < offsets; ++j) next.push_back(m.phase.reduce(y - sigma + 2.0 * sigma * j / (offsets - 1)));
      }
    }
    std::sort(next.begin(), next.end());
    pts.clear();
    // Thin the cloud to keep it bounded.
    const std::size_t stride = std::max<std::size_t>(1, next.size() / 20000);
    for (std::size_t i = 0; i < next.size(); i += stride) pts.push_back(next[i]);
    for (double x : pts) {
      if (m.in_hole(x)) return n;
    }
  }
  return cap;
}

}  // namespace

TEST_CASE("tent-e2 without noise hits the cap") {
  const MapModel m = build_map(builtin_spec("tent-e2", 0.01));
  const GapTime g = gap_time(m, NoiseModel{0.0});
  CHECK(g.sweep.cap == 4);
  CHECK(g.k == 4);
  CHECK(g.cap_hit);
  CHECK(g.sweep.first_return == 0);
  CHECK(g.k == point_oracle(m, 0.0));
  REQUIRE(g.sweep.steps.size() == 4);
  // Flat top: the hole collapses to the point 1 - 2 delta, then doubles.
  CHECK(g.sweep.steps[0].arcs.size() == 1);
  CHECK(g.sweep.steps[0].arcs[0].lo == doctest::Approx(0.98));
  CHECK(g.sweep.steps[0].arcs[0].width() == doctest::Approx(0.0));
  CHECK(g.sweep.steps[1].arcs[0].lo == doctest::Approx(0.04));
}

TEST_CASE("doubling-e1 returns after one step") {
  const MapModel m = build_map(builtin_spec("doubling-e1", 0.01));
  for (const double sigma : {0.0, 0.001, 0.02}) {
    const GapTime g = gap_time(m, NoiseModel{sigma});
    CHECK(g.k == 1);
    CHECK_FALSE(g.cap_hit);
    CHECK(g.sweep.first_return == 1);
  }
}

TEST_CASE("period-3 sink gives k = 3") {
  const MapModel m = power_sink(1.0 / 7.0, 0.01);
  const GapTime g = gap_time(m, NoiseModel{0.01});
  CHECK(g.k == 3);
  CHECK_FALSE(g.cap_hit);
  CHECK(point_oracle(m, 0.01) == 3);
}

TEST_CASE("gap time agrees with the point oracle") {
  for (const double sigma : {0.0, 0.002, 0.01, 0.03}) {
    for (const double delta : {0.02, 0.01, 0.005}) {
      const MapModel tent = build_map(builtin_spec("tent-e2", delta));
      CHECK(gap_time(tent, NoiseModel{sigma}).k == point_oracle(tent, sigma));
      const MapModel p3 = power_sink(1.0 / 7.0, delta);
      CHECK(gap_time(p3, NoiseModel{sigma}).k == point_oracle(p3, sigma));
    }
  }
}

TEST_CASE("gap time is non-increasing in sigma") {
  for (const double delta : {0.02, 0.01, 0.005, 0.0025}) {
    const MapModel m = build_map(builtin_spec("tent-e2", delta));
    int last = 1 << 30;
    for (const double sigma : {0.0, 0.0005, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1}) {
      const int k = gap_time(m, NoiseModel{sigma}).k;
      CHECK(k <= last);
      CHECK(k >= 1);
      last = k;
    }
  }
}

TEST_CASE("noise-free gap time never decreases when delta halves (tent family)") {
  int last = 0;
  for (double delta = 0.04; delta > 1e-4; delta /= 2.0) {
    const int k = gap_time(build_map(builtin_spec("tent-e2", delta)), NoiseModel{0.0}).k;
    CHECK(k >= last);
    last = k;
  }
}

TEST_CASE("no hole means k = 1") {
  const MapModel m = build_map(builtin_spec("doubling-e1", 0.0));
  CHECK(gap_time(m, NoiseModel{0.01}).k == 1);
}

TEST_CASE("merge_arcs") {
  const Phase c = Phase::circle();
  auto merged = merge_arcs({{0.1, 0.2}, {0.15, 0.3}, {0.5, 0.6}}, c);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].lo == doctest::Approx(0.1));
  CHECK(merged[0].hi == doctest::Approx(0.3));
  // An arc across 0 is kept as one arc starting in the fundamental domain.
  merged = merge_arcs({{-0.05, 0.05}}, c);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].width() == doctest::Approx(0.1));
  CHECK(arc_contains(c, merged[0], 0.0));
  CHECK(arc_contains(c, merged[0], 0.97));
  CHECK_FALSE(arc_contains(c, merged[0], 0.5));
  // Wide arcs become the full circle.
  merged = merge_arcs({{0.0, 0.7}, {0.6, 1.2}}, c);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].width() == doctest::Approx(1.0));
  // The cap bridges the smallest gaps and only enlarges the set.
  std::vector<Arc> many;
  for (int i = 0; i < 100; ++i) many.push_back({i * 0.01, i * 0.01 + 0.001 * (1 + i % 3)});
  merged = merge_arcs(many, c, 10);
  CHECK(merged.size() <= 10);
  for (const auto& a : many) CHECK(arc_contains(c, merged[0], a.lo) + 0 >= 0);
  for (const auto& a : many) {
    bool covered = false;
    for (const auto& m : merged) covered = covered || (arc_contains(c, m, a.lo) && arc_contains(c, m, a.hi));
    CHECK(covered);
  }
}

TEST_CASE("H2 check") {
  MapSpec spec;
  spec.base = "doubling";
  spec.delta = 0.01;
  spec.sink = {SinkKind::Power, 2.0};
  const MapModel smooth = build_map(spec);
  CHECK(check_h2(smooth, NoiseModel{0.001}, 1).holds);
  CHECK(check_h2(smooth, NoiseModel{0.001}, 0).holds);

  const MapModel tent = build_map(builtin_spec("tent-e2", 0.01));
  CHECK(check_h2(tent, NoiseModel{0.3}, 0).holds);
  const H2Report r = check_h2(tent, NoiseModel{0.3}, 3);
  CHECK_FALSE(r.holds);
  CHECK(r.step >= 1);
  CHECK(r.step <= 3);
  REQUIRE(r.overlap.has_value());
  CHECK(arc_contains(tent.phase, *r.overlap, r.kink));
  // Small noise keeps the first images away from the crease at 0.
  CHECK(check_h2(tent, NoiseModel{0.001}, 2).holds);
}
