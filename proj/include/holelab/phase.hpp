#pragma once

#include <cmath>

namespace holelab {

enum class PhaseKind { Circle, Interval };

// The state space: the circle [lo, hi) with endpoints identified, or the
// invariant interval [lo, hi] of an interval map.
struct Phase {
  PhaseKind kind = PhaseKind::Circle;
  double lo = 0.0;
  double hi = 1.0;

  static Phase circle() { return Phase{}; }
  static Phase interval(double lo, double hi) { return Phase{PhaseKind::Interval, lo, hi}; }

  bool is_circle() const { return kind == PhaseKind::Circle; }
  double length() const { return hi - lo; }

  // Reduces a lifted coordinate to the fundamental domain. Interval points
  // are clamped; they only leave [lo, hi] through rounding.
  double reduce(double x) const {
    if (!is_circle()) return x < lo ? lo : (x > hi ? hi : x);
    const double len = length();
    double r = std::fmod(x - lo, len);
    if (r < 0.0) r += len;
    if (r >= len) r = 0.0;
    return lo + r;
  }

  // x - y measured along the phase; on the circle the representative in
  // [-len/2, len/2).
  double offset(double x, double y) const {
    const double d = x - y;
    if (!is_circle()) return d;
    const double len = length();
    return d - len * std::floor(d / len + 0.5);
  }

  bool operator==(const Phase&) const = default;
};

}  // namespace holelab
