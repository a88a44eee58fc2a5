#include "holelab/reachability.hpp"

#include <algorithm>
#include <cmath>

namespace holelab {

namespace {

std::vector<Arc> inflate(std::vector<Arc> arcs, double sigma) {
  for (auto& a : arcs) {
    a.lo -= sigma;
    a.hi += sigma;
  }
  return arcs;
}

Arc full_circle(const Phase& phase) { return {phase.lo, phase.hi}; }

bool is_full(const Phase& phase, const Arc& a) {
  return phase.is_circle() && a.width() >= phase.length();
}

}  // namespace

std::vector<Arc> merge_arcs(std::vector<Arc> arcs, const Phase& phase, std::size_t cap) {
  if (arcs.empty()) return arcs;
  const double len = phase.length();
  if (phase.is_circle()) {
    for (auto& a : arcs) {
      if (a.width() >= len) return {full_circle(phase)};
      const double lo = phase.reduce(a.lo);
      a = {lo, lo + a.width()};
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  std::vector<Arc> out;
  for (const auto& a : arcs) {
    if (!out.empty() && a.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, a.hi);
    } else {
      out.push_back(a);
    }
  }
  if (phase.is_circle()) {
    // Arcs running past hi wrap onto the front of the list.
    while (out.size() > 1 && out.back().hi - len >= out.front().lo) {
      out.front() = {out.back().lo, std::max(out.back().hi, out.front().hi + len)};
      out.pop_back();
      const double lo = phase.reduce(out.front().lo);
      out.front() = {lo, lo + out.front().width()};
      std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    }
    if (out.size() == 1 && out.front().width() >= len) return {full_circle(phase)};
  }
  if (out.size() > cap) {
    std::vector<std::pair<double, std::size_t>> gaps;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) gaps.emplace_back(out[i + 1].lo - out[i].hi, i);
    std::sort(gaps.begin(), gaps.end());
    std::vector<bool> bridge(out.size(), false);
    for (std::size_t i = 0; i < out.size() - cap; ++i) bridge[gaps[i].second] = true;
    std::vector<Arc> coarse;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!coarse.empty() && bridge[i - 1]) {
        coarse.back().hi = std::max(coarse.back().hi, out[i].hi);
      } else {
        coarse.push_back(out[i]);
      }
    }
    out = std::move(coarse);
  }
  return out;
}

std::vector<Arc> image_of_arcs(const MapModel& m, const std::vector<Arc>& arcs) {
  const Phase& phase = m.phase;
  const double len = phase.length();
  std::vector<Arc> images;
  for (const auto& arc : arcs) {
    if (is_full(phase, arc)) {
      for (const auto& p : m.pieces) {
        const double a = p.value(p.lo());
        const double b = p.value(p.hi());
        images.push_back({std::min(a, b), std::max(a, b)});
      }
      continue;
    }
    const int s_lo = phase.is_circle() ? static_cast<int>(std::floor((arc.lo - phase.lo) / len)) : 0;
    const int s_hi = phase.is_circle() ? static_cast<int>(std::floor((arc.hi - phase.lo) / len)) : 0;
    for (int s = s_lo; s <= s_hi; ++s) {
      const double shift = s * len;
      for (const auto& p : m.pieces) {
        const double a = std::max(arc.lo, p.lo() + shift);
        const double b = std::min(arc.hi, p.hi() + shift);
        if (a > b) continue;
        const double ya = p.value(a - shift);
        const double yb = p.value(b - shift);
        images.push_back({std::min(ya, yb), std::max(ya, yb)});
      }
    }
  }
  return merge_arcs(std::move(images), phase);
}

std::optional<Arc> hole_intersection(const MapModel& m, const Arc& arc) {
  if (!m.has_hole()) return std::nullopt;
  const Phase& phase = m.phase;
  const double ha = m.hole.center - m.hole.radius;
  const double hb = m.hole.center + m.hole.radius;
  if (is_full(phase, arc)) return Arc{ha, hb};
  const int reach = phase.is_circle() ? 2 : 0;
  for (int s = -reach; s <= reach; ++s) {
    const double shift = s * phase.length();
    const double lo = std::max(arc.lo, ha + shift);
    const double hi = std::min(arc.hi, hb + shift);
    if (hi > lo) return Arc{lo, hi};
    if (arc.width() == 0.0 && arc.lo > ha + shift && arc.lo < hb + shift) return arc;
  }
  return std::nullopt;
}

bool arc_contains(const Phase& phase, const Arc& arc, double x) {
  if (is_full(phase, arc)) return true;
  if (!phase.is_circle()) return x >= arc.lo && x <= arc.hi;
  const double len = phase.length();
  const double k = std::ceil((arc.lo - x) / len);
  return x + k * len <= arc.hi;
}

GapTime gap_time(const MapModel& m, const NoiseModel& noise) {
  GapTime out;
  if (!m.has_hole()) return out;
  const int cap = std::max(1, static_cast<int>(std::floor(std::abs(std::log(m.hole.radius)))));
  out.sweep.cap = cap;
  std::vector<Arc> arcs =
      merge_arcs({{m.hole.center - m.hole.radius, m.hole.center + m.hole.radius}}, m.phase);
  for (int n = 1; n <= cap; ++n) {
    arcs = merge_arcs(inflate(image_of_arcs(m, arcs), noise.sigma), m.phase);
    out.sweep.steps.push_back({n, arcs});
    for (const auto& a : arcs) {
      if (hole_intersection(m, a)) {
        out.k = n;
        out.sweep.first_return = n;
        return out;
      }
    }
  }
  out.k = cap;
  out.cap_hit = true;
  return out;
}

H2Report check_h2(const MapModel& m, const NoiseModel& noise, int k) {
  H2Report report;
  if (k < 1 || m.kinks.empty()) return report;
  std::vector<Arc> arcs =
      merge_arcs({{m.hole.center - m.hole.radius, m.hole.center + m.hole.radius}}, m.phase);
  for (int j = 1; j <= k; ++j) {
    arcs = merge_arcs(inflate(image_of_arcs(m, arcs), noise.sigma), m.phase);
    for (const auto& a : arcs) {
      for (double c : m.kinks) {
        if (arc_contains(m.phase, a, c)) {
          report.holds = false;
          report.step = j;
          report.kink = c;
          report.overlap = a;
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace holelab
