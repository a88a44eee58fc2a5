#include "holelab/map_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "holelab/errors.hpp"

namespace holelab {

namespace {

constexpr double kContinuityTol = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// 8-point Gauss-Legendre on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  static constexpr std::array<double, 4> nodes = {0.1834346424956498, 0.5255324099163290,
                                                  0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> weights = {0.3626837833783620, 0.3137066458778873,
                                                    0.2223810344533745, 0.1012285362903763};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += weights[i] * (f(mid - half * nodes[i]) + f(mid + half * nodes[i]));
  }
  return sum * half;
}

template <class F>
double composite_gauss(F&& f, double a, double b, int panels = 16) {
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int i = 0; i < panels; ++i) sum += gauss_legendre(f, a + i * w, a + (i + 1) * w);
  return sum;
}

// u log u - u, the antiderivative of log u, continuous at 0.
double xlogx_minus_x(double u) { return u > 0.0 ? u * std::log(u) - u : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Piece
// ---------------------------------------------------------------------------

double Piece::value(double x) const {
  return std::visit(
      Overloaded{
          [&](const AffineFormula& a) { return a.slope * x + a.intercept; },
          [&](const PowerFormula& p) {
            const double t = std::max(0.0, p.side * (x - p.center));
            return p.value + p.coef * std::pow(t, p.exponent);
          },
          [&](const ConstantFormula& c) { return c.value; },
          [&](const CustomFormula& c) { return c.f(x); },
      },
      formula_);
}

double Piece::derivative(double x) const {
  return std::visit(
      Overloaded{
          [&](const AffineFormula& a) { return a.slope; },
          [&](const PowerFormula& p) {
            const double t = std::max(0.0, p.side * (x - p.center));
            if (p.exponent == 1.0) return p.coef * p.side;
            return p.coef * p.exponent * std::pow(t, p.exponent - 1.0) * p.side;
          },
          [&](const ConstantFormula&) { return 0.0; },
          [&](const CustomFormula& c) { return c.df(x); },
      },
      formula_);
}

double Piece::second_derivative(double x) const {
  return std::visit(
      Overloaded{
          [&](const AffineFormula&) { return 0.0; },
          [&](const PowerFormula& p) {
            if (p.exponent == 1.0) return 0.0;
            const double t = std::max(0.0, p.side * (x - p.center));
            return p.coef * p.exponent * (p.exponent - 1.0) * std::pow(t, p.exponent - 2.0);
          },
          [&](const ConstantFormula&) { return 0.0; },
          [&](const CustomFormula& c) { return c.d2f ? c.d2f(x) : 0.0; },
      },
      formula_);
}

double Piece::inverse(double y) const {
  const double x = std::visit(
      Overloaded{
          [&](const AffineFormula& a) { return (y - a.intercept) / a.slope; },
          [&](const PowerFormula& p) {
            const double u = std::max(0.0, (y - p.value) / p.coef);
            return p.center + p.side * std::pow(u, 1.0 / p.exponent);
          },
          [&](const ConstantFormula&) { return 0.5 * (lo_ + hi_); },
          [&](const CustomFormula& c) {
            double a = lo_;
            double b = hi_;
            const bool increasing = c.f(b) >= c.f(a);
            for (int it = 0; it < 200 && b - a > 1e-16 * (1.0 + std::abs(a)); ++it) {
              const double m = 0.5 * (a + b);
              if ((c.f(m) < y) == increasing) {
                a = m;
              } else {
                b = m;
              }
            }
            return 0.5 * (a + b);
          },
      },
      formula_);
  return std::clamp(x, lo_, hi_);
}

double Piece::centered_integral(double a, double b, double ref) const {
  return std::visit(
      Overloaded{
          [&](const AffineFormula& f) { return (f.slope * (0.5 * (a + b)) + f.intercept - ref) * (b - a); },
          [&](const PowerFormula& p) {
            const double ta = std::max(0.0, p.side * (a - p.center));
            const double tb = std::max(0.0, p.side * (b - p.center));
            const double e = p.exponent + 1.0;
            return (p.value - ref) * (b - a) + p.coef * p.side * (std::pow(tb, e) - std::pow(ta, e)) / e;
          },
          [&](const ConstantFormula& c) { return (c.value - ref) * (b - a); },
          [&](const CustomFormula& c) {
            return composite_gauss([&](double x) { return c.f(x) - ref; }, a, b);
          },
      },
      formula_);
}

double Piece::log_derivative_integral(double a, double b) const {
  if (b <= a) return 0.0;
  return std::visit(
      Overloaded{
          [&](const AffineFormula& f) { return std::log(std::abs(f.slope)) * (b - a); },
          [&](const PowerFormula& p) {
            if (p.coef == 0.0) return kNegInf;
            const double base = std::log(std::abs(p.coef) * p.exponent) * (b - a);
            if (p.exponent == 1.0) return base;
            const double ta = std::max(0.0, p.side * (a - p.center));
            const double tb = std::max(0.0, p.side * (b - p.center));
            return base + (p.exponent - 1.0) * p.side * (xlogx_minus_x(tb) - xlogx_minus_x(ta));
          },
          [&](const ConstantFormula&) { return kNegInf; },
          [&](const CustomFormula& c) {
            return composite_gauss([&](double x) { return std::log(std::abs(c.df(x))); }, a, b);
          },
      },
      formula_);
}

// ---------------------------------------------------------------------------
// MapModel
// ---------------------------------------------------------------------------

const Piece& MapModel::piece_at(double x) const {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](double v, const Piece& p) { return v < p.lo(); });
  if (it == pieces.begin()) return pieces.front();
  return *std::prev(it);
}

double MapModel::eval_lifted(double x) const {
  const double r = phase.reduce(x);
  return piece_at(r).value(r);
}

double MapModel::eval(double x) const { return phase.reduce(eval_lifted(x)); }

double MapModel::derivative(double x) const {
  const double r = phase.reduce(x);
  return piece_at(r).derivative(r);
}

double MapModel::base_eval(double x) const {
  const double r = phase.reduce(x);
  auto it = std::upper_bound(base_pieces.begin(), base_pieces.end(), r,
                             [](double v, const Piece& p) { return v < p.lo(); });
  const Piece& p = it == base_pieces.begin() ? base_pieces.front() : *std::prev(it);
  return phase.reduce(p.value(r));
}

bool MapModel::in_hole(double x) const {
  if (!has_hole()) return false;
  return std::abs(phase.offset(x, hole.center)) < hole.radius;
}

double MapModel::hole_overlap(double a, double b) const {
  if (!has_hole() || b <= a) return 0.0;
  const double ha = hole.center - hole.radius;
  const double hb = hole.center + hole.radius;
  double total = 0.0;
  const int reach = phase.is_circle() ? 2 : 0;
  for (int s = -reach; s <= reach; ++s) {
    const double shift = s * phase.length();
    total += std::max(0.0, std::min(b, hb + shift) - std::max(a, ha + shift));
  }
  return std::min(total, b - a);
}

// ---------------------------------------------------------------------------
// build_map
// ---------------------------------------------------------------------------

namespace {

struct SinkSegment {
  double ta;
  double tb;
  enum class Shape { Affine, Constant, Power } shape;
  double y_a = 0.0;  // affine: value at ta; constant: value
  double y_b = 0.0;  // affine: value at tb
  double coef = 0.0;
  int side = 1;
};

Piece::Formula make_formula(const SinkSegment& s, double center, double v, double exponent) {
  switch (s.shape) {
    case SinkSegment::Shape::Affine: {
      const double slope = (s.y_b - s.y_a) / (s.tb - s.ta);
      return AffineFormula{slope, s.y_a - slope * (center + s.ta)};
    }
    case SinkSegment::Shape::Constant:
      return ConstantFormula{s.y_a};
    case SinkSegment::Shape::Power:
      return PowerFormula{v, s.coef, center, exponent, s.side};
  }
  return ConstantFormula{v};
}

std::vector<Piece> base_pieces_for(const MapSpec& spec) {
  std::vector<Piece> pieces;
  if (spec.base == "doubling") {
    if (!spec.phase.is_circle() || spec.phase.lo != 0.0 || spec.phase.hi != 1.0) {
      throw Error(ErrorKind::InvalidArgument, "the doubling map lives on the unit circle");
    }
    pieces.emplace_back(0.0, 1.0, AffineFormula{2.0, 0.0});
  } else if (spec.base == "tent") {
    const Piece left(0.0, 0.5, AffineFormula{2.0, 0.0});
    const Piece right(0.5, 1.0, AffineFormula{-2.0, 2.0});
    if (spec.phase.is_circle()) {
      if (spec.phase.lo != 0.0 || spec.phase.hi != 1.0) {
        throw Error(ErrorKind::InvalidArgument, "the tent circle map lives on [0, 1)");
      }
      pieces = {left, right};
    } else {
      const double lo = spec.phase.lo;
      const double hi = spec.phase.hi;
      if (lo < 0.0 || hi > 1.0 || lo >= hi) {
        throw Error(ErrorKind::InvalidArgument, "tent interval phase must lie inside [0, 1]");
      }
      if (lo < 0.5) pieces.push_back(left.restricted(lo, std::min(0.5, hi)));
      if (hi > 0.5) pieces.push_back(right.restricted(std::max(0.5, lo), hi));
    }
  } else if (spec.base == "custom") {
    for (const auto& b : spec.branches) {
      pieces.emplace_back(b.lo, b.hi, AffineFormula{b.slope, b.intercept});
    }
    for (const auto& p : spec.custom_pieces) pieces.push_back(p);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown base map '" + spec.base + "'");
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo() < b.lo(); });
  if (pieces.empty()) throw Error(ErrorKind::InvalidArgument, "map has no branches");

  const double tol = 1e-12 * spec.phase.length();
  if (std::abs(pieces.front().lo() - spec.phase.lo) > tol ||
      std::abs(pieces.back().hi() - spec.phase.hi) > tol) {
    throw Error(ErrorKind::InvalidArgument, "branches must tile the phase");
  }
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (std::abs(pieces[i].hi() - pieces[i + 1].lo()) > tol || pieces[i].hi() <= pieces[i].lo()) {
      throw Error(ErrorKind::InvalidArgument, "branches must tile the phase without gaps");
    }
  }
  return pieces;
}

const Piece& find_piece(const std::vector<Piece>& pieces, double x) {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](double v, const Piece& p) { return v < p.lo(); });
  return it == pieces.begin() ? pieces.front() : *std::prev(it);
}

void check_monotone(const Piece& p) {
  if (!std::holds_alternative<CustomFormula>(p.formula())) return;
  int sign = 0;
  for (int i = 0; i <= 200; ++i) {
    const double x = p.lo() + (p.hi() - p.lo()) * i / 200.0;
    const double d = p.derivative(x);
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    if (s != sign) throw Error(ErrorKind::InvalidArgument, "custom branches must be monotone");
  }
}

std::vector<double> base_kinks(const std::vector<Piece>& pieces, const Phase& phase) {
  std::vector<double> kinks;
  const std::size_t n = pieces.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool wrap = (i == 0);
    if (wrap && !phase.is_circle()) continue;
    const Piece& left = wrap ? pieces.back() : pieces[i - 1];
    const Piece& right = pieces[i];
    const double xl = wrap ? phase.hi : right.lo();
    const double xr = right.lo();
    const double vl = left.value(xl);
    const double vr = right.value(xr);
    const double jump = phase.is_circle() ? phase.offset(vl, vr) : vl - vr;
    const double dl = left.derivative(xl);
    const double dr = right.derivative(xr);
    if (std::abs(jump) > 1e-12 || std::abs(dl - dr) > 1e-9 * std::max(1.0, std::abs(dl))) {
      kinks.push_back(xr);
    }
  }
  return kinks;
}

}  // namespace

MapSpec builtin_spec(const std::string& name, double delta) {
  MapSpec spec;
  spec.name = name;
  spec.delta = delta;
  if (name == "doubling-e1") {
    spec.base = "doubling";
    spec.x0 = 0.0;
    spec.sink = {SinkKind::PlateauHalf, 1.0};
  } else if (name == "tent-e2") {
    spec.base = "tent";
    spec.x0 = 0.5;
    spec.sink = {SinkKind::Flat, 0.0};
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown builtin map '" + name + "'");
  }
  return spec;
}

MapModel build_map(const MapSpec& spec) {
  if (!(spec.phase.length() > 0.0)) throw Error(ErrorKind::InvalidArgument, "empty phase");
  if (!(spec.delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "hole radius must be >= 0");
  if (spec.sigma && !(*spec.sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be >= 0");
  if (spec.sink.kind == SinkKind::Power && spec.sink.exponent < 1.0) {
    throw Error(ErrorKind::InvalidArgument, "sink exponent must be >= 1");
  }

  MapModel m;
  m.name = spec.name.empty() ? spec.base : spec.name;
  m.phase = spec.phase;
  m.base_pieces = base_pieces_for(spec);
  for (const auto& p : m.base_pieces) check_monotone(p);
  m.hole = {m.phase.is_circle() ? m.phase.reduce(spec.x0) : spec.x0, spec.delta};
  m.sink = spec.sink;
  const Phase& phase = m.phase;
  const double len = phase.length();
  const double x0 = m.hole.center;
  const double delta = spec.delta;

  if (delta > 0.0 && phase.is_circle() && 2.0 * delta >= len) {
    throw Error(ErrorKind::InvalidArgument, "hole covers the circle");
  }
  if (delta > 0.0 && !phase.is_circle() && (x0 - delta < phase.lo || x0 + delta > phase.hi)) {
    throw Error(ErrorKind::InvalidArgument, "hole must lie inside the interval phase");
  }

  auto base_lifted = [&](double x) {
    const double r = phase.reduce(x);
    return find_piece(m.base_pieces, r).value(r);
  };

  std::vector<SinkSegment> segments;
  double v = 0.0;
  double f_left = 0.0;
  double f_right = 0.0;
  if (delta > 0.0 && spec.sink.kind != SinkKind::None) {
    v = base_lifted(x0);
    f_right = base_lifted(x0 + delta);
    f_left = base_lifted(x0 - delta);
    if (phase.is_circle()) {
      f_right = v + phase.offset(f_right, v);
      f_left = v + phase.offset(f_left, v);
    }
    switch (spec.sink.kind) {
      case SinkKind::PlateauHalf:
        segments.push_back({-delta, -0.5 * delta, SinkSegment::Shape::Affine, f_left, v});
        segments.push_back({-0.5 * delta, 0.5 * delta, SinkSegment::Shape::Constant, v, v});
        segments.push_back({0.5 * delta, delta, SinkSegment::Shape::Affine, v, f_right});
        break;
      case SinkKind::Flat: {
        const double gap = phase.is_circle() ? phase.offset(f_left, f_right) : f_left - f_right;
        if (std::abs(gap) > kContinuityTol) {
          throw Error(ErrorKind::ContinuityViolation,
                      "flat sink cannot match f(x0 - delta) and f(x0 + delta)");
        }
        segments.push_back({-delta, delta, SinkSegment::Shape::Constant, f_right, f_right});
        break;
      }
      case SinkKind::Power: {
        const double scale = std::pow(delta, spec.sink.exponent);
        SinkSegment left{-delta, 0.0, SinkSegment::Shape::Power};
        left.coef = (f_left - v) / scale;
        left.side = -1;
        SinkSegment right{0.0, delta, SinkSegment::Shape::Power};
        right.coef = (f_right - v) / scale;
        right.side = 1;
        segments.push_back(left);
        segments.push_back(right);
        break;
      }
      case SinkKind::None:
        break;
    }
  }

  // Splice the sink fragments into the base tiling.
  std::vector<Piece> hole_pieces;
  std::vector<std::pair<double, double>> hole_ranges;
  for (const auto& seg : segments) {
    const int reach = phase.is_circle() ? 1 : 0;
    for (int s = -reach; s <= reach; ++s) {
      const double shift = s * len;
      const double a = std::max(x0 + seg.ta + shift, phase.lo);
      const double b = std::min(x0 + seg.tb + shift, phase.hi);
      if (b - a <= 1e-15 * len) continue;
      hole_pieces.emplace_back(a, b, make_formula(seg, x0 + shift, v, spec.sink.exponent), true);
      hole_ranges.emplace_back(a, b);
    }
  }
  std::sort(hole_ranges.begin(), hole_ranges.end());

  for (const auto& p : m.base_pieces) {
    double cursor = p.lo();
    for (const auto& [a, b] : hole_ranges) {
      if (b <= cursor || a >= p.hi()) continue;
      if (a - cursor > 1e-15 * len) m.pieces.push_back(p.restricted(cursor, a));
      cursor = std::max(cursor, b);
    }
    if (p.hi() - cursor > 1e-15 * len) m.pieces.push_back(p.restricted(cursor, p.hi()));
  }
  for (auto& p : hole_pieces) m.pieces.push_back(std::move(p));
  std::sort(m.pieces.begin(), m.pieces.end(), [](const Piece& a, const Piece& b) { return a.lo() < b.lo(); });

  // Continuity at the hole endpoints.
  if (!segments.empty()) {
    auto g_at = [&](double t) {
      for (const auto& seg : segments) {
        if (t >= seg.ta && t <= seg.tb) {
          const Piece piece(x0 + seg.ta, x0 + seg.tb, make_formula(seg, x0, v, spec.sink.exponent));
          return piece.value(x0 + t);
        }
      }
      return v;
    };
    for (const double sgn : {-1.0, 1.0}) {
      const double g = g_at(sgn * delta);
      const double f = sgn > 0 ? f_right : f_left;
      const double gap = phase.is_circle() ? phase.offset(g, f) : g - f;
      if (!(std::abs(gap) <= kContinuityTol)) {
        throw Error(ErrorKind::ContinuityViolation, "sink does not match f at the hole endpoints");
      }
    }
  }

  // Expansion and derivative bounds.
  auto sampled_extremes = [](const Piece& p, auto&& fn, double& lo, double& hi) {
    if (p.is_affine()) {
      const double v0 = fn(p, 0.5 * (p.lo() + p.hi()));
      lo = std::min(lo, v0);
      hi = std::max(hi, v0);
      return;
    }
    for (int i = 0; i <= 1000; ++i) {
      const double val = fn(p, p.lo() + (p.hi() - p.lo()) * i / 1000.0);
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  };
  auto abs_d1 = [](const Piece& p, double x) { return std::abs(p.derivative(x)); };
  auto abs_d2 = [](const Piece& p, double x) { return std::abs(p.second_derivative(x)); };

  double lam = std::numeric_limits<double>::infinity();
  double unused = 0.0;
  double c2 = 0.0;
  for (const auto& p : m.pieces) {
    if (p.in_hole()) continue;
    double lo_piece = std::numeric_limits<double>::infinity();
    double hi_piece = 0.0;
    if (m.has_hole() && spec.sink.kind == SinkKind::None) {
      // Sample only the part of the piece outside the hole.
      for (int i = 0; i <= 1000; ++i) {
        const double x = p.lo() + (p.hi() - p.lo()) * i / 1000.0;
        if (m.in_hole(x)) continue;
        lo_piece = std::min(lo_piece, abs_d1(p, x));
      }
    } else {
      sampled_extremes(p, abs_d1, lo_piece, hi_piece);
    }
    lam = std::min(lam, lo_piece);
    double c2_lo = std::numeric_limits<double>::infinity();
    sampled_extremes(p, abs_d2, c2_lo, c2);
  }
  double m_lo = std::numeric_limits<double>::infinity();
  double m_hi = 0.0;
  for (const auto& p : m.base_pieces) sampled_extremes(p, abs_d1, m_lo, m_hi);
  (void)unused;
  m.lambda_min = lam;
  m.m_sup = m_hi;
  m.c2_bound = c2;
  if (!(m.lambda_min > 1.0)) {
    throw Error(ErrorKind::ExpansionViolation, "|f'| <= 1 outside the hole (inf = " +
                                                   std::to_string(m.lambda_min) + ")");
  }

  // Interval phases must trap the noisy images.
  if (!phase.is_circle()) {
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto& p : m.pieces) {
      for (const double x : {p.lo(), p.hi()}) {
        ymin = std::min(ymin, p.value(x));
        ymax = std::max(ymax, p.value(x));
      }
      if (!p.is_affine() && !p.is_constant()) {
        for (int i = 1; i < 64; ++i) {
          const double y = p.value(p.lo() + (p.hi() - p.lo()) * i / 64.0);
          ymin = std::min(ymin, y);
          ymax = std::max(ymax, y);
        }
      }
    }
    const double sigma = spec.sigma.value_or(0.0);
    const double tol = 1e-12 * len;
    if (ymin - sigma < phase.lo - tol || ymax + sigma > phase.hi + tol) {
      throw Error(ErrorKind::PhaseLeak, "f_delta(I) + [-sigma, sigma] leaves I = [" +
                                            std::to_string(phase.lo) + ", " + std::to_string(phase.hi) + "]");
    }
  }

  for (double k : base_kinks(m.base_pieces, phase)) {
    if (!m.in_hole(k)) m.kinks.push_back(k);
  }

  if (spec.period) {
    m.period = *spec.period;
  } else {
    double x = x0;
    for (int p = 1; p <= 64; ++p) {
      x = m.base_eval(x);
      const double d = phase.is_circle() ? phase.offset(x, x0) : x - x0;
      if (std::abs(d) < 1e-9) {
        m.period = p;
        break;
      }
    }
  }
  return m;
}

double eval_noisy(const MapModel& m, const NoiseModel&, double x, double w) {
  return m.phase.reduce(m.eval_lifted(x) + w);
}

bool hole_has_fixed_point(const MapModel& m) {
  if (!m.has_hole()) return false;
  constexpr int samples = 4096;
  const double x0 = m.hole.center;
  const double delta = m.hole.radius;
  double prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = x0 - delta + 2.0 * delta * i / samples;
    const double fx = m.eval(x);
    const double d = m.phase.is_circle() ? m.phase.offset(fx, m.phase.reduce(x)) : fx - x;
    if (d == 0.0) return true;
    if (i > 0 && (d > 0.0) != (prev > 0.0) && std::abs(d - prev) < 0.25 * m.phase.length()) return true;
    prev = d;
  }
  return false;
}

AdmissibilityReport check_admissible(const MapModel& m, const NoiseModel& noise) {
  AdmissibilityReport r;
  r.circle = m.phase.is_circle();
  r.period = m.period;
  r.periodic = m.period >= 1;
  if (!m.has_hole()) return r;

  const double x0 = m.hole.center;
  const double delta = m.hole.radius;
  const double v = m.base_eval(x0);
  const double g0 = m.eval(x0);
  const bool matches = std::abs(m.phase.offset(g0, v)) < 1e-12;
  const double slope0 = m.derivative(x0);
  r.exponent = m.sink.kind == SinkKind::Power ? m.sink.exponent : 0.0;
  const bool flat_at_x0 = std::abs(slope0) < 1e-12 &&
                          (m.sink.kind == SinkKind::PlateauHalf ||
                           (m.sink.kind == SinkKind::Power && m.sink.exponent > 1.0));
  r.superattracting = matches && flat_at_x0;

  // Range condition: compare hull of g(B) and f(B) measured from f(x0).
  auto hull = [&](auto&& fn) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
      const double x = x0 - delta + 2.0 * delta * i / samples;
      const double y = m.phase.offset(fn(x), v);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    return std::pair{lo, hi};
  };
  const auto [glo, ghi] = hull([&](double x) { return m.eval(x); });
  const auto [flo, fhi] = hull([&](double x) { return m.base_eval(x); });
  r.range_condition = std::abs(glo - flo) < 1e-9 && std::abs(ghi - fhi) < 1e-9;
  r.noise_condition = r.periodic && noise.sigma * std::pow(m.lambda_min, m.period - 1) >= 2.0 * delta;
  return r;
}

}  // namespace holelab
