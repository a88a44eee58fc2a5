#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holelab/phase.hpp"

namespace holelab {

// ---------------------------------------------------------------------------
// Branch formulas. A piece is one monotone branch of f_delta on [lo, hi] in
// fundamental-domain coordinates. Values are lifted reals: on the circle they
// are reduced modulo the phase length only when a point is produced.
// ---------------------------------------------------------------------------

struct AffineFormula {
  double slope = 1.0;
  double intercept = 0.0;
};

// v + coef * |x - center|^exponent on one side of center (side = +1 right,
// -1 left). This is the power-profile sink.
struct PowerFormula {
  double value = 0.0;
  double coef = 0.0;
  double center = 0.0;
  double exponent = 2.0;
  int side = 1;
};

struct ConstantFormula {
  double value = 0.0;
};

// User-supplied smooth monotone branch. Inverse and integrals fall back to
// bisection and Gauss-Legendre quadrature.
struct CustomFormula {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

class Piece {
 public:
  using Formula = std::variant<AffineFormula, PowerFormula, ConstantFormula, CustomFormula>;

  Piece(double lo, double hi, Formula formula, bool in_hole = false)
      : lo_(lo), hi_(hi), formula_(std::move(formula)), in_hole_(in_hole) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool in_hole() const { return in_hole_; }
  const Formula& formula() const { return formula_; }
  bool is_constant() const { return std::holds_alternative<ConstantFormula>(formula_); }
  bool is_affine() const { return std::holds_alternative<AffineFormula>(formula_); }

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  // Preimage of y inside [lo, hi]; y must lie in the closed image.
  double inverse(double y) const;

  // Integral over [a, b] of (value(x) - ref).
  double centered_integral(double a, double b, double ref) const;

  // Integral over [a, b] of log|value'(x)|; -infinity on constant pieces.
  double log_derivative_integral(double a, double b) const;

  Piece restricted(double lo, double hi) const { return Piece(lo, hi, formula_, in_hole_); }

 private:
  double lo_;
  double hi_;
  Formula formula_;
  bool in_hole_;
};

// ---------------------------------------------------------------------------
// Model and noise
// ---------------------------------------------------------------------------

enum class SinkKind {
  None,         // f_delta = f; the hole only conditions
  PlateauHalf,  // constant f(x0) on B_{delta/2}, affine connectors (doubling-e1)
  Flat,         // constant on all of B_delta (tent-e2 flat top)
  Power,        // f(x0) + c_{+-} |x - x0|^l, continuity-matched per side
};

struct SinkProfile {
  SinkKind kind = SinkKind::None;
  double exponent = 2.0;
};

struct Hole {
  double center = 0.0;
  double radius = 0.0;
};

struct NoiseModel {
  double sigma = 0.0;

  double density(double w) const { return (w >= -sigma && w <= sigma) ? 0.5 / sigma : 0.0; }
};

struct MapModel {
  std::string name;
  Phase phase;
  std::vector<Piece> pieces;       // f_delta, sorted, tiling the phase
  std::vector<Piece> base_pieces;  // unmodified f
  Hole hole;
  SinkProfile sink;
  int period = 0;  // period of x0 under f; 0 when no period <= 64 was found
  double lambda_min = 0.0;  // inf |f'| outside the hole
  double m_sup = 0.0;       // sup |f'|
  double c2_bound = 0.0;    // sup |f''| outside the hole
  std::vector<double> kinks;  // points of X \ H where the base map is not differentiable

  bool has_hole() const { return hole.radius > 0.0; }

  const Piece& piece_at(double x) const;  // x in the fundamental domain
  double eval_lifted(double x) const;     // f_delta(x) before reduction
  double eval(double x) const;            // f_delta(x) reduced to the phase
  double derivative(double x) const;
  double base_eval(double x) const;  // f(x) reduced to the phase

  bool in_hole(double x) const;
  // Lebesgue measure of [a, b] (fundamental-domain coordinates) inside the hole.
  double hole_overlap(double a, double b) const;
};

struct AffineBranch {
  double lo = 0.0;
  double hi = 1.0;
  double slope = 2.0;
  double intercept = 0.0;
};

// Structured description consumed by build_map.
struct MapSpec {
  std::string base = "doubling";      // "doubling", "tent" or "custom"
  std::vector<AffineBranch> branches;  // custom affine branches
  std::vector<Piece> custom_pieces;    // custom smooth branches (API only)
  Phase phase = Phase::circle();
  double x0 = 0.0;
  double delta = 0.0;
  SinkProfile sink;
  std::optional<double> sigma;  // noise the caller intends; enables PhaseLeak checks
  std::optional<int> period;
  std::string name;
};

// Presets: "doubling-e1" (x0 = 0, plateau on B_{delta/2}) and "tent-e2"
// (x0 = 1/2, flat top 1 - 2 delta). Throws InvalidArgument on unknown names.
MapSpec builtin_spec(const std::string& name, double delta);

MapModel build_map(const MapSpec& spec);

// f_delta(x) + w reduced to the phase.
double eval_noisy(const MapModel& m, const NoiseModel& noise, double x, double w);

// Returns true when some point of the hole is a fixed point of f_delta.
bool hole_has_fixed_point(const MapModel& m);

struct AdmissibilityReport {
  bool circle = false;
  bool periodic = false;
  bool superattracting = false;  // g(x0) = f(x0), g'(x0) = 0
  bool range_condition = false;  // g(B) = f(B)
  bool noise_condition = false;  // sigma lambda^{p-1} >= 2 delta
  int period = 0;
  double exponent = 0.0;

  bool admissible() const {
    return circle && periodic && superattracting && range_condition && noise_condition;
  }
};

AdmissibilityReport check_admissible(const MapModel& m, const NoiseModel& noise);

}  // namespace holelab
