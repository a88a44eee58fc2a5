#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "holelab/config.hpp"
#include "holelab/map_model.hpp"

namespace holelab {

struct PlanPoint {
  double sigma = 0.0;
  double delta = 0.0;
  int n = 0;  // 0: smallest power of two with h <= min(sigma, delta)/4
  std::uint64_t seed = 1;
};

struct ExperimentPlan {
  std::string map = "doubling-e1";  // builtin preset or base map name
  std::optional<Phase> phase;
  std::vector<AffineBranch> branches;
  std::optional<double> x0;
  std::optional<SinkKind> sink;
  std::optional<double> sink_exponent;
  std::optional<int> period;

  std::vector<std::pair<double, double>> points;  // (sigma, delta) in plan order
  std::vector<int> grids = {0};
  std::vector<std::uint64_t> seeds = {1};
  std::set<std::string> observables = {"spectral", "u", "lyapunov"};
  std::string output;
  bool timing = false;
  int workers = 1;

  MapSpec map_spec(double sigma, double delta) const;
  // Expanded rows: points x grids x seeds, grids resolved.
  std::vector<PlanPoint> expand() const;
  bool wants(const std::string& observable) const { return observables.count(observable) > 0; }
};

// Keys: map, phase, interval, branch, x0, sink, sink_exponent, period,
// sigma/sigmas/sigma_range, delta/deltas/delta_range, points, grid/grids,
// seed/seeds, observables, output, timing, workers.
ExperimentPlan plan_from_config(const Config& config);

// Smallest power of two n >= 16 with cell width <= min(sigma, delta)/4.
int auto_grid(const Phase& phase, double sigma, double delta);

struct ResultRow {
  double sigma = 0.0;
  double delta = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  int k = 0;
  double lambda = 0.0;
  double rho_q_l1 = 0.0;
  double rho_q_bv = 0.0;
  double u_q_bv = 0.0;
  double R_l1 = 0.0;
  double R_bv = 0.0;
  double defect = 0.0;
  double xi = 0.0;
  double xi_finite = 0.0;
  double r = 0.0;
  double a1 = 0.0;
  double a2_lower = 0.0;
  double a2_upper = 0.0;
  double a3 = 0.0;
  double runtime_s = 0.0;
  std::string flags;
  std::string error;
};

// Throws PlanInvalid when any point fails validation; nothing runs then.
void validate_plan(const ExperimentPlan& plan);

ResultRow run_point(const ExperimentPlan& plan, const PlanPoint& point);

// One row per expanded point, in plan order. Per-point failures become rows
// with the error column set.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan);

std::vector<std::string> csv_columns(bool timing);
void write_csv(const std::vector<ResultRow>& rows, bool timing, std::ostream& out);

// Numeric column by CSV name; NaN when the column is not numeric.
double row_value(const ResultRow& row, std::string_view column);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares on (ln x, ln y).
ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
ScalingFit fit_scaling(const std::vector<ResultRow>& rows, std::string_view x, std::string_view y);

// Sign changes of a column along the rows, ignoring NaN entries.
int sign_changes(const std::vector<ResultRow>& rows, std::string_view column);

}  // namespace holelab
