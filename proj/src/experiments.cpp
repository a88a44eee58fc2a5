#include "holelab/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "holelab/errors.hpp"
#include "holelab/observables.hpp"
#include "holelab/operators.hpp"
#include "holelab/reachability.hpp"
#include "holelab/spectral.hpp"

namespace holelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kObservables = {"spectral", "u", "lyapunov", "diagnostics", "grid_check"};

const std::set<std::string> kKeys = {
    "map",   "phase",  "interval",    "branch", "x0",    "sink",   "sink_exponent", "period",
    "sigma", "sigmas", "sigma_range", "delta",  "deltas", "delta_range", "points", "grid",
    "grids", "seed",   "seeds",       "observables", "output", "timing", "workers"};

SinkKind parse_sink(const std::string& text) {
  if (text == "none") return SinkKind::None;
  if (text == "plateau-half") return SinkKind::PlateauHalf;
  if (text == "flat") return SinkKind::Flat;
  if (text == "power") return SinkKind::Power;
  throw Error(ErrorKind::PlanInvalid, "sink: expected none, plateau-half, flat or power, got '" + text + "'");
}

std::vector<double> collect(const Config& c, const std::string& single, const std::string& list,
                            const std::string& range) {
  std::vector<double> out;
  if (auto v = c.get(single)) out.push_back(parse_number(single, *v));
  if (auto v = c.get(list)) {
    for (double x : parse_numbers(list, *v)) out.push_back(x);
  }
  if (auto v = c.get(range)) {
    for (double x : parse_geometric_range(range, *v)) out.push_back(x);
  }
  return out;
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Column {
  const char* name;
  double ResultRow::*field;
};

constexpr Column kDoubleColumns[] = {
    {"sigma", &ResultRow::sigma},         {"delta", &ResultRow::delta},       {"lambda", &ResultRow::lambda},
    {"rho_q_l1", &ResultRow::rho_q_l1},   {"rho_q_bv", &ResultRow::rho_q_bv}, {"u_q_bv", &ResultRow::u_q_bv},
    {"R_l1", &ResultRow::R_l1},           {"R_bv", &ResultRow::R_bv},         {"defect", &ResultRow::defect},
    {"xi", &ResultRow::xi},               {"xi_finite", &ResultRow::xi_finite}, {"r", &ResultRow::r},
    {"a1", &ResultRow::a1},               {"a2_lower", &ResultRow::a2_lower}, {"a2_upper", &ResultRow::a2_upper},
    {"a3", &ResultRow::a3},               {"runtime_s", &ResultRow::runtime_s},
};

}  // namespace

MapSpec ExperimentPlan::map_spec(double sigma, double delta) const {
  MapSpec spec;
  if (map == "doubling-e1" || map == "tent-e2") {
    spec = builtin_spec(map, delta);
  } else if (map == "doubling" || map == "tent" || map == "custom") {
    spec.base = map;
    spec.name = map;
    spec.delta = delta;
  } else {
    throw Error(ErrorKind::PlanInvalid, "unknown map '" + map + "'");
  }
  if (phase) spec.phase = *phase;
  spec.branches = branches;
  if (x0) spec.x0 = *x0;
  if (sink) spec.sink.kind = *sink;
  if (sink_exponent) spec.sink.exponent = *sink_exponent;
  if (period) spec.period = *period;
  spec.sigma = sigma;
  return spec;
}

int auto_grid(const Phase& phase, double sigma, double delta) {
  const double scale = delta > 0.0 ? std::min(sigma, delta) : sigma;
  if (!(scale > 0.0)) throw Error(ErrorKind::PlanInvalid, "cannot size a grid without positive sigma");
  int n = 16;
  while (phase.length() / n > scale / 4.0) {
    if (n >= (1 << 22)) throw Error(ErrorKind::PlanInvalid, "automatic grid would exceed 2^22 cells");
    n *= 2;
  }
  return n;
}

std::vector<PlanPoint> ExperimentPlan::expand() const {
  std::vector<PlanPoint> out;
  const Phase ph = phase.value_or(map_spec(1.0, 0.0).phase);
  for (const auto& [sigma, delta] : points) {
    for (int n : grids) {
      for (auto seed : seeds) out.push_back({sigma, delta, n > 0 ? n : auto_grid(ph, sigma, delta), seed});
    }
  }
  return out;
}

ExperimentPlan plan_from_config(const Config& config) {
  for (const auto& [key, value] : config.entries()) {
    if (!kKeys.count(key)) throw Error(ErrorKind::PlanInvalid, "unknown key '" + key + "'");
  }
  ExperimentPlan plan;
  if (auto v = config.get("map")) plan.map = *v;
  if (auto v = config.get("phase")) {
    if (*v == "circle") {
      plan.phase = Phase::circle();
    } else if (*v == "interval") {
      const auto bounds = parse_numbers("interval", config.get("interval").value_or("0,1"));
      if (bounds.size() != 2) throw Error(ErrorKind::PlanInvalid, "interval: expected lo,hi");
      plan.phase = Phase::interval(bounds[0], bounds[1]);
    } else {
      throw Error(ErrorKind::PlanInvalid, "phase: expected circle or interval");
    }
  }
  for (const auto& b : config.get_all("branch")) {
    const auto v = parse_numbers("branch", b);
    if (v.size() != 4) throw Error(ErrorKind::PlanInvalid, "branch: expected lo,hi,slope,intercept");
    plan.branches.push_back({v[0], v[1], v[2], v[3]});
  }
  if (auto v = config.get("x0")) plan.x0 = parse_number("x0", *v);
  if (auto v = config.get("sink")) plan.sink = parse_sink(*v);
  if (auto v = config.get("sink_exponent")) plan.sink_exponent = parse_number("sink_exponent", *v);
  if (auto v = config.get("period")) plan.period = static_cast<int>(parse_integer("period", *v));

  auto sigmas = collect(config, "sigma", "sigmas", "sigma_range");
  auto deltas = collect(config, "delta", "deltas", "delta_range");
  if (auto v = config.get("points")) {
    if (!sigmas.empty() || !deltas.empty()) {
      throw Error(ErrorKind::PlanInvalid, "points cannot be combined with sigma or delta lists");
    }
    for (const auto& item : split_list(*v)) {
      const auto pair = parse_numbers("points", [&] {
        std::string s = item;
        for (char& ch : s) {
          if (ch == ':') ch = ',';
        }
        return s;
      }());
      if (pair.size() != 2) throw Error(ErrorKind::PlanInvalid, "points: expected sigma:delta items");
      plan.points.emplace_back(pair[0], pair[1]);
    }
  } else {
    if (deltas.empty()) deltas.push_back(0.0);
    for (double s : sigmas) {
      for (double d : deltas) plan.points.emplace_back(s, d);
    }
  }

  std::vector<std::string> grid_items;
  if (auto v = config.get("grid")) grid_items.push_back(*v);
  if (auto v = config.get("grids")) {
    for (const auto& item : split_list(*v)) grid_items.push_back(item);
  }
  if (!grid_items.empty()) {
    plan.grids.clear();
    for (const auto& item : grid_items) {
      plan.grids.push_back(item == "auto" ? 0 : static_cast<int>(parse_integer("grid", item)));
    }
  }
  std::vector<std::uint64_t> seeds;
  if (auto v = config.get("seed")) seeds.push_back(static_cast<std::uint64_t>(parse_integer("seed", *v)));
  if (auto v = config.get("seeds")) {
    for (const auto& item : split_list(*v)) seeds.push_back(static_cast<std::uint64_t>(parse_integer("seeds", item)));
  }
  if (!seeds.empty()) plan.seeds = seeds;
  if (auto v = config.get("observables")) {
    plan.observables = {"spectral"};
    for (const auto& item : split_list(*v)) {
      if (!kObservables.count(item)) throw Error(ErrorKind::PlanInvalid, "observables: unknown '" + item + "'");
      plan.observables.insert(item);
    }
  }
  if (auto v = config.get("output")) plan.output = *v;
  if (auto v = config.get("timing")) plan.timing = parse_bool("timing", *v);
  if (auto v = config.get("workers")) plan.workers = static_cast<int>(parse_integer("workers", *v));
  return plan;
}

void validate_plan(const ExperimentPlan& plan) {
  std::vector<std::string> problems;
  if (plan.points.empty()) problems.push_back("no (sigma, delta) points");
  if (plan.workers < 1) problems.push_back("workers must be >= 1");
  for (int n : plan.grids) {
    if (n != 0 && n < 16) problems.push_back("grid sizes must be >= 16 or auto");
  }
  if (problems.empty()) {
    for (const auto& [sigma, delta] : plan.points) {
      char label[64];
      std::snprintf(label, sizeof label, "(sigma=%g, delta=%g): ", sigma, delta);
      if (!(sigma > 0.0)) {
        problems.push_back(std::string(label) + "sigma must be positive");
        continue;
      }
      if (!(delta >= 0.0)) {
        problems.push_back(std::string(label) + "delta must be >= 0");
        continue;
      }
      try {
        const MapModel m = build_map(plan.map_spec(sigma, delta));
        const double scale = delta > 0.0 ? std::min(sigma, delta) : sigma;
        for (int n : plan.grids) {
          const int cells = n > 0 ? n : auto_grid(m.phase, sigma, delta);
          if (m.phase.length() / cells > scale * (1.0 + 1e-12) / 4.0) {
            problems.push_back(std::string(label) + "grid " + std::to_string(cells) +
                               " violates h <= min(sigma, delta)/4");
          }
        }
      } catch (const Error& e) {
        problems.push_back(std::string(label) + e.what());
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "plan rejected: ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw Error(ErrorKind::PlanInvalid, msg);
  }
}

ResultRow run_point(const ExperimentPlan& plan, const PlanPoint& point) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.sigma = point.sigma;
  row.delta = point.delta;
  row.n = point.n;
  row.seed = point.seed;
  for (const auto& col : kDoubleColumns) {
    if (std::string_view(col.name) != "sigma" && std::string_view(col.name) != "delta") row.*(col.field) = kNaN;
  }
  std::vector<std::string> flags;
  try {
    const MapModel m = build_map(plan.map_spec(point.sigma, point.delta));
    const NoiseModel noise{point.sigma};
    const Grid grid(m.phase, point.n);

    const GapTime gap = gap_time(m, noise);
    row.k = gap.k;
    if (gap.cap_hit) flags.push_back("CapHit");

    const UlamOperator L = assemble_annealed(m, noise, grid);
    const auto mask = hole_mask(m, grid);
    const UlamOperator R = assemble_conditioned(L, mask);
    const SpectralResult rho = stationary_density(L);
    const SpectralResult q = qsd_eigenpair(R);
    row.lambda = q.eigenvalue;
    const Distance dist = bv_distance(rho.density, q.density);
    row.rho_q_l1 = dist.l1;
    row.rho_q_bv = dist.bv;
    row.a3 = bv_norm(q.density.values, grid);

    const bool fixed_regime = !m.has_hole() || hole_has_fixed_point(m);
    flags.push_back(fixed_regime ? "FixedPointRegime" : "InducedRegime");

    std::optional<UlamOperator> Q;
    std::optional<SpectralResult> u;
    auto induced = [&] {
      if (!Q) {
        Q = assemble_q(L, mask, gap.k);
        u = q_fixed_point(*Q);
      }
    };
    if (!fixed_regime && plan.wants("u")) {
      induced();
      row.u_q_bv = bv_distance(u->density, q.density).bv;
      const Reconstruction rec = reconstruct_rho(u->density, L, mask, gap.k);
      row.R_l1 = rec.residual_l1;
      row.R_bv = rec.residual_bv;
      row.defect = rec.defect;
    }

    if (plan.wants("lyapunov")) {
      const Lyapunov ly = lyapunov(m, rho.density);
      row.xi = ly.xi;
      row.xi_finite = ly.finite_part;
      if (ly.neg_inf) flags.push_back("NegInfXi");
      try {
        const UlamOperator det = assemble_deterministic(m, grid);
        SolverOptions opts;
        opts.max_iter = 100'000;
        const SpectralResult mu0 = stationary_density(det, opts);
        row.r = row.xi - base_lyapunov(m, mu0.density).xi;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoConvergence) throw;
        flags.push_back("Xi0Unavailable");
      }
    }

    if (plan.wants("diagnostics")) {
      DiagnosticOptions opts;
      opts.seed = point.seed;
      Diagnostics diag;
      if (fixed_regime) {
        diag = diagnostic_norms(L, rho.density, R, q.eigenvalue, q.density, opts);
      } else {
        induced();
        diag = diagnostic_norms(*Q, u->density, R, q.eigenvalue, q.density, opts);
      }
      row.a1 = diag.a1;
      row.a2_lower = diag.a2_lower;
      row.a2_upper = diag.a2_upper;
      row.a3 = diag.a3;
    }

    if (plan.wants("grid_check")) {
      const Grid fine(m.phase, 2 * point.n);
      const UlamOperator L2 = assemble_annealed(m, noise, fine);
      const double lambda2 = qsd_eigenpair(assemble_conditioned(L2, hole_mask(m, fine))).eigenvalue;
      if (std::abs(lambda2 - q.eigenvalue) > 1e-3 * q.eigenvalue) flags.push_back("GridSensitive");
    }
  } catch (const Error& e) {
    row.error = sanitize(e.what());
  } catch (const std::exception& e) {
    row.error = sanitize(std::string("internal: ") + e.what());
  }
  row.flags = join(flags, '|');
  if (plan.timing) {
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
  validate_plan(plan);
  const auto points = plan.expand();
  std::vector<ResultRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) rows[i] = run_point(plan, points[i]);
  };
  const int threads = std::min<int>(plan.workers, static_cast<int>(points.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<std::string> csv_columns(bool timing) {
  std::vector<std::string> cols = {"sigma", "delta",  "n",        "seed",     "k",        "lambda", "rho_q_l1",
                                   "rho_q_bv", "u_q_bv", "R_l1", "R_bv",     "defect",   "xi",     "xi_finite",
                                   "r",     "a1",     "a2_lower", "a2_upper", "a3"};
  if (timing) cols.push_back("runtime_s");
  cols.push_back("flags");
  cols.push_back("error");
  return cols;
}

void write_csv(const std::vector<ResultRow>& rows, bool timing, std::ostream& out) {
  out << join(csv_columns(timing), ',') << '\n';
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& name : csv_columns(timing)) {
      if (name == "n") {
        cells.push_back(std::to_string(row.n));
      } else if (name == "seed") {
        cells.push_back(std::to_string(row.seed));
      } else if (name == "k") {
        cells.push_back(std::to_string(row.k));
      } else if (name == "flags") {
        cells.push_back(row.flags);
      } else if (name == "error") {
        cells.push_back(row.error);
      } else {
        cells.push_back(format_number(row_value(row, name)));
      }
    }
    out << join(cells, ',') << '\n';
  }
}

double row_value(const ResultRow& row, std::string_view column) {
  if (column == "n") return row.n;
  if (column == "seed") return static_cast<double>(row.seed);
  if (column == "k") return row.k;
  for (const auto& col : kDoubleColumns) {
    if (column == col.name) return row.*(col.field);
  }
  return kNaN;
}

ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit needs >= 2 paired points");
  const std::size_t n = x.size();
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorKind::InvalidArgument, "log-log fit needs positive finite values");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 1e-300) throw Error(ErrorKind::DegenerateFit, "zero variance in x");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

ScalingFit fit_scaling(const std::vector<ResultRow>& rows, std::string_view x, std::string_view y) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : rows) {
    if (!row.error.empty()) continue;
    xs.push_back(row_value(row, x));
    ys.push_back(row_value(row, y));
  }
  if (xs.size() < 4) throw Error(ErrorKind::InvalidArgument, "fit_scaling needs >= 4 rows without errors");
  return fit_loglog(xs, ys);
}

int sign_changes(const std::vector<ResultRow>& rows, std::string_view column) {
  int changes = 0;
  int last = 0;
  for (const auto& row : rows) {
    const double v = row_value(row, column);
    if (std::isnan(v) || v == 0.0) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace holelab
