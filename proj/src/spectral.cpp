#include "holelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "holelab/errors.hpp"

namespace holelab {

namespace {

double mass_of(std::span<const double> v, double h) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * h;
}

SpectralResult power_iterate(const UlamOperator& op, const SolverOptions& opts, bool unit_eigenvalue,
                             const char* what) {
  const Grid& grid = op.grid();
  const double h = grid.h();
  std::vector<double> d(static_cast<std::size_t>(grid.n), 1.0 / grid.phase.length());
  std::vector<double> y(d.size());
  SpectralResult result;
  for (long it = 0; it < opts.max_iter; ++it) {
    op.apply(d, y);
    const double lam = mass_of(y, h);
    if (!(lam > 0.0)) {
      throw Error(ErrorKind::ZeroOperator, std::string(what) + ": iterate lost all mass after " +
                                               std::to_string(it + 1) + " steps");
    }
    const double eig = unit_eigenvalue ? 1.0 : lam;
    double res = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) res += std::abs(y[i] - eig * d[i]);
    res *= h;
    if (opts.record_trace) result.trace.push_back(res);
    if (res <= opts.tol) {
      result.eigenvalue = eig;
      result.density = Density(grid, std::move(d));
      result.residual = res;
      result.iterations = it + 1;
      result.converged = true;
      return result;
    }
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(0.0, y[i] / lam);
  }
  throw Error(ErrorKind::NoConvergence,
              std::string(what) + ": no convergence in " + std::to_string(opts.max_iter) + " iterations");
}

// Random step function with 1..max_jumps jumps and values in [-1, 1].
std::vector<double> random_steps(int n, int max_jumps, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> jumps_dist(1, max_jumps);
  std::uniform_int_distribution<int> cell_dist(0, n - 1);
  std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
  const int jumps = jumps_dist(rng);
  std::vector<int> cuts;
  for (int i = 0; i < jumps; ++i) cuts.push_back(cell_dist(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> v(static_cast<std::size_t>(n));
  double current = value_dist(rng);
  std::size_t next = 0;
  for (int i = 0; i < n; ++i) {
    if (next < cuts.size() && cuts[next] == i) {
      current = value_dist(rng);
      ++next;
    }
    v[i] = current;
  }
  return v;
}

void subtract_mean(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  s /= static_cast<double>(v.size());
  for (double& x : v) x -= s;
}

}  // namespace

SpectralResult stationary_density(const UlamOperator& L, const SolverOptions& opts) {
  return power_iterate(L, opts, true, "stationary_density");
}

SpectralResult qsd_eigenpair(const UlamOperator& R, const SolverOptions& opts) {
  return power_iterate(R, opts, false, "qsd_eigenpair");
}

SpectralResult q_fixed_point(const UlamOperator& Q, const SolverOptions& opts) {
  return power_iterate(Q, opts, true, "q_fixed_point");
}

Reconstruction reconstruct_rho(const Density& u, const UlamOperator& L, const std::vector<double>& mask, int k) {
  require_same_grid(u.grid, L.grid());
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "gap time must be >= 1");
  if (mask.size() != u.values.size()) throw Error(ErrorKind::GridMismatch, "mask size");
  const Grid& grid = u.grid;
  const std::size_t n = u.values.size();

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = mask[i] * u.values[i];
  std::vector<double> term(n, 0.0);
  std::vector<double> next(n);
  for (int j = 1; j < k; ++j) {
    L.apply(v, next);
    v.swap(next);
    for (std::size_t i = 0; i < n; ++i) term[i] += v[i];
  }

  Reconstruction out;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = u.values[i] + term[i];
  const double norm = l1_norm(h, grid);
  for (double& x : h) x /= norm;
  L.apply(h, next);
  for (std::size_t i = 0; i < n; ++i) next[i] -= h[i];
  out.defect = l1_norm(next, grid);
  out.rho = Density(grid, std::move(h));
  out.residual_l1 = l1_norm(term, grid);
  out.residual_bv = bv_norm(term, grid);
  out.residual = std::move(term);
  return out;
}

Diagnostics diagnostic_norms(const UlamOperator& T, const Density& t_fixed, const UlamOperator& R, double lambda,
                             const Density& q, const DiagnosticOptions& opts) {
  require_same_grid(T.grid(), R.grid());
  require_same_grid(T.grid(), q.grid);
  require_same_grid(T.grid(), t_fixed.grid);
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "eigenvalue must be positive");
  const Grid& grid = T.grid();
  const int n = grid.n;
  const double h = grid.h();
  Diagnostics out;
  out.a3 = bv_norm(q.values, grid);

  // a2 lower estimate over Haar-type probes plus the hole indicator.
  std::vector<double> tphi(static_cast<std::size_t>(n));
  std::vector<double> rphi(static_cast<std::size_t>(n));
  auto probe_ratio = [&](const std::vector<double>& phi) {
    const double norm = bv_norm(phi, grid);
    if (norm == 0.0) return 0.0;
    T.apply(phi, tphi);
    R.apply(phi, rphi);
    for (int i = 0; i < n; ++i) tphi[i] -= rphi[i] / lambda;
    return bv_norm(tphi, grid) / norm;
  };
  std::vector<double> phi(static_cast<std::size_t>(n), 1.0);
  out.a2_lower = probe_ratio(phi);
  const int levels = std::min(opts.haar_levels, static_cast<int>(std::log2(n)));
  for (int level = 1; level <= levels; ++level) {
    const int width = n >> (level - 1);
    for (int start = 0; start + width <= n; start += width) {
      std::fill(phi.begin(), phi.end(), 0.0);
      for (int i = 0; i < width; ++i) phi[start + i] = i < width / 2 ? 1.0 : -1.0;
      out.a2_lower = std::max(out.a2_lower, probe_ratio(phi));
    }
  }
  const auto& mask = T.hole_fraction();
  if (std::any_of(mask.begin(), mask.end(), [](double f) { return f > 0.0; })) {
    phi.assign(mask.begin(), mask.end());
    out.a2_lower = std::max(out.a2_lower, probe_ratio(phi));
  }

  // a2 upper bound from the triangle inequality and the smoothing bound
  // |L phi|_BV <= (1/sigma + 1)|phi|_1, with |phi|_inf <= max(1, 1/|X|) |phi|_BV.
  const double sigma = T.provenance().sigma;
  if (sigma > 0.0) {
    const double smooth = 1.0 / sigma + 1.0;
    const double sup = std::max(1.0, 1.0 / grid.phase.length());
    out.a2_upper = (1.0 / lambda - 1.0) * smooth + smooth * T.provenance().hole_measure * sup;
  } else {
    out.a2_upper = std::numeric_limits<double>::infinity();
  }

  // a1: Neumann series of (I - T)^{-1} on mean-zero probes.
  std::mt19937_64 rng(opts.seed);
  auto project = [&](std::vector<double>& v) {
    const double m = mass_of(v, h);
    for (int i = 0; i < n; ++i) v[i] -= m * t_fixed.values[i];
  };
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> next(static_cast<std::size_t>(n));
  for (int probe = 0; probe < opts.resolvent_probes; ++probe) {
    auto b = random_steps(n, opts.max_jumps, rng);
    subtract_mean(b);
    const double b_norm = bv_norm(b, grid);
    if (b_norm == 0.0) continue;
    x = b;
    p = b;
    bool converged = false;
    for (long term = 0; term < opts.max_terms; ++term) {
      T.apply(p, next);
      p.swap(next);
      project(p);
      for (int i = 0; i < n; ++i) x[i] += p[i];
      if (bv_norm(p, grid) <= opts.tol * bv_norm(x, grid)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(ErrorKind::SingularResolvent,
                  "Neumann series for (I - T)^{-1} did not converge in " + std::to_string(opts.max_terms) + " terms");
    }
    out.a1 = std::max(out.a1, bv_norm(x, grid) / b_norm);
  }
  return out;
}

LasotaYorkeFit fit_lasota_yorke(const UlamOperator& R, int probes, int max_n, std::uint64_t seed) {
  if (probes < 1 || max_n < 1) throw Error(ErrorKind::InvalidArgument, "need probes >= 1 and max_n >= 1");
  const Grid& grid = R.grid();
  const int n = grid.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> var(static_cast<std::size_t>(probes));
  std::vector<double> l1(static_cast<std::size_t>(probes));
  std::vector<double> next(static_cast<std::size_t>(n));
  for (int p = 0; p < probes; ++p) {
    std::vector<double> phi;
    if (p % 2 == 0) {
      phi = random_steps(n, 32, rng);
    } else {
      phi.resize(static_cast<std::size_t>(n));
      for (double& v : phi) v = unit(rng);
    }
    l1[p] = l1_norm(phi, grid);
    var[p].push_back(variation(phi, grid));
    for (int k = 1; k <= max_n; ++k) {
      R.apply(phi, next);
      phi.swap(next);
      var[p].push_back(variation(phi, grid));
    }
  }

  LasotaYorkeFit fit;
  fit.probes = probes;
  fit.max_n = max_n;
  const int tail = std::min(10, max_n);
  for (int p = 0; p < probes; ++p) {
    if (l1[p] == 0.0) continue;
    for (int k = tail; k <= max_n; ++k) fit.B = std::max(fit.B, var[p][k] / l1[p]);
  }
  std::vector<double> excess(static_cast<std::size_t>(max_n) + 1, 0.0);
  for (int k = 0; k <= max_n; ++k) {
    for (int p = 0; p < probes; ++p) {
      if (var[p][0] == 0.0) continue;
      excess[k] = std::max(excess[k], std::max(0.0, var[p][k] - fit.B * l1[p]) / var[p][0]);
    }
  }
  fit.A = std::max(1.0, excess[0]);
  for (int k = 1; k <= max_n; ++k) fit.gamma = std::max(fit.gamma, std::pow(excess[k] / fit.A, 1.0 / k));
  fit.worst_slack = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    for (int k = 0; k <= max_n; ++k) {
      const double rhs = fit.A * std::pow(fit.gamma, k) * var[p][0] + fit.B * l1[p];
      fit.worst_slack = std::min(fit.worst_slack, rhs - var[p][k]);
    }
  }
  return fit;
}

void write_result_meta(const SpectralResult& r, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "eigenvalue = %.17g\nresidual = %.17g\niterations = %ld\nconverged = %s\n",
                r.eigenvalue, r.residual, r.iterations, r.converged ? "true" : "false");
  out << buf;
}

}  // namespace holelab
