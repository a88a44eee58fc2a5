#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "holelab/density.hpp"
#include "holelab/operators.hpp"

namespace holelab {

struct SolverOptions {
  double tol = 1e-12;
  long max_iter = 1'000'000;
  bool record_trace = false;  // keep the residual of every iteration
};

struct SpectralResult {
  double eigenvalue = 1.0;
  Density density;  // unit L1 mass
  double residual = 0.0;  // |op(d) - eigenvalue d|_1 for the returned d
  long iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Fixed point of a mass-conserving operator by power iteration from the
// uniform density. Throws NoConvergence when the budget runs out.
SpectralResult stationary_density(const UlamOperator& L, const SolverOptions& opts = {});

// Leading eigenpair of a sub-stochastic operator by normalized power
// iteration. Throws ZeroOperator when all mass is lost.
SpectralResult qsd_eigenpair(const UlamOperator& R, const SolverOptions& opts = {});

// Fixed point of the composite operator.
SpectralResult q_fixed_point(const UlamOperator& Q, const SolverOptions& opts = {});

struct Reconstruction {
  Density rho;                       // h / |h|_1
  double defect = 0.0;               // |L(h) - h|_1 for the normalized h
  std::vector<double> residual;      // sum_{j=1}^{k-1} L^j(1_H u)
  double residual_l1 = 0.0;
  double residual_bv = 0.0;
};

Reconstruction reconstruct_rho(const Density& u, const UlamOperator& L, const std::vector<double>& mask, int k);

struct DiagnosticOptions {
  int resolvent_probes = 50;
  int max_jumps = 32;
  int haar_levels = 8;
  double tol = 1e-10;
  long max_terms = 200'000;
  std::uint64_t seed = 0x5eed;
};

struct Diagnostics {
  double a1 = 0.0;
  double a2_lower = 0.0;
  double a2_upper = 0.0;
  double a3 = 0.0;
};

// t_fixed is the unit-mass fixed point of T; R and lambda the conditioned
// operator and its leading eigenvalue; q the quasi-stationary density.
Diagnostics diagnostic_norms(const UlamOperator& T, const Density& t_fixed, const UlamOperator& R, double lambda,
                             const Density& q, const DiagnosticOptions& opts = {});

// Var(R^n phi) <= A gamma^n Var(phi) + B |phi|_1 fitted over random phi and
// 0 <= n <= max_n.
struct LasotaYorkeFit {
  double A = 1.0;
  double B = 0.0;
  double gamma = 0.0;
  int probes = 0;
  int max_n = 0;
  double worst_slack = 0.0;  // min over samples of rhs - lhs
};

LasotaYorkeFit fit_lasota_yorke(const UlamOperator& R, int probes = 100, int max_n = 20,
                                std::uint64_t seed = 0x1a50);

// "key = value" record of the scalar fields; the density goes through
// write_density_csv.
void write_result_meta(const SpectralResult& r, std::ostream& out);

}  // namespace holelab
