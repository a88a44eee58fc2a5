#include "holelab/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "holelab/errors.hpp"

namespace holelab {

Grid::Grid(Phase phase_, int n_) : phase(phase_), n(n_) {
  if (n < 16) throw Error(ErrorKind::InvalidArgument, "grid needs at least 16 cells");
}

int Grid::cell_of(double x) const {
  const int j = static_cast<int>(std::floor((x - phase.lo) / phase.length() * n));
  return std::clamp(j, 0, n - 1);
}

Density::Density(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n) {
    throw Error(ErrorKind::GridMismatch, "density has " + std::to_string(values.size()) +
                                             " values for a grid of " + std::to_string(grid.n));
  }
}

Density Density::constant(const Grid& g, double value) {
  return Density(g, std::vector<double>(static_cast<std::size_t>(g.n), value));
}

double Density::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.h();
}

void Density::normalize() {
  const double m = mass();
  if (m == 0.0) return;
  for (double& v : values) v /= m;
}

double l1_norm(std::span<const double> v, const Grid& grid) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * grid.h();
}

double variation(std::span<const double> v, const Grid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += std::abs(v[i + 1] - v[i]);
  if (grid.phase.is_circle() && !v.empty()) s += std::abs(v.front() - v.back());
  return s;
}

double bv_norm(std::span<const double> v, const Grid& grid) { return variation(v, grid) + l1_norm(v, grid); }

Density coarsen(const Density& d, int factor) {
  if (factor < 1 || d.grid.n % factor != 0) {
    throw Error(ErrorKind::GridMismatch, "coarsening factor must divide the grid size");
  }
  Grid coarse(d.grid.phase, d.grid.n / factor);
  std::vector<double> v(static_cast<std::size_t>(coarse.n), 0.0);
  for (int i = 0; i < d.grid.n; ++i) v[i / factor] += d.values[i];
  for (double& x : v) x /= factor;
  return Density(coarse, std::move(v));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw Error(ErrorKind::GridMismatch,
                "grids differ (" + std::to_string(a.n) + " vs " + std::to_string(b.n) + " cells)");
  }
}

void write_density_csv(const Density& d, std::ostream& out) {
  out << "cell_center,density\n";
  char buf[80];
  for (int i = 0; i < d.grid.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.grid.cell_center(i), d.values[i]);
    out << buf;
  }
}

}  // namespace holelab
