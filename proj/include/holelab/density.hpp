#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "holelab/phase.hpp"

namespace holelab {

// n equal cells tiling the phase.
struct Grid {
  Phase phase;
  int n = 0;

  Grid() = default;
  Grid(Phase phase, int n);

  double h() const { return phase.length() / n; }
  double cell_lo(int j) const { return phase.lo + phase.length() * j / n; }
  double cell_hi(int j) const { return phase.lo + phase.length() * (j + 1) / n; }
  double cell_center(int j) const { return 0.5 * (cell_lo(j) + cell_hi(j)); }
  int cell_of(double x) const;  // x in the fundamental domain

  bool operator==(const Grid&) const = default;
};

// Step function on a grid: values are densities per unit length.
struct Density {
  Grid grid;
  std::vector<double> values;

  Density() = default;
  Density(Grid g, std::vector<double> v);
  static Density constant(const Grid& g, double value);

  double mass() const;
  void normalize();  // scales to unit mass; no-op on zero mass
};

// Norms on step functions over `grid`.
double l1_norm(std::span<const double> v, const Grid& grid);
double variation(std::span<const double> v, const Grid& grid);  // wraps on the circle
double bv_norm(std::span<const double> v, const Grid& grid);    // variation + L1

// Sums n/factor consecutive cells; the result is again a density.
Density coarsen(const Density& d, int factor);

void require_same_grid(const Grid& a, const Grid& b);

// "cell_center,density" header and one row per cell.
void write_density_csv(const Density& d, std::ostream& out);

}  // namespace holelab
