#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "holelab/density.hpp"
#include "holelab/map_model.hpp"
#include "holelab/sparse.hpp"

namespace holelab {

enum class OperatorKind { Deterministic, Annealed, Conditioned, Composite };

const char* to_string(OperatorKind kind);

struct Provenance {
  std::string map;
  double sigma = 0.0;
  double delta = 0.0;
  double hole_measure = 0.0;
};

// Entry (i, j) is the probability mass moved from cell j to cell i by one
// step. Immutable once assembled.
class UlamOperator {
 public:
  UlamOperator(OperatorKind kind, Grid grid, SparseMatrix matrix, std::vector<double> hole_fraction,
               Provenance provenance, int power = 1);

  OperatorKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const std::vector<double>& hole_fraction() const { return hole_fraction_; }
  const Provenance& provenance() const { return provenance_; }
  int power() const { return power_; }

  // Densities per unit length transform by the same matrix (h cancels).
  void apply(std::span<const double> in, std::span<double> out, Execution exec = Execution::Parallel) const;
  std::vector<double> apply(std::span<const double> in) const;

  std::vector<double> column_sums() const { return matrix_.column_sums(); }

 private:
  OperatorKind kind_;
  Grid grid_;
  SparseMatrix matrix_;
  std::vector<double> hole_fraction_;
  Provenance provenance_;
  int power_;
};

// Overlap fraction of every cell with the hole.
std::vector<double> hole_mask(const MapModel& m, const Grid& grid);

// Exact Ulam projection of "apply f_delta, then add uniform noise on
// [-sigma, sigma]". Throws GridTooCoarse when h > sigma/4 or h > delta/4.
UlamOperator assemble_annealed(const MapModel& m, const NoiseModel& noise, const Grid& grid,
                               Execution exec = Execution::Parallel);

// Noise-free Ulam matrix of the unmodified base map f (no hole).
UlamOperator assemble_deterministic(const MapModel& m, const Grid& grid);

// R(phi) = L(1_{H^c} phi): columns of L scaled by 1 - hole fraction.
UlamOperator assemble_conditioned(const UlamOperator& annealed, const std::vector<double>& mask);

// Q(phi) = L^k(1_H phi) + L(1_{H^c} phi). Only hole columns need L^k; they
// are propagated column by column as sparse vectors.
UlamOperator assemble_q(const UlamOperator& annealed, const std::vector<double>& mask, int k);
UlamOperator assemble_q(const MapModel& m, const NoiseModel& noise, const Grid& grid, int k);

// Matrix-vector product on densities. Tiny negative round-off is clamped.
Density apply(const UlamOperator& op, const Density& d);

// Triplet export: "row col value" per line, 0-based indices, column-major.
void write_triplets(const UlamOperator& op, std::ostream& out);

}  // namespace holelab
