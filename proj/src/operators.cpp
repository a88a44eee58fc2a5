#include "holelab/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "holelab/errors.hpp"

namespace holelab {

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Deterministic: return "deterministic";
    case OperatorKind::Annealed: return "annealed";
    case OperatorKind::Conditioned: return "conditioned";
    case OperatorKind::Composite: return "composite";
  }
  return "unknown";
}

UlamOperator::UlamOperator(OperatorKind kind, Grid grid, SparseMatrix matrix, std::vector<double> hole_fraction,
                           Provenance provenance, int power)
    : kind_(kind),
      grid_(grid),
      matrix_(std::move(matrix)),
      hole_fraction_(std::move(hole_fraction)),
      provenance_(std::move(provenance)),
      power_(power) {}

void UlamOperator::apply(std::span<const double> in, std::span<double> out, Execution exec) const {
  if (static_cast<int>(in.size()) != grid_.n || static_cast<int>(out.size()) != grid_.n) {
    throw Error(ErrorKind::GridMismatch, "vector length does not match operator grid");
  }
  matrix_.multiply(in, out, exec);
}

std::vector<double> UlamOperator::apply(std::span<const double> in) const {
  std::vector<double> out(in.size());
  apply(in, out);
  return out;
}

namespace {

// Accumulates one column. Target cells are addressed by unwrapped index k,
// i.e. the real-line cell [lo + k h, lo + (k + 1) h].
class ColumnBuilder {
 public:
  ColumnBuilder(const Grid& grid, double sigma) : grid_(grid), sigma_(sigma), lo_(grid.phase.lo), h_(grid.h()) {}

  double edge(long k) const { return lo_ + static_cast<double>(k) * h_; }
  long cell_index(double y) const { return static_cast<long>(std::floor((y - lo_) / h_)); }

  // Uniform kernel weight of cell k seen from y, and its y-derivative.
  void kernel(long k, double y, double& weight, double& slope) const {
    const double a = edge(k);
    const double b = edge(k + 1);
    const double top = y + sigma_;
    const double bottom = y - sigma_;
    const double overlap = std::min(b, top) - std::max(a, bottom);
    if (overlap <= 0.0) {
      weight = 0.0;
      slope = 0.0;
      return;
    }
    const double inv = 0.5 / sigma_;
    weight = overlap * inv;
    slope = ((top > a && top < b) ? inv : 0.0) - ((bottom > a && bottom < b) ? inv : 0.0);
  }

  void point_mass(double y, double mass) {
    if (sigma_ == 0.0) {
      add(cell_index(y), mass);
      return;
    }
    const long k0 = cell_index(y - sigma_) - 1;
    const long k1 = cell_index(y + sigma_) + 1;
    for (long k = k0; k <= k1; ++k) {
      double w = 0.0;
      double s = 0.0;
      kernel(k, y, w, s);
      if (w > 0.0) add(k, w * mass);
    }
  }

  // Image segment [p, q] carrying mass `mass` with centered first moment
  // `moment` (integral of (f - mid) over its preimage, divided by h). Every
  // kernel weight is affine in y on the segment, so the sum is exact.
  void segment(double p, double q, double mass, double moment) {
    const double mid = 0.5 * (p + q);
    if (sigma_ == 0.0) {
      add(cell_index(mid), mass);
      return;
    }
    const long k0 = cell_index(p - sigma_) - 1;
    const long k1 = cell_index(q + sigma_) + 1;
    for (long k = k0; k <= k1; ++k) {
      double w = 0.0;
      double s = 0.0;
      kernel(k, mid, w, s);
      const double c = w * mass + s * moment;
      if (c != 0.0) add(k, c);
    }
  }

  // Breakpoints of all kernel weights strictly inside (ylo, yhi).
  void breakpoints(double ylo, double yhi, std::vector<double>& out) const {
    out.clear();
    auto family = [&](double offset) {
      const long k0 = static_cast<long>(std::ceil((ylo - offset - lo_) / h_)) - 1;
      const long k1 = static_cast<long>(std::floor((yhi - offset - lo_) / h_)) + 1;
      for (long k = k0; k <= k1; ++k) {
        const double y = edge(k) + offset;
        if (y > ylo && y < yhi) out.push_back(y);
      }
    };
    if (sigma_ == 0.0) {
      family(0.0);
    } else {
      family(-sigma_);
      family(sigma_);
    }
    std::sort(out.begin(), out.end());
  }

  std::vector<Entry> finish(double& leaked) {
    const int n = grid_.n;
    const bool circle = grid_.phase.is_circle();
    std::vector<Entry> col;
    col.reserve(acc_.size());
    for (const auto& [k, v] : acc_) {
      long row = k;
      if (circle) {
        row = ((k % n) + n) % n;
      } else if (k < 0 || k >= n) {
        leaked += v;
        continue;
      }
      col.push_back({static_cast<int>(row), v});
    }
    std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::vector<Entry> merged;
    for (const auto& e : col) {
      if (!merged.empty() && merged.back().index == e.index) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [](const Entry& e) { return e.value <= 0.0; });
    return merged;
  }

 private:
  void add(long k, double v) { acc_.emplace_back(k, v); }

  const Grid& grid_;
  double sigma_;
  double lo_;
  double h_;
  std::vector<std::pair<long, double>> acc_;
};

std::vector<Entry> assemble_column(const std::vector<Piece>& pieces, const Grid& grid, double sigma, int j,
                                   double& leaked) {
  ColumnBuilder builder(grid, sigma);
  const double h = grid.h();
  const double c0 = grid.cell_lo(j);
  const double c1 = grid.cell_hi(j);
  std::vector<double> bps;
  std::vector<double> xs;

  auto first = std::upper_bound(pieces.begin(), pieces.end(), c0,
                                [](double v, const Piece& p) { return v < p.hi(); });
  for (auto it = first; it != pieces.end() && it->lo() < c1; ++it) {
    const Piece& piece = *it;
    const double xa = std::max(c0, piece.lo());
    const double xb = std::min(c1, piece.hi());
    if (xb <= xa) continue;
    const double mass = (xb - xa) / h;
    const double ya = piece.value(xa);
    const double yb = piece.value(xb);
    if (piece.is_constant() || ya == yb) {
      builder.point_mass(0.5 * (ya + yb), mass);
      continue;
    }
    const bool increasing = yb > ya;
    const double ylo = increasing ? ya : yb;
    const double yhi = increasing ? yb : ya;
    builder.breakpoints(ylo, yhi, bps);

    xs.clear();
    xs.push_back(increasing ? xa : xb);
    for (double y : bps) {
      double x = piece.inverse(y);
      x = std::clamp(x, xa, xb);
      // Keep preimages monotone despite round-off.
      x = increasing ? std::max(x, xs.back()) : std::min(x, xs.back());
      xs.push_back(x);
    }
    xs.push_back(increasing ? xb : xa);

    double p = ylo;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
      const double q = s < bps.size() ? bps[s] : yhi;
      const double x_lo = std::min(xs[s], xs[s + 1]);
      const double x_hi = std::max(xs[s], xs[s + 1]);
      if (x_hi > x_lo) {
        const double mid = 0.5 * (p + q);
        builder.segment(p, q, (x_hi - x_lo) / h, piece.centered_integral(x_lo, x_hi, mid) / h);
      }
      p = q;
    }
  }
  return builder.finish(leaked);
}

SparseMatrix assemble_matrix(const std::vector<Piece>& pieces, const Grid& grid, double sigma, Execution exec) {
  const int n = grid.n;
  std::vector<std::vector<Entry>> columns(static_cast<std::size_t>(n));
  double leaked = 0.0;
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : leaked)
    for (int j = 0; j < n; ++j) columns[j] = assemble_column(pieces, grid, sigma, j, leaked);
  } else {
    for (int j = 0; j < n; ++j) columns[j] = assemble_column(pieces, grid, sigma, j, leaked);
  }
  if (leaked > 1e-10) {
    throw Error(ErrorKind::PhaseLeak, "assembled operator leaks mass " + std::to_string(leaked) +
                                          " out of the interval phase");
  }
  return SparseMatrix::from_columns(n, columns);
}

void check_resolution(const MapModel& m, const NoiseModel& noise, const Grid& grid) {
  if (!(noise.sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "annealed operator needs sigma > 0");
  if (!(grid.phase == m.phase)) throw Error(ErrorKind::GridMismatch, "grid and map phases differ");
  const double h = grid.h();
  const double slack = 1.0 + 1e-12;
  if (h > slack * noise.sigma / 4.0) {
    throw Error(ErrorKind::GridTooCoarse, "cell width " + std::to_string(h) + " exceeds sigma/4");
  }
  if (m.has_hole() && h > slack * m.hole.radius / 4.0) {
    throw Error(ErrorKind::GridTooCoarse, "cell width " + std::to_string(h) + " exceeds delta/4");
  }
}

}  // namespace

std::vector<double> hole_mask(const MapModel& m, const Grid& grid) {
  std::vector<double> mask(static_cast<std::size_t>(grid.n), 0.0);
  if (!m.has_hole()) return mask;
  for (int j = 0; j < grid.n; ++j) {
    const double a = grid.cell_lo(j);
    const double b = grid.cell_hi(j);
    mask[j] = std::clamp(m.hole_overlap(a, b) / (b - a), 0.0, 1.0);
  }
  return mask;
}

UlamOperator assemble_annealed(const MapModel& m, const NoiseModel& noise, const Grid& grid, Execution exec) {
  check_resolution(m, noise, grid);
  auto mask = hole_mask(m, grid);
  double measure = 0.0;
  for (double f : mask) measure += f * grid.h();
  return UlamOperator(OperatorKind::Annealed, grid, assemble_matrix(m.pieces, grid, noise.sigma, exec),
                      std::move(mask), Provenance{m.name, noise.sigma, m.hole.radius, measure});
}

UlamOperator assemble_deterministic(const MapModel& m, const Grid& grid) {
  if (!(grid.phase == m.phase)) throw Error(ErrorKind::GridMismatch, "grid and map phases differ");
  return UlamOperator(OperatorKind::Deterministic, grid, assemble_matrix(m.base_pieces, grid, 0.0, Execution::Parallel),
                      std::vector<double>(static_cast<std::size_t>(grid.n), 0.0), Provenance{m.name, 0.0, 0.0, 0.0});
}

UlamOperator assemble_conditioned(const UlamOperator& annealed, const std::vector<double>& mask) {
  if (static_cast<int>(mask.size()) != annealed.grid().n) throw Error(ErrorKind::GridMismatch, "mask size");
  std::vector<double> keep(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) keep[j] = 1.0 - mask[j];
  return UlamOperator(OperatorKind::Conditioned, annealed.grid(), annealed.matrix().scale_columns(keep), mask,
                      annealed.provenance());
}

UlamOperator assemble_q(const UlamOperator& annealed, const std::vector<double>& mask, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "gap time must be >= 1");
  const int n = annealed.grid().n;
  if (static_cast<int>(mask.size()) != n) throw Error(ErrorKind::GridMismatch, "mask size");
  const SparseMatrix& a = annealed.matrix();
  auto columns = a.columns();

  std::vector<int> hole_cols;
  for (int j = 0; j < n; ++j) {
    if (mask[j] > 0.0) hole_cols.push_back(j);
  }
  if (k > 1 && !hole_cols.empty()) {
    const int count = static_cast<int>(hole_cols.size());
#pragma omp parallel
    {
      std::vector<double> dense(static_cast<std::size_t>(n), 0.0);
      std::vector<char> touched(static_cast<std::size_t>(n), 0);
#pragma omp for schedule(dynamic, 1)
      for (int c = 0; c < count; ++c) {
        const int j = hole_cols[c];
        std::vector<Entry> v = {{j, 1.0}};
        for (int step = 0; step < k; ++step) {
          std::vector<int> support;
          for (const auto& e : v) {
            auto rows = a.column_rows(e.index);
            auto vals = a.column_values(e.index);
            for (std::size_t r = 0; r < rows.size(); ++r) {
              if (!touched[rows[r]]) {
                touched[rows[r]] = 1;
                support.push_back(rows[r]);
              }
              dense[rows[r]] += vals[r] * e.value;
            }
          }
          std::sort(support.begin(), support.end());
          v.clear();
          for (int i : support) {
            v.push_back({i, dense[i]});
            dense[i] = 0.0;
            touched[i] = 0;
          }
        }
        // Column j of Q: (1 - m_j) L e_j + m_j L^k e_j.
        std::vector<Entry> merged;
        const auto& lcol = columns[j];
        std::size_t p = 0;
        std::size_t q = 0;
        const double keep = 1.0 - mask[j];
        while (p < lcol.size() || q < v.size()) {
          if (q == v.size() || (p < lcol.size() && lcol[p].index < v[q].index)) {
            merged.push_back({lcol[p].index, keep * lcol[p].value});
            ++p;
          } else if (p == lcol.size() || v[q].index < lcol[p].index) {
            merged.push_back({v[q].index, mask[j] * v[q].value});
            ++q;
          } else {
            merged.push_back({lcol[p].index, keep * lcol[p].value + mask[j] * v[q].value});
            ++p;
            ++q;
          }
        }
        std::erase_if(merged, [](const Entry& e) { return e.value <= 0.0; });
        columns[j] = std::move(merged);
      }
    }
  }
  return UlamOperator(OperatorKind::Composite, annealed.grid(), SparseMatrix::from_columns(n, columns), mask,
                      annealed.provenance(), k);
}

UlamOperator assemble_q(const MapModel& m, const NoiseModel& noise, const Grid& grid, int k) {
  const auto annealed = assemble_annealed(m, noise, grid);
  return assemble_q(annealed, hole_mask(m, grid), k);
}

Density apply(const UlamOperator& op, const Density& d) {
  require_same_grid(op.grid(), d.grid);
  auto out = op.apply(d.values);
  static std::atomic<int> warnings{0};
  for (double& v : out) {
    if (v < 0.0) {
      if (v < -1e-14 && warnings.fetch_add(1) < 8) {
        std::fprintf(stderr, "holelab: clamped negative density entry %.3e\n", v);
      }
      v = 0.0;
    }
  }
  return Density(d.grid, std::move(out));
}

void write_triplets(const UlamOperator& op, std::ostream& out) {
  const auto& a = op.matrix();
  char buf[96];
  for (int j = 0; j < a.size(); ++j) {
    auto rows = a.column_rows(j);
    auto vals = a.column_values(j);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", rows[r], j, vals[r]);
      out << buf;
    }
  }
}

}  // namespace holelab
