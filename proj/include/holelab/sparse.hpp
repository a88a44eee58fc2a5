#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace holelab {

struct Entry {
  int index = 0;
  double value = 0.0;
};

enum class Execution { Parallel, Serial };

// Square sparse matrix kept in both column (assembly, column sums) and row
// (matrix-vector products) compressed layouts.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // columns[j] lists (row, value) pairs of column j; rows must be unique.
  static SparseMatrix from_columns(int n, const std::vector<std::vector<Entry>>& columns);

  int size() const { return n_; }
  std::size_t nnz() const { return row_index_.size(); }

  std::span<const int> column_rows(int j) const {
    return {row_index_.data() + col_ptr_[j], static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
  }
  std::span<const double> column_values(int j) const {
    return {col_value_.data() + col_ptr_[j], static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
  }
  std::vector<std::vector<Entry>> columns() const;

  // y = A x. Row-parallel kernel; Serial runs the same loop on one thread.
  void multiply(std::span<const double> x, std::span<double> y, Execution exec = Execution::Parallel) const;
  // y = A x by scattering columns. Kept as an independent reference path.
  void multiply_by_columns(std::span<const double> x, std::span<double> y) const;
  // y = A^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  std::vector<double> column_sums() const;
  SparseMatrix scale_columns(std::span<const double> factors) const;

 private:
  int n_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_index_;
  std::vector<double> col_value_;
  std::vector<int> row_ptr_;
  std::vector<int> col_index_;
  std::vector<double> row_value_;
};

}  // namespace holelab
