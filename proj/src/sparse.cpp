#include "holelab/sparse.hpp"

#include <algorithm>

#include "holelab/errors.hpp"

namespace holelab {

SparseMatrix SparseMatrix::from_columns(int n, const std::vector<std::vector<Entry>>& columns) {
  if (static_cast<int>(columns.size()) != n) throw Error(ErrorKind::GridMismatch, "column count != n");
  SparseMatrix a;
  a.n_ = n;
  a.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) a.col_ptr_[j + 1] = a.col_ptr_[j] + static_cast<int>(columns[j].size());
  const std::size_t nnz = static_cast<std::size_t>(a.col_ptr_[n]);
  a.row_index_.resize(nnz);
  a.col_value_.resize(nnz);
  std::vector<int> row_count(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    std::vector<Entry> col = columns[j];
    std::sort(col.begin(), col.end(), [](const Entry& x, const Entry& y) { return x.index < y.index; });
    int k = a.col_ptr_[j];
    for (const auto& e : col) {
      if (e.index < 0 || e.index >= n) throw Error(ErrorKind::GridMismatch, "row index out of range");
      a.row_index_[k] = e.index;
      a.col_value_[k] = e.value;
      ++row_count[e.index];
      ++k;
    }
  }
  a.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) a.row_ptr_[i + 1] = a.row_ptr_[i] + row_count[i];
  a.col_index_.resize(nnz);
  a.row_value_.resize(nnz);
  std::vector<int> cursor(a.row_ptr_.begin(), a.row_ptr_.end() - 1);
  for (int j = 0; j < n; ++j) {
    for (int k = a.col_ptr_[j]; k < a.col_ptr_[j + 1]; ++k) {
      const int pos = cursor[a.row_index_[k]]++;
      a.col_index_[pos] = j;
      a.row_value_[pos] = a.col_value_[k];
    }
  }
  return a;
}

std::vector<std::vector<Entry>> SparseMatrix::columns() const {
  std::vector<std::vector<Entry>> cols(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) cols[j].push_back({row_index_[k], col_value_[k]});
  }
  return cols;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y, Execution exec) const {
  const int n = n_;
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += row_value_[k] * x[col_index_[k]];
      y[i] = s;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += row_value_[k] * x[col_index_[k]];
      y[i] = s;
    }
  }
}

void SparseMatrix::multiply_by_columns(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) y[row_index_[k]] += col_value_[k] * x[j];
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  const int n = n_;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += col_value_[k] * x[row_index_[k]];
    y[j] = s;
  }
}

std::vector<double> SparseMatrix::column_sums() const {
  std::vector<double> ones(static_cast<std::size_t>(n_), 1.0);
  std::vector<double> sums(static_cast<std::size_t>(n_), 0.0);
  multiply_transpose(ones, sums);
  return sums;
}

SparseMatrix SparseMatrix::scale_columns(std::span<const double> factors) const {
  auto cols = columns();
  for (int j = 0; j < n_; ++j) {
    if (factors[j] == 0.0) {
      cols[j].clear();
      continue;
    }
    for (auto& e : cols[j]) e.value *= factors[j];
  }
  return from_columns(n_, cols);
}

}  // namespace holelab
