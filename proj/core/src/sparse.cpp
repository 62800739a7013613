#include "cpcag/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cpcag {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries,
                                         double drop_below) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("sparse: negative dimensions");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("sparse: triplet index out of range");
    if (!std::isfinite(t.value)) throw std::invalid_argument("sparse: non-finite entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix out;
  out.rows_ = rows;
  out.cols_ = cols;
  out.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  out.col_idx_.reserve(entries.size());
  out.values_.reserve(entries.size());

  std::size_t i = 0;
  for (Index r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      const Index c = entries[i].col;
      double v = 0.0;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (v != 0.0 && std::abs(v) > drop_below) {
        out.col_idx_.push_back(c);
        out.values_.push_back(v);
      }
    }
    out.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<Index>(out.values_.size());
  }
  return out;
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense, double drop_below) {
  std::vector<Triplet> trips;
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0) trips.push_back({i, j, dense(i, j)});
  return from_triplets(dense.rows(), dense.cols(), std::move(trips), drop_below);
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(trips));
}

double SparseMatrix::coeff(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::out_of_range("sparse: coeff index out of range");
  const auto begin = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto end = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SparseMatrix::multiply(const Vector& x) const {
  if (x.size() != cols_)
    throw std::invalid_argument("spmv: dimension mismatch (" + std::to_string(cols_) + " vs " +
                                std::to_string(x.size()) + ")");
  Vector y = Vector::Zero(rows_);
  for (Index r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
      acc += values_[static_cast<std::size_t>(k)] * x[col_idx_[static_cast<std::size_t>(k)]];
    y[r] = acc;
  }
  return y;
}

Matrix SparseMatrix::multiply(const Matrix& X) const {
  if (X.rows() != cols_) throw std::invalid_argument("sparse multiply: dimension mismatch");
  Matrix Y = Matrix::Zero(rows_, X.cols());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const double v = values_[static_cast<std::size_t>(k)];
      const Index c = col_idx_[static_cast<std::size_t>(k)];
      Y.row(r) += v * X.row(c);
    }
  }
  return Y;
}

Matrix SparseMatrix::right_multiply(const Matrix& X) const {
  if (X.cols() != rows_) throw std::invalid_argument("sparse right_multiply: dimension mismatch");
  Matrix Y = Matrix::Zero(X.rows(), cols_);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const double v = values_[static_cast<std::size_t>(k)];
      const Index c = col_idx_[static_cast<std::size_t>(k)];
      Y.col(c) += v * X.col(r);
    }
  }
  return Y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> trips;
  trips.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
      trips.push_back({col_idx_[static_cast<std::size_t>(k)], r, values_[static_cast<std::size_t>(k)]});
  return from_triplets(cols_, rows_, std::move(trips));
}

SparseMatrix SparseMatrix::submatrix(const IndexList& rows, const IndexList& cols) const {
  std::vector<Index> col_map(static_cast<std::size_t>(cols_), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Index c = cols[j];
    if (c < 0 || c >= cols_) throw std::invalid_argument("submatrix: column index out of range");
    if (col_map[static_cast<std::size_t>(c)] != -1)
      throw std::invalid_argument("submatrix: duplicate column index");
    col_map[static_cast<std::size_t>(c)] = static_cast<Index>(j);
  }
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= rows_) throw std::invalid_argument("submatrix: row index out of range");
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const Index lc = col_map[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
      if (lc != -1) trips.push_back({static_cast<Index>(i), lc, values_[static_cast<std::size_t>(k)]});
    }
  }
  return from_triplets(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()),
                       std::move(trips));
}

Matrix SparseMatrix::to_dense() const {
  Matrix D = Matrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
      D(r, col_idx_[static_cast<std::size_t>(k)]) = values_[static_cast<std::size_t>(k)];
  return D;
}

Vector SparseMatrix::diagonal() const {
  const Index n = std::min(rows_, cols_);
  Vector d = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) d[i] = coeff(i, i);
  return d;
}

Vector SparseMatrix::row_sums() const {
  Vector s = Vector::Zero(rows_);
  for (Index r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
      acc += values_[static_cast<std::size_t>(k)];
    s[r] = acc;
  }
  return s;
}

double SparseMatrix::max_abs_asymmetry() const {
  if (rows_ != cols_) throw std::invalid_argument("asymmetry check needs a square matrix");
  double worst = 0.0;
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const Index c = col_idx_[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(k)] - coeff(c, r)));
    }
  return worst;
}

std::vector<IndexList> SparseMatrix::connected_components() const {
  if (rows_ != cols_) throw std::invalid_argument("components need a square matrix");
  std::vector<Index> label(static_cast<std::size_t>(rows_), -1);
  std::vector<IndexList> comps;
  IndexList stack;
  for (Index start = 0; start < rows_; ++start) {
    if (label[static_cast<std::size_t>(start)] != -1) continue;
    const Index id = static_cast<Index>(comps.size());
    comps.emplace_back();
    stack.assign(1, start);
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (Index k = row_ptr_[static_cast<std::size_t>(u)]; k < row_ptr_[static_cast<std::size_t>(u) + 1]; ++k) {
        const Index v = col_idx_[static_cast<std::size_t>(k)];
        if (label[static_cast<std::size_t>(v)] == -1) {
          label[static_cast<std::size_t>(v)] = id;
          stack.push_back(v);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

}  // namespace cpcag
