#pragma once

#include <vector>

#include "cpcag/types.hpp"

namespace cpcag {

struct Triplet {
  Index row;
  Index col;
  double value;
};

// CSR matrix. Invariants after construction: row pointers monotone
// nondecreasing with length rows+1, column indices strictly increasing
// within each row, no explicitly stored zeros. Immutable.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate entries are summed; entries with |value| <= drop_below are
  // discarded after summation (exact zeros always are).
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries,
                                    double drop_below = 0.0);
  static SparseMatrix from_dense(const Matrix& dense, double drop_below = 0.0);
  static SparseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(Index i, Index j) const;

  // y = A x. Row-sequential accumulation in storage order, so results are
  // bit-reproducible.
  Vector multiply(const Vector& x) const;
  // A X, same accumulation order per row.
  Matrix multiply(const Matrix& X) const;
  // X A; columns of the result accumulate in CSR row order.
  Matrix right_multiply(const Matrix& X) const;

  SparseMatrix transpose() const;
  // A(rows, cols) with the given index orderings (gather, no arithmetic).
  SparseMatrix submatrix(const IndexList& rows, const IndexList& cols) const;
  Matrix to_dense() const;

  Vector diagonal() const;
  Vector row_sums() const;
  double max_abs_asymmetry() const;

  // Connected components of the nonzero pattern (assumes structural
  // symmetry). Returns one sorted node list per component.
  std::vector<IndexList> connected_components() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

}  // namespace cpcag
