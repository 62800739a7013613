#pragma once

#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

// Leading (smallest-eigenvalue) part of a symmetric eigendecomposition.
// eigenvalues ascending; eigenvector columns orthonormal; the sign of each
// column is fixed so its first non-negligible entry is positive.
struct EigenPairs {
  Vector eigenvalues;
  Matrix eigenvectors;  // n x k

  Index order() const { return eigenvalues.size(); }
  Index dimension() const { return eigenvectors.rows(); }
  Matrix leading(Index k) const;  // first k columns
};

// k smallest eigenpairs of a symmetric sparse matrix. Dense solve after
// densification; intended for desk-scale matrices (n up to a few thousand).
EigenPairs sym_eig(const SparseMatrix& A, Index k);

struct SvdResult {
  Matrix U;      // m x r
  Vector sigma;  // nonincreasing, nonnegative
  Matrix V;      // n x r
};

// Thin SVD, A = U diag(sigma) V^T with r = min(m, n).
SvdResult thin_svd(const Matrix& A);

// Count of singular values with sigma_i / sigma_1 >= threshold (0 for a
// zero matrix).
Index detect_rank(const Vector& sigma, double threshold);

}  // namespace cpcag
