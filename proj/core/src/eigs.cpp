#include "cpcag/eigs.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cpcag {

namespace {

// First entry that is not numerically negligible relative to the column
// peak decides the sign.
void fix_column_signs(Matrix& B) {
  for (Index j = 0; j < B.cols(); ++j) {
    const double peak = B.col(j).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    for (Index i = 0; i < B.rows(); ++i) {
      if (std::abs(B(i, j)) > 1e-12 * peak) {
        if (B(i, j) < 0.0) B.col(j) = -B.col(j);
        break;
      }
    }
  }
}

}  // namespace

Matrix EigenPairs::leading(Index k) const {
  if (k > order()) throw std::invalid_argument("EigenPairs: fewer pairs than requested");
  return eigenvectors.leftCols(k);
}

EigenPairs sym_eig(const SparseMatrix& A, Index k) {
  if (A.rows() != A.cols()) throw std::invalid_argument("sym_eig: square matrix required");
  if (k < 1 || k > A.rows())
    throw std::invalid_argument("sym_eig: order k out of range (k = " + std::to_string(k) +
                                ", dim = " + std::to_string(A.rows()) + ")");

  Matrix dense = A.to_dense();
  dense = 0.5 * (dense + dense.transpose().eval());  // guard against rounding asymmetry

  Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");

  EigenPairs out;
  out.eigenvalues = solver.eigenvalues().head(k);
  out.eigenvectors = solver.eigenvectors().leftCols(k);
  fix_column_signs(out.eigenvectors);
  return out;
}

SvdResult thin_svd(const Matrix& A) {
  if (!A.allFinite()) throw std::invalid_argument("thin_svd: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Index detect_rank(const Vector& sigma, double threshold) {
  if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
  Index k = 0;
  while (k < sigma.size() && sigma[k] / sigma[0] >= threshold) ++k;
  return k;
}

}  // namespace cpcag
