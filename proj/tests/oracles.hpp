#pragma once

// Dense reference computations used as independent oracles in tests. These
// go through Eigen factorizations and exhaustive loops only, never through
// the sparse/iterative paths they are checking.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cpcag/rng.hpp"
#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace oracle {

using cpcag::CounterRng;
using cpcag::Index;
using cpcag::IndexList;
using cpcag::Matrix;
using cpcag::SparseMatrix;
using cpcag::Triplet;
using cpcag::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(CounterRng::mix(seed));
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
  return m;
}

inline IndexList complement(const IndexList& subset, Index n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (const Index i : subset) in[static_cast<std::size_t>(i)] = 1;
  IndexList out;
  for (Index i = 0; i < n; ++i)
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

inline Matrix gather(const Matrix& M, const IndexList& rows, const IndexList& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = M(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  return out;
}

// Schur complement of a dense Laplacian onto the kept set.
inline Matrix dense_kron(const Matrix& L, const IndexList& keep) {
  const IndexList interior = complement(keep, L.rows());
  const Matrix L_bb = gather(L, keep, keep);
  if (interior.empty()) return L_bb;
  const Matrix L_aa = gather(L, interior, interior);
  const Matrix L_ab = gather(L, interior, keep);
  const Matrix L_ba = gather(L, keep, interior);
  return L_bb - L_ba * L_aa.ldlt().solve(L_ab);
}

// Harmonic extension S with S(known) = R via a dense solve.
inline Matrix dense_upsample(const Matrix& L, const IndexList& known, const Matrix& R) {
  const Index n = L.rows();
  const IndexList unknown = complement(known, n);
  Matrix S(n, R.cols());
  for (std::size_t i = 0; i < known.size(); ++i)
    S.row(known[i]) = R.row(static_cast<Index>(i));
  if (unknown.empty()) return S;
  const Matrix L_aa = gather(L, unknown, unknown);
  const Matrix L_ab = gather(L, unknown, known);
  const Matrix Sa = L_aa.ldlt().solve(-L_ab * R);
  for (std::size_t i = 0; i < unknown.size(); ++i)
    S.row(unknown[i]) = Sa.row(static_cast<Index>(i));
  return S;
}

// 0/1 selection matrix picking the given rows of a p-dimensional space.
inline Matrix selection_matrix(const IndexList& idx, Index p) {
  Matrix M = Matrix::Zero(static_cast<Index>(idx.size()), p);
  for (std::size_t i = 0; i < idx.size(); ++i) M(static_cast<Index>(i), idx[i]) = 1.0;
  return M;
}

// vec(X) is column-major; vec(Lr X) = (I kron Lr) vec, vec(X Lc) = (Lc^T kron I) vec.
inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

// argmin ||Y - X||_F^2 + gr tr(X^T Lr X) + gc tr(X Lc X^T) by the dense
// normal equations of the vectorized problem.
inline Matrix dense_quadratic_minimizer(const Matrix& Y, const Matrix& Lr, const Matrix& Lc,
                                        double gamma_r, double gamma_c) {
  const Index p = Y.rows();
  const Index n = Y.cols();
  const Matrix Ip = Matrix::Identity(p, p);
  const Matrix In = Matrix::Identity(n, n);
  const Matrix op = kron(In, Ip) + gamma_c * kron(Lc.transpose(), Ip) + gamma_r * kron(In, Lr);
  const Eigen::Map<const Vector> y(Y.data(), Y.size());
  const Vector x = op.ldlt().solve(Vector(y));
  return Eigen::Map<const Matrix>(x.data(), p, n);
}

// Normal equations of the alternate decoder, solved densely on vec(X).
inline Matrix dense_alternate_decoder(const Matrix& Xt, const IndexList& omega_r,
                                      const IndexList& omega_c, const Matrix& Lr,
                                      const Matrix& Lc, double gbar_r, double gbar_c) {
  const Index p = Lr.rows();
  const Index n = Lc.rows();
  const Matrix Mr = selection_matrix(omega_r, p);
  const Matrix Mc = selection_matrix(omega_c, n).transpose();  // n x rho_c
  const Matrix Ip = Matrix::Identity(p, p);
  const Matrix In = Matrix::Identity(n, n);
  // vec(Mr^T Mr X Mc Mc^T) = ((Mc Mc^T)^T kron Mr^T Mr) vec(X)
  const Matrix op = kron((Mc * Mc.transpose()).transpose(), Mr.transpose() * Mr) +
                    gbar_c * kron(Lc.transpose(), Ip) + gbar_r * kron(In, Lr);
  const Matrix rhs_mat = Mr.transpose() * Xt * Mc.transpose();
  const Eigen::Map<const Vector> rhs(rhs_mat.data(), rhs_mat.size());
  const Vector x = op.ldlt().solve(Vector(rhs));
  return Eigen::Map<const Matrix>(x.data(), p, n);
}

// Random symmetric weighted graph; weights in (0, 1]. A spanning chain is
// added when connect = true so the graph has one component.
inline SparseMatrix random_graph_adjacency(Index n, double edge_prob, std::uint64_t seed,
                                           bool connect = true) {
  CounterRng rng(CounterRng::mix(seed ^ 0x6772617068ULL));
  std::vector<Triplet> trips;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const bool chain = connect && j == i + 1;
      if (!chain && rng.next_double() >= edge_prob) continue;
      const double w = 0.05 + 0.95 * rng.next_double();
      trips.push_back({i, j, w});
      trips.push_back({j, i, w});
    }
  return SparseMatrix::from_triplets(n, n, std::move(trips));
}

inline Matrix dense_laplacian(const SparseMatrix& W) {
  const Matrix Wd = W.to_dense();
  const Vector deg = Wd.rowwise().sum();
  Matrix L = Matrix(deg.asDiagonal());
  L -= Wd;
  return L;
}

}  // namespace oracle
