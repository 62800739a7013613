#pragma once

#include "cpcag/eigs.hpp"
#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class LaplacianKind { combinatorial, normalized };
enum class Axis { rows, cols };

// Gaussian-weighted kNN graph plus its Laplacian. Immutable after build.
struct GraphModel {
  Index n_nodes = 0;
  Index K = 0;          // neighbor count used for the build (0 for direct adjacency)
  double sigma2 = 0.0;  // kernel bandwidth actually used
  SparseMatrix adjacency;
  Vector degrees;
  SparseMatrix laplacian;
  LaplacianKind kind = LaplacianKind::combinatorial;
};

// Connect each point (row or column of X) to its K nearest Euclidean
// neighbors, symmetrize by union, and weight edges with the Gaussian
// kernel exp(-d^2 / sigma2). sigma2 defaults to the mean over points of
// the mean squared distance to their K neighbors; pass sigma2_override > 0
// to fix the bandwidth instead. Equal distances break toward the lower
// index. Coincident points get weight 1.
GraphModel build_knn_graph(const Matrix& X, Axis axis, Index K,
                           LaplacianKind kind = LaplacianKind::combinatorial,
                           double sigma2_override = 0.0);

// Wrap an explicit symmetric nonnegative adjacency (zero diagonal) into a
// GraphModel; used by synthetic generators and tests.
GraphModel graph_from_adjacency(const SparseMatrix& W,
                                LaplacianKind kind = LaplacianKind::combinatorial);

struct CoherenceReport {
  Index k = 0;
  double nu = 0.0;   // max over nodes of sqrt(n) * row norm of the first-k block
  Vector per_node;   // the sqrt(n)-scaled row norms
};

CoherenceReport cumulative_coherence(const EigenPairs& basis, Index k);

// Schur complement of the Laplacian onto the kept node set, computed by
// sparse PCG solves against each column of L(kept, interior)^T. Entries
// with magnitude below prune_tol are dropped. Every connected component of
// L must contain at least one kept node.
SparseMatrix kron_reduce(const SparseMatrix& L, const IndexList& keep, double pcg_tol = 1e-12,
                         double prune_tol = 1e-12);

struct SpectralGap {
  Index k = 0;
  double lambda_k = 0.0;
  double lambda_k1 = 0.0;
  double ratio = 0.0;  // lambda_k / lambda_k1
};

// Ratio of the k-th to the (k+1)-th smallest eigenvalue (1-based).
SpectralGap spectral_gap(const EigenPairs& basis, Index k);

}  // namespace cpcag
