#pragma once

#include <cstdint>
#include <vector>

#include "cpcag/sampling.hpp"
#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

// Hard assignments over n items into k clusters.
struct ClusterLabels {
  std::vector<int> assignments;  // values in [0, k)
  Index k = 0;

  Index size() const { return static_cast<Index>(assignments.size()); }
  Matrix indicator() const;  // n x k one-hot rows

  static ClusterLabels from_assignments(std::vector<int> assignments, Index k);
};

// Lloyd iterations with k-means++ seeding on the COLUMNS of X; best of
// `restarts` runs by within-cluster sum of squares. An emptied cluster is
// re-seeded from the point farthest from its centroid. Deterministic for
// a given seed.
ClusterLabels kmeans(const Matrix& X, Index k, Index restarts = 10, std::uint64_t seed = 0,
                     Index max_iter = 100);

// Algorithm: upsample each sampled-column indicator over the column graph,
// then re-binarize by row-wise max pooling (ties pick the lowest column).
ClusterLabels decode_labels(const ClusterLabels& sampled, const SamplingPlan& plan,
                            const SparseMatrix& Lc, double pcg_tol = 1e-10,
                            Index pcg_max_iter = 5000);

// 1 - (best label-permutation agreement) / n; the permutation comes from
// optimal assignment on the k x k contingency matrix.
double clustering_error(const ClusterLabels& pred, const ClusterLabels& truth);

namespace detail {
// Max-sum assignment on a square score matrix; returns column assigned to
// each row. O(k^3) Hungarian method.
std::vector<Index> max_assignment(const Matrix& score);
}  // namespace detail

}  // namespace cpcag
