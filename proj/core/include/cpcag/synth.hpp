#pragma once

#include <cstdint>
#include <vector>

#include "cpcag/graph.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class NoiseKind { none, gaussian, laplacian, sparse };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double level = 0.0;  // fraction in [0, 1]
  std::uint64_t seed = 0;
};

// gaussian/laplacian: additive, per-feature std = level * std(feature row).
// sparse: replaces floor(level * p) entries per column with uniform values
// spanning that column's range.
Matrix add_noise(const Matrix& Y, const NoiseSpec& spec);

// Bandlimited planted-model instance: graphs with k_r / k_c components on
// each side (disconnected when eta = 0, weakly bridged with weight eta
// otherwise) and Y = P G Q^T drawn from the spans of their leading
// eigenvectors.
struct SynthLowRank {
  Matrix Y;  // clean p x n data
  GraphModel row_graph;
  GraphModel col_graph;
  Matrix row_basis;  // P, p x k_r (orthonormal)
  Matrix col_basis;  // Q, n x k_c (orthonormal)
  Matrix coeff;      // G, k_r x k_c
  std::vector<int> row_labels;  // component id per row
  std::vector<int> col_labels;  // component id per column
};

// Coefficients are drawn Gaussian and then given the singular-value
// profile linspace(1, 0.3): a raw square Gaussian is ill-conditioned with
// high probability, which would make the planted rank undetectable at the
// 0.1 threshold.
SynthLowRank synth_lowrank(Index p, Index n, Index k_r, Index k_c, double eta, std::uint64_t seed,
                           LaplacianKind kind = LaplacianKind::combinatorial);

// k well-separated Gaussian point clouds as columns.
struct SynthBlobs {
  Matrix Y;  // p x n
  std::vector<int> labels;
};

SynthBlobs synth_blobs(Index p, Index n, Index k, double separation, double spread,
                       std::uint64_t seed);

}  // namespace cpcag
