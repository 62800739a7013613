#include "cpcag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpcag/eigs.hpp"
#include "cpcag/rng.hpp"

namespace cpcag {

Matrix add_noise(const Matrix& Y, const NoiseSpec& spec) {
  if (!(spec.level >= 0.0 && spec.level <= 1.0))
    throw std::invalid_argument("noise: level must be in [0,1]");
  if (spec.kind == NoiseKind::none || spec.level == 0.0) return Y;

  const Index p = Y.rows();
  const Index n = Y.cols();
  Matrix out = Y;
  CounterRng rng = CounterRng::derive(spec.seed, 0x6e6f697365ULL);

  switch (spec.kind) {
    case NoiseKind::gaussian:
    case NoiseKind::laplacian: {
      for (Index i = 0; i < p; ++i) {
        const double mean = Y.row(i).mean();
        const double sd = std::sqrt((Y.row(i).array() - mean).square().mean());
        const double scale = spec.level * sd;
        if (scale == 0.0) continue;
        if (spec.kind == NoiseKind::gaussian) {
          for (Index j = 0; j < n; ++j) out(i, j) += scale * rng.next_gaussian();
        } else {
          const double b = scale / std::sqrt(2.0);  // Laplace(b) has std b*sqrt(2)
          for (Index j = 0; j < n; ++j) out(i, j) += b * rng.next_laplace();
        }
      }
      break;
    }
    case NoiseKind::sparse: {
      const Index m = static_cast<Index>(std::floor(spec.level * static_cast<double>(p)));
      if (m == 0) break;
      IndexList rows(static_cast<std::size_t>(p));
      for (Index j = 0; j < n; ++j) {
        const double lo = Y.col(j).minCoeff();
        const double hi = Y.col(j).maxCoeff();
        std::iota(rows.begin(), rows.end(), Index{0});
        for (Index t = 0; t < m; ++t) {
          const Index pick = t + static_cast<Index>(rng.below(static_cast<std::uint64_t>(p - t)));
          std::swap(rows[static_cast<std::size_t>(t)], rows[static_cast<std::size_t>(pick)]);
          out(rows[static_cast<std::size_t>(t)], j) = lo + (hi - lo) * rng.next_double();
        }
      }
      break;
    }
    case NoiseKind::none:
      break;
  }
  return out;
}

namespace {

// Point cloud with k well-separated clusters in a low-dimensional space;
// a kNN graph on it is exactly k disconnected components.
Matrix component_cloud(Index n, Index k, CounterRng& rng, std::vector<int>& labels) {
  constexpr Index dim = 3;
  constexpr double kSeparation = 1000.0;
  Matrix pts(dim, n);
  labels.assign(static_cast<std::size_t>(n), 0);
  const Index base = n / k;
  const Index extra = n % k;
  Index at = 0;
  for (Index c = 0; c < k; ++c) {
    const Index size = base + (c < extra ? 1 : 0);
    for (Index t = 0; t < size; ++t, ++at) {
      labels[static_cast<std::size_t>(at)] = static_cast<int>(c);
      for (Index d = 0; d < dim; ++d)
        pts(d, at) = static_cast<double>(c) * kSeparation * (d == 0 ? 1.0 : 0.25) +
                     rng.next_gaussian();
    }
  }
  return pts;
}

GraphModel component_graph(Index n, Index k, double eta, CounterRng rng, std::vector<int>& labels,
                           LaplacianKind kind) {
  if (k < 1 || n < 2 * k) throw std::invalid_argument("synthetic graph: need at least 2 nodes per component");
  const Matrix pts = component_cloud(n, k, rng, labels);
  const Index min_size = n / k;
  const Index K = std::max<Index>(1, std::min<Index>(7, min_size - 1));
  GraphModel base = build_knn_graph(pts, Axis::cols, K, kind);
  if (eta <= 0.0) return base;

  // Bridge consecutive components with one weak edge each.
  std::vector<Triplet> trips;
  const auto& W = base.adjacency;
  for (Index r = 0; r < n; ++r)
    for (Index t = W.row_ptr()[static_cast<std::size_t>(r)];
         t < W.row_ptr()[static_cast<std::size_t>(r) + 1]; ++t)
      trips.push_back({r, W.col_idx()[static_cast<std::size_t>(t)],
                       W.values()[static_cast<std::size_t>(t)]});
  Index first_of_next = 0;
  for (Index c = 0; c + 1 < k; ++c) {
    const Index u = first_of_next;
    while (first_of_next < n && labels[static_cast<std::size_t>(first_of_next)] == static_cast<int>(c))
      ++first_of_next;
    const Index v = first_of_next;
    trips.push_back({u, v, eta});
    trips.push_back({v, u, eta});
  }
  return graph_from_adjacency(SparseMatrix::from_triplets(n, n, std::move(trips)), kind);
}

}  // namespace

SynthLowRank synth_lowrank(Index p, Index n, Index k_r, Index k_c, double eta, std::uint64_t seed,
                           LaplacianKind kind) {
  if (k_r < 1 || k_r > p || k_c < 1 || k_c > n)
    throw std::invalid_argument("synth_lowrank: infeasible sizes");

  SynthLowRank out;
  out.row_graph = component_graph(p, k_r, eta, CounterRng::derive(seed, 0x726f77ULL),
                                  out.row_labels, kind);
  out.col_graph = component_graph(n, k_c, eta, CounterRng::derive(seed, 0x636f6cULL),
                                  out.col_labels, kind);

  out.row_basis = sym_eig(out.row_graph.laplacian, k_r).eigenvectors;
  out.col_basis = sym_eig(out.col_graph.laplacian, k_c).eigenvectors;

  // Gaussian coefficients with a pinned well-conditioned spectrum.
  CounterRng rng = CounterRng::derive(seed, 0x636f656666ULL);
  Matrix G(k_r, k_c);
  for (Index j = 0; j < k_c; ++j)
    for (Index i = 0; i < k_r; ++i) G(i, j) = rng.next_gaussian();
  const SvdResult svd = thin_svd(G);
  const Index r = svd.sigma.size();
  Vector profile(r);
  for (Index i = 0; i < r; ++i)
    profile[i] = r == 1 ? 1.0 : 1.0 - 0.7 * static_cast<double>(i) / static_cast<double>(r - 1);
  out.coeff = svd.U * profile.asDiagonal() * svd.V.transpose();
  out.Y = out.row_basis * out.coeff * out.col_basis.transpose();
  return out;
}

SynthBlobs synth_blobs(Index p, Index n, Index k, double separation, double spread,
                       std::uint64_t seed) {
  if (k < 1 || k > n) throw std::invalid_argument("synth_blobs: infeasible sizes");
  if (!(separation > 0.0) || !(spread > 0.0))
    throw std::invalid_argument("synth_blobs: separation and spread must be positive");

  CounterRng rng = CounterRng::derive(seed, 0x626c6f62ULL);
  Matrix centers(p, k);
  for (Index c = 0; c < k; ++c)
    for (Index i = 0; i < p; ++i) centers(i, c) = separation * rng.next_gaussian();

  SynthBlobs out;
  out.Y.resize(p, n);
  out.labels.assign(static_cast<std::size_t>(n), 0);
  const Index base = n / k;
  const Index extra = n % k;
  Index at = 0;
  for (Index c = 0; c < k; ++c) {
    const Index size = base + (c < extra ? 1 : 0);
    for (Index t = 0; t < size; ++t, ++at) {
      out.labels[static_cast<std::size_t>(at)] = static_cast<int>(c);
      for (Index i = 0; i < p; ++i) out.Y(i, at) = centers(i, c) + spread * rng.next_gaussian();
    }
  }
  return out;
}

}  // namespace cpcag
