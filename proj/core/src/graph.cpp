#include "cpcag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "cpcag/solvers.hpp"

namespace cpcag {

namespace {

SparseMatrix laplacian_from_adjacency(const SparseMatrix& W, const Vector& degrees,
                                      LaplacianKind kind) {
  const Index n = W.rows();
  std::vector<Triplet> trips;
  trips.reserve(W.values().size() + static_cast<std::size_t>(n));
  if (kind == LaplacianKind::combinatorial) {
    for (Index i = 0; i < n; ++i)
      if (degrees[i] != 0.0) trips.push_back({i, i, degrees[i]});
    for (Index r = 0; r < n; ++r)
      for (Index k = W.row_ptr()[static_cast<std::size_t>(r)];
           k < W.row_ptr()[static_cast<std::size_t>(r) + 1]; ++k)
        trips.push_back({r, W.col_idx()[static_cast<std::size_t>(k)],
                         -W.values()[static_cast<std::size_t>(k)]});
  } else {
    // D^{-1/2} (D - W) D^{-1/2}; isolated nodes contribute zero rows.
    Vector dinv_sqrt = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) dinv_sqrt[i] = degrees[i] > 0.0 ? 1.0 / std::sqrt(degrees[i]) : 0.0;
    for (Index i = 0; i < n; ++i)
      if (degrees[i] > 0.0) trips.push_back({i, i, 1.0});
    for (Index r = 0; r < n; ++r)
      for (Index k = W.row_ptr()[static_cast<std::size_t>(r)];
           k < W.row_ptr()[static_cast<std::size_t>(r) + 1]; ++k) {
        const Index c = W.col_idx()[static_cast<std::size_t>(k)];
        trips.push_back({r, c, -W.values()[static_cast<std::size_t>(k)] * dinv_sqrt[r] * dinv_sqrt[c]});
      }
  }
  return SparseMatrix::from_triplets(n, n, std::move(trips));
}

}  // namespace

GraphModel build_knn_graph(const Matrix& X, Axis axis, Index K, LaplacianKind kind,
                           double sigma2_override) {
  // Points are columns of P (features stacked per column).
  const Matrix P = axis == Axis::cols ? X : Matrix(X.transpose());
  const Index n = P.cols();
  if (K < 1) throw std::invalid_argument("knn graph: K must be >= 1");
  if (n < K + 1)
    throw std::invalid_argument("knn graph: need at least K+1 points, got " + std::to_string(n));

  // Squared distances via the Gram matrix; d2(i,j) computed once per pair
  // so the matrix is exactly symmetric.
  const Matrix gram = P.transpose() * P;
  Matrix d2 = Matrix::Zero(n, n);
  Index distinct = 1;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }
  {
    // Count distinct points exactly (coordinate equality).
    std::vector<Index> reps;
    for (Index i = 0; i < n; ++i) {
      bool fresh = true;
      for (const Index r : reps)
        if (P.col(i) == P.col(r)) {
          fresh = false;
          break;
        }
      if (fresh) reps.push_back(i);
    }
    distinct = static_cast<Index>(reps.size());
  }
  if (distinct < K)
    throw std::invalid_argument("knn graph: fewer distinct points (" + std::to_string(distinct) +
                                ") than K (" + std::to_string(K) + ")");

  // K nearest neighbors per point (self excluded); ties pick the lower index.
  std::vector<IndexList> neighbors(static_cast<std::size_t>(n));
  double sigma2_sum = 0.0;
  std::vector<std::pair<double, Index>> order;
  order.reserve(static_cast<std::size_t>(n) - 1);
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) order.emplace_back(d2(i, j), j);
    std::nth_element(order.begin(), order.begin() + (K - 1), order.end());
    std::sort(order.begin(), order.begin() + K);
    double mean_d2 = 0.0;
    auto& nb = neighbors[static_cast<std::size_t>(i)];
    nb.reserve(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) {
      nb.push_back(order[static_cast<std::size_t>(k)].second);
      mean_d2 += order[static_cast<std::size_t>(k)].first;
    }
    sigma2_sum += mean_d2 / static_cast<double>(K);
  }

  const double sigma2 = sigma2_override > 0.0 ? sigma2_override : sigma2_sum / static_cast<double>(n);

  // Union symmetrization, then Gaussian weights. Coincident points always
  // get weight exp(0) = 1, even when sigma2 degenerates to 0.
  std::set<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i)
    for (const Index j : neighbors[static_cast<std::size_t>(i)])
      edges.insert({std::min(i, j), std::max(i, j)});

  std::vector<Triplet> trips;
  trips.reserve(edges.size() * 2);
  for (const auto& [i, j] : edges) {
    const double d = d2(i, j);
    const double w = d == 0.0 ? 1.0 : std::exp(-d / sigma2);
    if (w == 0.0) continue;
    trips.push_back({i, j, w});
    trips.push_back({j, i, w});
  }

  GraphModel g;
  g.n_nodes = n;
  g.K = K;
  g.sigma2 = sigma2;
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(trips));
  g.degrees = g.adjacency.row_sums();
  g.kind = kind;
  g.laplacian = laplacian_from_adjacency(g.adjacency, g.degrees, kind);
  return g;
}

GraphModel graph_from_adjacency(const SparseMatrix& W, LaplacianKind kind) {
  if (W.rows() != W.cols()) throw std::invalid_argument("adjacency must be square");
  if (W.max_abs_asymmetry() != 0.0) throw std::invalid_argument("adjacency must be symmetric");
  for (Index i = 0; i < W.rows(); ++i)
    if (W.coeff(i, i) != 0.0) throw std::invalid_argument("adjacency must have zero diagonal");
  for (const double v : W.values())
    if (v < 0.0) throw std::invalid_argument("adjacency weights must be nonnegative");

  GraphModel g;
  g.n_nodes = W.rows();
  g.K = 0;
  g.sigma2 = 0.0;
  g.adjacency = W;
  g.degrees = W.row_sums();
  g.kind = kind;
  g.laplacian = laplacian_from_adjacency(W, g.degrees, kind);
  return g;
}

CoherenceReport cumulative_coherence(const EigenPairs& basis, Index k) {
  if (k < 1 || k > basis.order())
    throw std::invalid_argument("coherence: order k exceeds available eigenvectors");
  const Index n = basis.dimension();
  CoherenceReport rep;
  rep.k = k;
  rep.per_node = Vector::Zero(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i)
    rep.per_node[i] = root_n * basis.eigenvectors.row(i).head(k).norm();
  rep.nu = rep.per_node.maxCoeff();
  return rep;
}

SparseMatrix kron_reduce(const SparseMatrix& L, const IndexList& keep, double pcg_tol,
                         double prune_tol) {
  const Index n = L.rows();
  if (L.cols() != n) throw std::invalid_argument("kron reduction: square Laplacian required");
  std::vector<char> kept(static_cast<std::size_t>(n), 0);
  for (const Index i : keep) {
    if (i < 0 || i >= n) throw std::invalid_argument("kron reduction: index out of range");
    if (kept[static_cast<std::size_t>(i)]) throw std::invalid_argument("kron reduction: duplicate index");
    kept[static_cast<std::size_t>(i)] = 1;
  }

  // Interior solves are only well-posed when every component is grounded
  // by at least one kept node.
  for (const IndexList& comp : L.connected_components()) {
    bool grounded = false;
    for (const Index u : comp)
      if (kept[static_cast<std::size_t>(u)]) {
        grounded = true;
        break;
      }
    if (!grounded)
      throw std::runtime_error("kron reduction: connected component containing node " +
                               std::to_string(comp.front()) + " has no kept node");
  }

  IndexList interior;
  interior.reserve(static_cast<std::size_t>(n) - keep.size());
  for (Index i = 0; i < n; ++i)
    if (!kept[static_cast<std::size_t>(i)]) interior.push_back(i);

  const SparseMatrix L_bb = L.submatrix(keep, keep);
  if (interior.empty()) return L_bb;

  const SparseMatrix L_aa = L.submatrix(interior, interior);
  const SparseMatrix L_ba = L.submatrix(keep, interior);
  const Vector diag_aa = L_aa.diagonal();

  const Index m = static_cast<Index>(keep.size());
  Matrix schur = L_bb.to_dense();
  PcgOptions opt;
  opt.tol = pcg_tol;
  opt.max_iter = 20 * L_aa.rows() + 100;

  // Column j of L(interior, keep) is row j of L(keep, interior) by symmetry.
  Vector rhs(static_cast<Index>(interior.size()));
  for (Index j = 0; j < m; ++j) {
    rhs.setZero();
    bool nonzero = false;
    for (Index k = L_ba.row_ptr()[static_cast<std::size_t>(j)];
         k < L_ba.row_ptr()[static_cast<std::size_t>(j) + 1]; ++k) {
      rhs[L_ba.col_idx()[static_cast<std::size_t>(k)]] = L_ba.values()[static_cast<std::size_t>(k)];
      nonzero = true;
    }
    if (!nonzero) continue;
    Vector z = Vector::Zero(rhs.size());
    const PcgResult r = pcg_solve([&L_aa](const Vector& v) { return L_aa.multiply(v); }, rhs, z,
                                  opt, &diag_aa);
    if (!r.converged)
      throw std::runtime_error("kron reduction: interior solve failed to converge for kept node " +
                               std::to_string(keep[static_cast<std::size_t>(j)]));
    schur.col(j) -= L_ba.multiply(z);
  }

  schur = 0.5 * (schur + schur.transpose().eval());
  return SparseMatrix::from_dense(schur, prune_tol);
}

SpectralGap spectral_gap(const EigenPairs& basis, Index k) {
  if (k < 1 || basis.order() < k + 1)
    throw std::invalid_argument("spectral gap: need at least k+1 eigenvalues");
  SpectralGap g;
  g.k = k;
  // A PSD Laplacian can surface eigenvalues at -1e-16; clamp those.
  g.lambda_k = std::max(0.0, basis.eigenvalues[k - 1]);
  g.lambda_k1 = std::max(0.0, basis.eigenvalues[k]);
  if (g.lambda_k1 <= 1e-14)
    throw std::runtime_error("gap undefined: graph has > k components");
  g.ratio = g.lambda_k / g.lambda_k1;
  return g;
}

}  // namespace cpcag
