#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cpcag/graph.hpp"
#include "oracles.hpp"

using namespace cpcag;

namespace {

SparseMatrix path3_laplacian() {
  return SparseMatrix::from_triplets(3, 3,
                                     {{0, 0, 1.0},
                                      {0, 1, -1.0},
                                      {1, 0, -1.0},
                                      {1, 1, 2.0},
                                      {1, 2, -1.0},
                                      {2, 1, -1.0},
                                      {2, 2, 1.0}});
}

// k equal disconnected cliques of the given size, unit weights.
SparseMatrix block_clique_adjacency(Index k, Index size) {
  std::vector<Triplet> trips;
  for (Index c = 0; c < k; ++c)
    for (Index i = 0; i < size; ++i)
      for (Index j = 0; j < size; ++j)
        if (i != j) trips.push_back({c * size + i, c * size + j, 1.0});
  return SparseMatrix::from_triplets(k * size, k * size, std::move(trips));
}

void check_graph_invariants(const GraphModel& g) {
  CHECK(g.adjacency.max_abs_asymmetry() == 0.0);
  for (Index i = 0; i < g.n_nodes; ++i) CHECK(g.adjacency.coeff(i, i) == 0.0);
  for (const double w : g.adjacency.values()) {
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
  CHECK((g.degrees - g.adjacency.row_sums()).cwiseAbs().maxCoeff() == 0.0);
  if (g.kind == LaplacianKind::combinatorial)
    CHECK(g.laplacian.row_sums().cwiseAbs().maxCoeff() <= 1e-12);
  const EigenPairs e = sym_eig(g.laplacian, 1);
  CHECK(e.eigenvalues[0] >= -1e-10);
}

}  // namespace

TEST_CASE("knn graph: coincident points get weight one") {
  Matrix X(2, 2);  // two identical 2-d points as columns
  X << 1.0, 1.0, 2.0, 2.0;
  const GraphModel g = build_knn_graph(X, Axis::cols, 1);
  CHECK(g.adjacency.coeff(0, 1) == 1.0);
  CHECK(g.adjacency.coeff(1, 0) == 1.0);
  check_graph_invariants(g);
}

TEST_CASE("knn graph: collinear points match the exhaustive kernel oracle") {
  Matrix X(1, 3);
  X << 0.0, 1.0, 10.0;
  const GraphModel g = build_knn_graph(X, Axis::cols, 1);

  // Exhaustive oracle: nearest neighbor of 0 is 1, of 1 is 0, of 2 is 1;
  // union edges (0,1) and (1,2); sigma2 is the mean of per-point mean
  // squared neighbor distances.
  const double sigma2 = (1.0 + 1.0 + 81.0) / 3.0;
  CHECK(g.sigma2 == doctest::Approx(sigma2).epsilon(1e-15));
  CHECK(g.adjacency.coeff(0, 1) == doctest::Approx(std::exp(-1.0 / sigma2)).epsilon(1e-15));
  CHECK(g.adjacency.coeff(1, 2) == doctest::Approx(std::exp(-81.0 / sigma2)).epsilon(1e-15));
  CHECK(g.adjacency.coeff(0, 2) == 0.0);
  CHECK(g.adjacency.nonzeros() == 4);
  check_graph_invariants(g);
}

TEST_CASE("knn graph: ties break toward the lower index") {
  Matrix X(2, 4);
  X.col(0) << 0.0, 0.0;
  X.col(1) << 1.0, 0.0;
  X.col(2) << 0.0, 1.0;
  X.col(3) << 5.0, 5.0;  // equidistant from points 1 and 2
  const GraphModel g = build_knn_graph(X, Axis::cols, 1);
  CHECK(g.adjacency.coeff(1, 3) > 0.0);
  CHECK(g.adjacency.coeff(2, 3) == 0.0);
}

TEST_CASE("knn graph: row axis equals column axis on the transpose") {
  const Matrix X = oracle::gaussian_matrix(6, 12, 17);
  const GraphModel a = build_knn_graph(X, Axis::rows, 2);
  const GraphModel b = build_knn_graph(Matrix(X.transpose()), Axis::cols, 2);
  CHECK((a.adjacency.to_dense() - b.adjacency.to_dense()).norm() == 0.0);
}

TEST_CASE("knn graph: errors") {
  Matrix X(1, 3);
  X << 0.0, 1.0, 2.0;
  CHECK_THROWS_AS((void)build_knn_graph(X, Axis::cols, 3), std::invalid_argument);

  Matrix dup(1, 4);
  dup << 2.0, 2.0, 2.0, 2.0;  // one distinct point, K = 2
  CHECK_THROWS_AS((void)build_knn_graph(dup, Axis::cols, 2), std::invalid_argument);
}

TEST_CASE("knn graph: normalized laplacian matches the dense formula") {
  const Matrix X = oracle::gaussian_matrix(4, 10, 23);
  const GraphModel g = build_knn_graph(X, Axis::cols, 3, LaplacianKind::normalized);
  const Matrix W = g.adjacency.to_dense();
  const Vector deg = W.rowwise().sum();
  Matrix Dinv = Matrix::Zero(10, 10);
  for (Index i = 0; i < 10; ++i) Dinv(i, i) = deg[i] > 0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  const Matrix Ln = Dinv * (Matrix(deg.asDiagonal()) - W) * Dinv;
  CHECK((g.laplacian.to_dense() - Ln).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("knn graph: sigma2 positive when points differ, override respected") {
  const Matrix X = oracle::gaussian_matrix(3, 8, 29);
  const GraphModel g = build_knn_graph(X, Axis::cols, 2);
  CHECK(g.sigma2 > 0.0);
  const GraphModel h = build_knn_graph(X, Axis::cols, 2, LaplacianKind::combinatorial, 2.5);
  CHECK(h.sigma2 == 2.5);
}

TEST_CASE("coherence: full basis reaches sqrt(n)") {
  const SparseMatrix W = oracle::random_graph_adjacency(9, 0.3, 31);
  const EigenPairs e = sym_eig(SparseMatrix::from_dense(oracle::dense_laplacian(W)), 9);
  const CoherenceReport rep = cumulative_coherence(e, 9);
  CHECK(rep.nu == doctest::Approx(std::sqrt(9.0)).epsilon(1e-9));
}

TEST_CASE("coherence: k equal components give nu = sqrt(k)") {
  const SparseMatrix W = block_clique_adjacency(3, 4);
  const GraphModel g = graph_from_adjacency(W);
  const EigenPairs e = sym_eig(g.laplacian, 3);
  const CoherenceReport rep = cumulative_coherence(e, 3);
  CHECK(rep.nu == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("coherence: matches the exhaustive indicator oracle") {
  const SparseMatrix W = oracle::random_graph_adjacency(8, 0.4, 37);
  const Matrix Ld = oracle::dense_laplacian(W);
  const EigenPairs e = sym_eig(SparseMatrix::from_dense(Ld), 8);
  const CoherenceReport rep = cumulative_coherence(e, 3);

  // Brute force: max over all 8 node indicators of sqrt(n) ||B^T delta_i||.
  const Matrix B = e.eigenvectors.leftCols(3);
  double best = 0.0;
  for (Index i = 0; i < 8; ++i) {
    Vector delta = Vector::Zero(8);
    delta[i] = 1.0;
    best = std::max(best, std::sqrt(8.0) * (B.transpose() * delta).norm());
  }
  CHECK(rep.nu == doctest::Approx(best).epsilon(1e-12));
  CHECK(rep.per_node.size() == 8);
}

TEST_CASE("coherence: bounds and monotonicity in k") {
  const SparseMatrix W = oracle::random_graph_adjacency(12, 0.25, 41);
  const EigenPairs e = sym_eig(SparseMatrix::from_dense(oracle::dense_laplacian(W)), 12);
  double prev = 0.0;
  for (Index k = 1; k <= 12; ++k) {
    const CoherenceReport rep = cumulative_coherence(e, k);
    CHECK(rep.nu >= std::sqrt(static_cast<double>(k)) - 1e-9);
    CHECK(rep.nu <= std::sqrt(12.0) + 1e-9);
    CHECK(rep.nu >= prev - 1e-12);
    prev = rep.nu;
  }
  CHECK_THROWS_AS((void)cumulative_coherence(e, 13), std::invalid_argument);
}

TEST_CASE("kron reduction: keeping all nodes returns L unchanged") {
  const SparseMatrix L = path3_laplacian();
  const SparseMatrix R = kron_reduce(L, {0, 1, 2});
  CHECK((R.to_dense() - L.to_dense()).norm() == 0.0);
}

TEST_CASE("kron reduction: path endpoints combine like series resistors") {
  const SparseMatrix R = kron_reduce(path3_laplacian(), {0, 2});
  Matrix expect(2, 2);
  expect << 0.5, -0.5, -0.5, 0.5;
  CHECK((R.to_dense() - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("kron reduction: disconnected components stay disconnected") {
  // Two 2-node components; keep one node of each.
  std::vector<Triplet> trips = {{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 1.0},
                                {2, 2, 2.0}, {2, 3, -2.0}, {3, 2, -2.0}, {3, 3, 2.0}};
  const SparseMatrix L = SparseMatrix::from_triplets(4, 4, trips);
  const SparseMatrix R = kron_reduce(L, {0, 2});
  CHECK(R.nonzeros() == 0);
  CHECK(R.rows() == 2);
}

TEST_CASE("kron reduction: matches the dense Schur oracle on random graphs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Index n = 10 + static_cast<Index>(5 * seed);
    const SparseMatrix W = oracle::random_graph_adjacency(n, 0.15, 1000 + seed);
    const Matrix Ld = oracle::dense_laplacian(W);
    CounterRng rng(CounterRng::mix(seed));
    IndexList keep;
    for (Index i = 0; i < n; ++i)
      if (rng.next_double() < 0.4 || i == 0) keep.push_back(i);
    const SparseMatrix R = kron_reduce(SparseMatrix::from_dense(Ld), keep);
    const Matrix expect = oracle::dense_kron(Ld, keep);
    CHECK((R.to_dense() - expect).cwiseAbs().maxCoeff() <= 1e-10);

    // Laplacian structure survives: symmetric, PSD, zero row sums.
    CHECK(R.max_abs_asymmetry() <= 1e-12);
    CHECK(R.row_sums().cwiseAbs().maxCoeff() <= 1e-9);
    const EigenPairs e = sym_eig(R, 1);
    CHECK(e.eigenvalues[0] >= -1e-10);
  }
}

TEST_CASE("kron reduction: component count is preserved") {
  // Components {0,1,2} and {3,4}; keep two nodes in each.
  std::vector<Triplet> trips;
  auto edge = [&trips](Index i, Index j, double w) {
    trips.push_back({i, j, -w});
    trips.push_back({j, i, -w});
    trips.push_back({i, i, w});
    trips.push_back({j, j, w});
  };
  edge(0, 1, 1.0);
  edge(1, 2, 1.0);
  edge(3, 4, 1.0);
  const SparseMatrix L = SparseMatrix::from_triplets(5, 5, trips);
  const SparseMatrix R = kron_reduce(L, {0, 2, 3, 4});
  const EigenPairs e = sym_eig(R, 4);
  Index zeros = 0;
  for (Index i = 0; i < 4; ++i)
    if (std::abs(e.eigenvalues[i]) <= 1e-10) ++zeros;
  CHECK(zeros == 2);
}

TEST_CASE("kron reduction: ungrounded component is an error") {
  std::vector<Triplet> trips = {{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 1.0},
                                {2, 2, 1.0}, {2, 3, -1.0}, {3, 2, -1.0}, {3, 3, 1.0}};
  const SparseMatrix L = SparseMatrix::from_triplets(4, 4, trips);
  CHECK_THROWS_WITH_AS((void)kron_reduce(L, {0, 1}), doctest::Contains("node 2"),
                       std::runtime_error);
}

TEST_CASE("spectral gap: k components give ratio zero") {
  const SparseMatrix W = block_clique_adjacency(3, 3);
  const EigenPairs e = sym_eig(graph_from_adjacency(W).laplacian, 4);
  const SpectralGap g = spectral_gap(e, 3);
  CHECK(g.lambda_k <= 1e-12);
  CHECK(g.lambda_k1 > 1e-6);
  CHECK(g.ratio <= 1e-12);
}

TEST_CASE("spectral gap: path graph at k = 2") {
  const EigenPairs e = sym_eig(path3_laplacian(), 3);
  const SpectralGap g = spectral_gap(e, 2);
  CHECK(g.lambda_k == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.lambda_k1 == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(g.ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("spectral gap: complete graph has ratio one") {
  std::vector<Triplet> trips;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      if (i != j) trips.push_back({i, j, 1.0});
  const GraphModel g = graph_from_adjacency(SparseMatrix::from_triplets(4, 4, trips));
  const SpectralGap gap = spectral_gap(sym_eig(g.laplacian, 3), 2);
  CHECK(gap.ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral gap: undefined below the component count") {
  const SparseMatrix W = block_clique_adjacency(3, 3);
  const EigenPairs e = sym_eig(graph_from_adjacency(W).laplacian, 3);
  CHECK_THROWS_WITH_AS((void)spectral_gap(e, 2), doctest::Contains("gap undefined"),
                       std::runtime_error);
  CHECK_THROWS_AS((void)spectral_gap(e, 3), std::invalid_argument);  // needs k+1 values
}
