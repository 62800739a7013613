#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpcag/eigs.hpp"
#include "cpcag/graph.hpp"
#include "cpcag/solvers.hpp"
#include "cpcag/sparse.hpp"
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

SparseMatrix complete4_laplacian() {
  std::vector<Triplet> trips;
  for (Index i = 0; i < 4; ++i) {
    trips.push_back({i, i, 3.0});
    for (Index j = 0; j < 4; ++j)
      if (i != j) trips.push_back({i, j, -1.0});
  }
  return SparseMatrix::from_triplets(4, 4, trips);
}

}  // namespace

TEST_CASE("csr construction merges duplicates and drops zeros") {
  const SparseMatrix A = SparseMatrix::from_triplets(
      2, 3, {{0, 2, 1.0}, {0, 2, 2.0}, {1, 0, 5.0}, {1, 1, -5.0}, {1, 1, 5.0}});
  CHECK(A.nonzeros() == 2);
  CHECK(A.coeff(0, 2) == 3.0);
  CHECK(A.coeff(1, 0) == 5.0);
  CHECK(A.coeff(1, 1) == 0.0);

  // Row pointers monotone, column indices strictly increasing per row.
  for (std::size_t r = 0; r + 1 < A.row_ptr().size(); ++r)
    CHECK(A.row_ptr()[r] <= A.row_ptr()[r + 1]);
}

TEST_CASE("csr round trip against dense accumulation") {
  CounterRng rng(7);
  std::vector<Triplet> trips;
  Matrix dense = Matrix::Zero(6, 5);
  for (int t = 0; t < 40; ++t) {
    const Index i = static_cast<Index>(rng.below(6));
    const Index j = static_cast<Index>(rng.below(5));
    const double v = rng.next_gaussian();
    trips.push_back({i, j, v});
    dense(i, j) += v;
  }
  const SparseMatrix A = SparseMatrix::from_triplets(6, 5, trips);
  CHECK((A.to_dense() - dense).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("spmv identity and zero") {
  Vector x(3);
  x << 1, 2, 3;
  CHECK((SparseMatrix::identity(3).multiply(x) - x).norm() == 0.0);

  const SparseMatrix zero = SparseMatrix::from_triplets(3, 3, {});
  CHECK(zero.multiply(x).norm() == 0.0);
}

TEST_CASE("spmv matches dense product") {
  const Matrix D = oracle::gaussian_matrix(5, 5, 11);
  const SparseMatrix A = SparseMatrix::from_dense(D);
  const Vector x = oracle::gaussian_matrix(5, 1, 12).col(0);
  CHECK((A.multiply(x) - D * x).cwiseAbs().maxCoeff() <= 1e-14);

  const Matrix X = oracle::gaussian_matrix(5, 3, 13);
  CHECK((A.multiply(X) - D * X).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((A.right_multiply(X.transpose()) - X.transpose() * D).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("spmv dimension mismatch throws") {
  const Vector x = Vector::Zero(4);
  CHECK_THROWS_AS((void)SparseMatrix::identity(3).multiply(x), std::invalid_argument);
}

TEST_CASE("submatrix is a pure gather") {
  const Matrix D = oracle::gaussian_matrix(6, 6, 21);
  const SparseMatrix A = SparseMatrix::from_dense(D);
  const IndexList rows{4, 0, 2};
  const IndexList cols{1, 5};
  CHECK((A.submatrix(rows, cols).to_dense() - oracle::gather(D, rows, cols)).norm() == 0.0);
}

TEST_CASE("connected components of a two-block pattern") {
  // 0-1-2 chain and 3-4 pair.
  const SparseMatrix W = SparseMatrix::from_triplets(
      5, 5, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {3, 4, 1.0}, {4, 3, 1.0}});
  const auto comps = W.connected_components();
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == IndexList{0, 1, 2});
  CHECK(comps[1] == IndexList{3, 4});
}

TEST_CASE("pcg on identity converges in one iteration") {
  const SparseMatrix I = SparseMatrix::identity(4);
  const Vector b = oracle::gaussian_matrix(4, 1, 31).col(0);
  Vector x;
  const PcgResult r = pcg_solve(I, b, x, PcgOptions{});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK((x - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("pcg diagonal solve") {
  const SparseMatrix A =
      SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 4.0}});
  Vector b(3);
  b << 1, 2, 4;
  Vector x;
  const PcgResult r = pcg_solve(A, b, x, PcgOptions{});
  CHECK(r.converged);
  CHECK((x - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pcg grounded path block matches dense LU") {
  // Interior block of a path Laplacian (grounded at one end) is SPD.
  const Matrix L = path3_laplacian().to_dense();
  const IndexList block{1, 2};
  const Matrix Ablock = oracle::gather(L, block, block);
  const SparseMatrix A = SparseMatrix::from_dense(Ablock);
  const Vector b = oracle::gaussian_matrix(2, 1, 32).col(0);
  Vector x;
  PcgOptions opt;
  opt.tol = 1e-12;
  const PcgResult r = pcg_solve(A, b, x, opt);
  CHECK(r.converged);
  const Vector expect = Ablock.partialPivLu().solve(b);
  CHECK((x - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("pcg residual contract holds on random SPD systems") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix G = oracle::gaussian_matrix(12, 12, 100 + seed);
    const Matrix S = G * G.transpose() + 0.5 * Matrix::Identity(12, 12);
    const SparseMatrix A = SparseMatrix::from_dense(S);
    const Vector b = oracle::gaussian_matrix(12, 1, 200 + seed).col(0);
    Vector x;
    PcgOptions opt;
    opt.tol = 1e-9;
    const PcgResult r = pcg_solve(A, b, x, opt);
    CHECK(r.converged);
    CHECK((S * x - b).norm() <= opt.tol * b.norm() * 1.0000001);
  }
}

TEST_CASE("pcg breakdown names the iteration") {
  const SparseMatrix zero = SparseMatrix::from_triplets(2, 2, {});
  Vector b(2);
  b << 1, 1;
  Vector x;
  CHECK_THROWS_WITH_AS(pcg_solve(zero, b, x, PcgOptions{}, false),
                       doctest::Contains("iteration 0"), std::runtime_error);
}

TEST_CASE("pcg zero rhs returns zero immediately") {
  Vector x;
  const PcgResult r = pcg_solve(SparseMatrix::identity(3), Vector::Zero(3), x, PcgOptions{});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("power iteration on a diagonal matrix") {
  const SparseMatrix A =
      SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 5.0}, {2, 2, 3.0}});
  CHECK(power_iteration_norm(A, 1e-12, 3) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("power iteration on the complete-graph laplacian") {
  // K_n has Laplacian spectrum {0, n, ..., n}.
  CHECK(power_iteration_norm(complete4_laplacian(), 1e-12, 5) ==
        doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("power iteration on the zero matrix returns 0") {
  CHECK(power_iteration_norm(SparseMatrix::from_triplets(4, 4, {}), 1e-10, 9) == 0.0);
}

TEST_CASE("power iteration deterministic under a fixed seed") {
  const SparseMatrix A = SparseMatrix::from_dense(
      (oracle::gaussian_matrix(8, 8, 41) + oracle::gaussian_matrix(8, 8, 41).transpose()).eval());
  CHECK(power_iteration_norm(A, 1e-10, 7) == power_iteration_norm(A, 1e-10, 7));
}

TEST_CASE("sym_eig on the path graph") {
  const EigenPairs e = sym_eig(path3_laplacian(), 3);
  // Analytic spectrum of the 3-node path Laplacian.
  CHECK(std::abs(e.eigenvalues[0]) <= 1e-10);
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("sym_eig invariants: orthonormality, residual, null space") {
  const SparseMatrix W = oracle::random_graph_adjacency(20, 0.2, 55);
  const Matrix Ld = oracle::dense_laplacian(W);
  const SparseMatrix L = SparseMatrix::from_dense(Ld);
  const EigenPairs e = sym_eig(L, 6);

  CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  const double scale = Ld.cwiseAbs().maxCoeff();
  for (Index i = 0; i < 6; ++i)
    CHECK((Ld * e.eigenvectors.col(i) - e.eigenvalues[i] * e.eigenvectors.col(i)).norm() <=
          1e-8 * scale);
  for (Index i = 0; i + 1 < 6; ++i) CHECK(e.eigenvalues[i] <= e.eigenvalues[i + 1] + 1e-14);

  // Connected graph: one zero eigenvalue, constant eigenvector.
  CHECK(std::abs(e.eigenvalues[0]) <= 1e-10);
  const Vector v0 = e.eigenvectors.col(0);
  CHECK((v0.array() - v0.mean()).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("sym_eig zero eigenvalue count equals component count") {
  // Three components: sizes 3, 2, 2.
  std::vector<Triplet> trips;
  auto edge = [&trips](Index i, Index j, double w) {
    trips.push_back({i, j, -w});
    trips.push_back({j, i, -w});
    trips.push_back({i, i, w});
    trips.push_back({j, j, w});
  };
  edge(0, 1, 1.0);
  edge(1, 2, 0.5);
  edge(3, 4, 2.0);
  edge(5, 6, 1.0);
  const SparseMatrix L = SparseMatrix::from_triplets(7, 7, trips);
  const EigenPairs e = sym_eig(L, 7);
  Index zeros = 0;
  for (Index i = 0; i < 7; ++i)
    if (std::abs(e.eigenvalues[i]) <= 1e-10) ++zeros;
  CHECK(zeros == 3);
}

TEST_CASE("sym_eig matches a dense oracle on a random graph") {
  const SparseMatrix W = oracle::random_graph_adjacency(15, 0.3, 66);
  const Matrix Ld = oracle::dense_laplacian(W);
  const EigenPairs e = sym_eig(SparseMatrix::from_dense(Ld), 5);
  const Eigen::SelfAdjointEigenSolver<Matrix> ref(Ld);
  for (Index i = 0; i < 5; ++i)
    CHECK(e.eigenvalues[i] == doctest::Approx(ref.eigenvalues()[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("sym_eig rejects k beyond the dimension") {
  CHECK_THROWS_AS((void)sym_eig(path3_laplacian(), 4), std::invalid_argument);
}

TEST_CASE("sym_eig sign convention is deterministic") {
  const EigenPairs a = sym_eig(path3_laplacian(), 3);
  const EigenPairs b = sym_eig(path3_laplacian(), 3);
  CHECK((a.eigenvectors - b.eigenvectors).norm() == 0.0);
  for (Index j = 0; j < 3; ++j) {
    const double peak = a.eigenvectors.col(j).cwiseAbs().maxCoeff();
    for (Index i = 0; i < 3; ++i) {
      if (std::abs(a.eigenvectors(i, j)) > 1e-12 * peak) {
        CHECK(a.eigenvectors(i, j) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("thin_svd of a diagonal matrix") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  const SvdResult s = thin_svd(D);
  CHECK(s.sigma[0] == doctest::Approx(3.0));
  CHECK(s.sigma[1] == doctest::Approx(1.0));
  CHECK((s.U.cwiseAbs() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((s.V.cwiseAbs() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("thin_svd of a rank-1 outer product") {
  const Vector a = oracle::gaussian_matrix(6, 1, 71).col(0);
  const Vector b = oracle::gaussian_matrix(4, 1, 72).col(0);
  const SvdResult s = thin_svd(a * b.transpose());
  CHECK(s.sigma[0] == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));
  CHECK(s.sigma[1] <= 1e-12);
}

TEST_CASE("thin_svd reconstruction identity") {
  const Matrix A = oracle::gaussian_matrix(6, 4, 73);
  const SvdResult s = thin_svd(A);
  CHECK((s.U * s.sigma.asDiagonal() * s.V.transpose() - A).norm() <= 1e-12 * A.norm());
  CHECK((s.U.transpose() * s.U - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((s.V.transpose() * s.V - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
  for (Index i = 0; i + 1 < 4; ++i) CHECK(s.sigma[i] >= s.sigma[i + 1]);
}

TEST_CASE("detect_rank applies the relative threshold") {
  Vector s(4);
  s << 10.0, 5.0, 1.01, 0.09;
  CHECK(detect_rank(s, 0.1) == 3);
  CHECK(detect_rank(Vector::Zero(3), 0.1) == 0);
}
