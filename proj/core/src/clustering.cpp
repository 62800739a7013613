#include "cpcag/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpcag/decoders.hpp"
#include "cpcag/rng.hpp"

namespace cpcag {

Matrix ClusterLabels::indicator() const {
  Matrix C = Matrix::Zero(size(), k);
  for (Index i = 0; i < size(); ++i) C(i, assignments[static_cast<std::size_t>(i)]) = 1.0;
  return C;
}

ClusterLabels ClusterLabels::from_assignments(std::vector<int> assignments, Index k) {
  if (k < 1) throw std::invalid_argument("labels: k must be >= 1");
  for (const int a : assignments)
    if (a < 0 || a >= k) throw std::invalid_argument("labels: assignment out of range");
  return ClusterLabels{std::move(assignments), k};
}

namespace {

struct LloydRun {
  std::vector<int> assignments;
  double wcss = std::numeric_limits<double>::infinity();
};

Index nearest_centroid(const Matrix& points, const Matrix& centroids, Index j) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centroids.cols(); ++c) {
    const double d = (points.col(j) - centroids.col(c)).squaredNorm();
    if (d < best_d) {  // strict: ties keep the lower centroid index
      best_d = d;
      best = c;
    }
  }
  return best;
}

LloydRun lloyd_once(const Matrix& X, Index k, Index max_iter, CounterRng rng) {
  const Index n = X.cols();
  Matrix centroids(X.rows(), k);

  // k-means++ seeding.
  centroids.col(0) = X.col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector min_d2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (Index c = 1; c < k; ++c) {
    for (Index j = 0; j < n; ++j)
      min_d2[j] = std::min(min_d2[j], (X.col(j) - centroids.col(c - 1)).squaredNorm());
    const double total = min_d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      for (Index j = 0; j < n; ++j) {
        target -= min_d2[j];
        if (target <= 0.0) {
          pick = j;
          break;
        }
        pick = j;
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.col(c) = X.col(pick);
  }

  LloydRun run;
  run.assignments.assign(static_cast<std::size_t>(n), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k));
  for (Index it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Index j = 0; j < n; ++j) {
      const int a = static_cast<int>(nearest_centroid(X, centroids, j));
      if (a != run.assignments[static_cast<std::size_t>(j)]) {
        run.assignments[static_cast<std::size_t>(j)] = a;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    Matrix sums = Matrix::Zero(X.rows(), k);
    std::fill(counts.begin(), counts.end(), Index{0});
    for (Index j = 0; j < n; ++j) {
      sums.col(run.assignments[static_cast<std::size_t>(j)]) += X.col(j);
      ++counts[static_cast<std::size_t>(run.assignments[static_cast<std::size_t>(j)])];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an emptied cluster from the point farthest from its
        // current centroid (lowest index on ties).
        Index far = 0;
        double far_d = -1.0;
        for (Index j = 0; j < n; ++j) {
          const double d =
              (X.col(j) - centroids.col(run.assignments[static_cast<std::size_t>(j)])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = j;
          }
        }
        centroids.col(c) = X.col(far);
        run.assignments[static_cast<std::size_t>(far)] = static_cast<int>(c);
      }
    }
  }

  run.wcss = 0.0;
  for (Index j = 0; j < n; ++j)
    run.wcss += (X.col(j) - centroids.col(run.assignments[static_cast<std::size_t>(j)])).squaredNorm();
  return run;
}

}  // namespace

ClusterLabels kmeans(const Matrix& X, Index k, Index restarts, std::uint64_t seed,
                     Index max_iter) {
  const Index n = X.cols();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (k > n) throw std::invalid_argument("kmeans: more clusters than points");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

  LloydRun best;
  for (Index r = 0; r < restarts; ++r) {
    LloydRun run = lloyd_once(X, k, max_iter, CounterRng::derive(seed, static_cast<std::uint64_t>(r)));
    if (run.wcss < best.wcss) best = std::move(run);  // strict: ties keep earlier restart
  }
  return ClusterLabels::from_assignments(std::move(best.assignments), k);
}

ClusterLabels decode_labels(const ClusterLabels& sampled, const SamplingPlan& plan,
                            const SparseMatrix& Lc, double pcg_tol, Index pcg_max_iter) {
  if (sampled.size() != plan.rho_c())
    throw std::invalid_argument("decode_labels: sampled labels do not match plan");
  if (Lc.rows() != plan.n)
    throw std::invalid_argument("decode_labels: column Laplacian does not match plan");

  const Matrix C = graph_upsample(Lc, plan.omega_c, sampled.indicator(), pcg_tol, pcg_max_iter);

  std::vector<int> assignments(static_cast<std::size_t>(plan.n), 0);
  for (Index i = 0; i < plan.n; ++i) {
    Index arg = 0;
    double best = C(i, 0);
    for (Index j = 1; j < sampled.k; ++j)
      if (C(i, j) > best) {  // strict: ties keep the lowest column index
        best = C(i, j);
        arg = j;
      }
    assignments[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return ClusterLabels::from_assignments(std::move(assignments), sampled.k);
}

namespace detail {

// Hungarian method on cost = -score (minimization with potentials).
std::vector<Index> max_assignment(const Matrix& score) {
  const Index n = score.rows();
  if (score.cols() != n) throw std::invalid_argument("assignment: square matrix required");

  // 1-based helper arrays per the classic shortest-augmenting-path scheme.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  const double inf = std::numeric_limits<double>::infinity();

  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = -score(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> row_to_col(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j)
    row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace detail

double clustering_error(const ClusterLabels& pred, const ClusterLabels& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("clustering error: label vectors differ in length");
  if (pred.k != truth.k) throw std::invalid_argument("clustering error: cluster counts differ");
  const Index n = pred.size();
  if (n == 0) throw std::invalid_argument("clustering error: empty labels");

  Matrix contingency = Matrix::Zero(pred.k, pred.k);
  for (Index i = 0; i < n; ++i)
    contingency(pred.assignments[static_cast<std::size_t>(i)],
                truth.assignments[static_cast<std::size_t>(i)]) += 1.0;

  const std::vector<Index> perm = detail::max_assignment(contingency);
  double agree = 0.0;
  for (Index c = 0; c < pred.k; ++c) agree += contingency(c, perm[static_cast<std::size_t>(c)]);
  return 1.0 - agree / static_cast<double>(n);
}

}  // namespace cpcag
