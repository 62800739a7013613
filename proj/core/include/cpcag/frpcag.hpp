#pragma once

#include <utility>
#include <vector>

#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class Loss { l1, l2 };

// min_X phi(Y - X) + gamma_c tr(X Lc X^T) + gamma_r tr(X^T Lr X)
// phi is the entrywise l1 norm or the squared Frobenius norm.
struct FrpcagConfig {
  double gamma_r = 1.0;
  double gamma_c = 1.0;
  Loss loss = Loss::l1;
  double tol = 1e-10;    // stopping: ||Z_{j+1} - Z_j||_F^2 < tol * ||Z_j||_F^2
  Index max_iter = 500;
  double step = 0.0;     // 0 = auto: 1 / (2 gamma_c ||Lc|| + 2 gamma_r ||Lr||)
};

struct SolveTrace {
  std::vector<double> objective;  // one entry per iteration
  Index iterations = 0;
  bool converged = false;
  double final_rel_change = 0.0;  // ||Z_{j+1} - Z_j||_F^2 / ||Z_j||_F^2 at exit
  double step = 0.0;              // step size actually used
};

double objective(const Matrix& X, const Matrix& Y, const SparseMatrix& Lr, const SparseMatrix& Lc,
                 const FrpcagConfig& cfg);

// Entrywise soft threshold toward Y: prox of lam * ||Y - .||_1 at Z.
Matrix prox_l1(const Matrix& Z, const Matrix& Y, double lam);

// Prox of lam * ||Y - .||_F^2 at Z: (Z + 2 lam Y) / (1 + 2 lam).
Matrix prox_l2(const Matrix& Z, const Matrix& Y, double lam);

// 2 (gamma_c Z Lc + gamma_r Lr Z), the gradient of the smooth part.
Matrix grad_g(const Matrix& Z, const SparseMatrix& Lr, const SparseMatrix& Lc,
              const FrpcagConfig& cfg);

// FISTA with fixed step. Returns the last prox output.
std::pair<Matrix, SolveTrace> fista_solve(const Matrix& Y, const SparseMatrix& Lr,
                                          const SparseMatrix& Lc, const FrpcagConfig& cfg);

}  // namespace cpcag
