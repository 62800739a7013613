#include "cpcag/frpcag.hpp"

#include <cmath>
#include <stdexcept>

#include "cpcag/solvers.hpp"

namespace cpcag {

namespace {

void check_dims(const Matrix& X, const Matrix& Y, const SparseMatrix& Lr, const SparseMatrix& Lc) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument("frpcag: X and Y dimensions differ");
  if (Lr.rows() != Lr.cols() || Lr.rows() != X.rows())
    throw std::invalid_argument("frpcag: row Laplacian does not match X");
  if (Lc.rows() != Lc.cols() || Lc.rows() != X.cols())
    throw std::invalid_argument("frpcag: column Laplacian does not match X");
}

}  // namespace

double objective(const Matrix& X, const Matrix& Y, const SparseMatrix& Lr, const SparseMatrix& Lc,
                 const FrpcagConfig& cfg) {
  check_dims(X, Y, Lr, Lc);
  const Matrix E = Y - X;
  double value = cfg.loss == Loss::l1 ? E.cwiseAbs().sum() : E.squaredNorm();
  // tr(X Lc X^T) = sum (Lc X^T) o X^T, evaluated without densifying Lc.
  if (cfg.gamma_c != 0.0) {
    const Matrix Xt = X.transpose();
    value += cfg.gamma_c * (Lc.multiply(Xt).array() * Xt.array()).sum();
  }
  if (cfg.gamma_r != 0.0) value += cfg.gamma_r * (Lr.multiply(X).array() * X.array()).sum();
  return value;
}

Matrix prox_l1(const Matrix& Z, const Matrix& Y, double lam) {
  if (Z.rows() != Y.rows() || Z.cols() != Y.cols())
    throw std::invalid_argument("prox: Z and Y dimensions differ");
  if (lam < 0.0) throw std::invalid_argument("prox: negative threshold");
  const Matrix D = Z - Y;
  return Y + D.array().sign().matrix().cwiseProduct(
                 (D.cwiseAbs().array() - lam).max(0.0).matrix());
}

Matrix prox_l2(const Matrix& Z, const Matrix& Y, double lam) {
  if (Z.rows() != Y.rows() || Z.cols() != Y.cols())
    throw std::invalid_argument("prox: Z and Y dimensions differ");
  if (lam < 0.0) throw std::invalid_argument("prox: negative threshold");
  return (Z + 2.0 * lam * Y) / (1.0 + 2.0 * lam);
}

Matrix grad_g(const Matrix& Z, const SparseMatrix& Lr, const SparseMatrix& Lc,
              const FrpcagConfig& cfg) {
  check_dims(Z, Z, Lr, Lc);
  Matrix G = Matrix::Zero(Z.rows(), Z.cols());
  if (cfg.gamma_c != 0.0) G += (2.0 * cfg.gamma_c) * Lc.right_multiply(Z);
  if (cfg.gamma_r != 0.0) G += (2.0 * cfg.gamma_r) * Lr.multiply(Z);
  return G;
}

std::pair<Matrix, SolveTrace> fista_solve(const Matrix& Y, const SparseMatrix& Lr,
                                          const SparseMatrix& Lc, const FrpcagConfig& cfg) {
  check_dims(Y, Y, Lr, Lc);
  if (cfg.gamma_r < 0.0 || cfg.gamma_c < 0.0)
    throw std::invalid_argument("fista: negative regularization weight");
  if (cfg.tol <= 0.0) throw std::invalid_argument("fista: stopping tolerance must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("fista: max_iter must be >= 1");

  double step = cfg.step;
  if (step <= 0.0) {
    const double beta = 2.0 * cfg.gamma_c * power_iteration_norm(Lc, 1e-7, 42) +
                        2.0 * cfg.gamma_r * power_iteration_norm(Lr, 1e-7, 42);
    step = beta > 0.0 ? 1.0 / beta : 1.0;  // beta = 0 means g vanishes; any step works
  }

  const auto prox = cfg.loss == Loss::l1 ? prox_l1 : prox_l2;

  Matrix Z = Y;        // Z_1
  Matrix S_prev = Y;   // S_0
  Matrix S = Y;
  double t = 1.0;      // t_1

  SolveTrace trace;
  trace.step = step;
  trace.objective.reserve(static_cast<std::size_t>(cfg.max_iter));

  for (Index j = 1; j <= cfg.max_iter; ++j) {
    S = prox(Z - step * grad_g(Z, Lr, Lc, cfg), Y, step);
    const double obj = objective(S, Y, Lr, Lc, cfg);
    if (!std::isfinite(obj))
      throw std::runtime_error("fista: diverged (non-finite objective at iteration " +
                               std::to_string(j) + "); step too large");
    trace.objective.push_back(obj);
    trace.iterations = j;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Matrix Z_next = S + ((t - 1.0) / t_next) * (S - S_prev);

    const double denom = Z.squaredNorm();
    const double change = (Z_next - Z).squaredNorm();
    trace.final_rel_change = denom > 0.0 ? change / denom : change;
    if (change < cfg.tol * denom) {
      trace.converged = true;
      break;
    }
    S_prev = S;
    Z = std::move(Z_next);
    t = t_next;
  }
  return {S, trace};
}

}  // namespace cpcag
