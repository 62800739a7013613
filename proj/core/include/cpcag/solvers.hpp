#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

struct PcgOptions {
  double tol = 1e-10;       // relative residual target ||Ax-b|| <= tol*||b||
  Index max_iter = 5000;
};

struct PcgResult {
  Index iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;  // true residual recomputed at exit
};

namespace detail {

inline double inner(const Vector& a, const Vector& b) { return a.dot(b); }
inline double inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

// Conjugate gradient on an SPD operator; Operand is Vector or Matrix
// (matrix operands run the same recurrence under the Frobenius inner
// product). apply and precond are Operand -> Operand. x is the start
// iterate and carries the solution out.
template <class Operand, class Apply, class Precond>
PcgResult pcg_core(const Apply& apply, const Operand& b, Operand& x, const PcgOptions& opt,
                   const Precond& precond) {
  const double norm_b = std::sqrt(inner(b, b));
  PcgResult res;
  if (norm_b == 0.0) {
    x = b;  // zero right-hand side: x = 0
    res.converged = true;
    return res;
  }
  const double target = opt.tol * norm_b;

  Operand r = b - apply(x);
  Operand z = precond(r);
  Operand p = z;
  double rho = inner(r, z);

  Index it = 0;
  while (it < opt.max_iter) {
    if (std::sqrt(inner(r, r)) <= target) break;
    Operand ap = apply(p);
    const double curvature = inner(p, ap);
    if (!std::isfinite(curvature) || curvature <= 0.0)
      throw std::runtime_error("pcg: breakdown (nonpositive curvature) at iteration " +
                               std::to_string(it));
    const double alpha = rho / curvature;
    x += alpha * p;
    r -= alpha * ap;
    z = precond(r);
    const double rho_next = inner(r, z);
    p = z + (rho_next / rho) * p;
    rho = rho_next;
    ++it;
  }

  // Trust the true residual, not the recurrence.
  Operand r_true = b - apply(x);
  res.relative_residual = std::sqrt(inner(r_true, r_true)) / norm_b;
  res.iterations = it;
  res.converged = res.relative_residual <= opt.tol;
  return res;
}

}  // namespace detail

using LinearOperator = std::function<Vector(const Vector&)>;

// PCG with optional Jacobi (diagonal) preconditioner. Returns x with
// ||Ax-b|| <= tol*||b||, or stops at max_iter with converged = false.
PcgResult pcg_solve(const LinearOperator& apply, const Vector& b, Vector& x,
                    const PcgOptions& opt, const Vector* jacobi_diag = nullptr);

PcgResult pcg_solve(const SparseMatrix& A, const Vector& b, Vector& x, const PcgOptions& opt,
                    bool jacobi = true);

// Spectral-norm estimate for a symmetric sparse matrix by power iteration;
// deterministic for a given seed. A zero matrix yields 0.
double power_iteration_norm(const SparseMatrix& A, double tol = 1e-9, std::uint64_t seed = 0,
                            Index max_iter = 50000);

}  // namespace cpcag
