#include "cpcag/solvers.hpp"

#include "cpcag/rng.hpp"

namespace cpcag {

PcgResult pcg_solve(const LinearOperator& apply, const Vector& b, Vector& x,
                    const PcgOptions& opt, const Vector* jacobi_diag) {
  if (x.size() != b.size()) x = Vector::Zero(b.size());
  if (jacobi_diag == nullptr)
    return detail::pcg_core(apply, b, x, opt, [](const Vector& r) { return r; });

  Vector inv = *jacobi_diag;
  for (Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > 0.0 ? 1.0 / inv[i] : 1.0;
  return detail::pcg_core(apply, b, x, opt,
                          [&inv](const Vector& r) -> Vector { return inv.asDiagonal() * r; });
}

PcgResult pcg_solve(const SparseMatrix& A, const Vector& b, Vector& x, const PcgOptions& opt,
                    bool jacobi) {
  if (A.rows() != A.cols() || A.cols() != b.size())
    throw std::invalid_argument("pcg: dimension mismatch");
  const LinearOperator apply = [&A](const Vector& v) { return A.multiply(v); };
  if (!jacobi) return pcg_solve(apply, b, x, opt, nullptr);
  const Vector d = A.diagonal();
  return pcg_solve(apply, b, x, opt, &d);
}

double power_iteration_norm(const SparseMatrix& A, double tol, std::uint64_t seed,
                            Index max_iter) {
  if (A.rows() != A.cols()) throw std::invalid_argument("power iteration: square matrix required");
  const Index n = A.rows();
  if (n == 0) return 0.0;

  CounterRng rng(CounterRng::mix(seed ^ 0x5ca1ab1eULL));
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;

  double estimate = 0.0;
  for (Index it = 0; it < max_iter; ++it) {
    Vector w = A.multiply(v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;  // v in the null space; for A = 0 this is exact
    const double prev = estimate;
    estimate = nw;  // ||Av|| with ||v|| = 1 converges to max |lambda|
    v = w / nw;
    if (it > 0 && std::abs(estimate - prev) <= tol * estimate) break;
  }
  return estimate;
}

}  // namespace cpcag
