#include "cpcag/decoders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "cpcag/solvers.hpp"

namespace cpcag {

namespace {

std::vector<char> known_mask(Index n, const IndexList& known, const char* what) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (const Index i : known) {
    if (i < 0 || i >= n) throw std::invalid_argument(std::string(what) + ": index out of range");
    if (mask[static_cast<std::size_t>(i)])
      throw std::invalid_argument(std::string(what) + ": duplicate index");
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

double scaling_constant(const SamplingPlan& plan, double delta) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("decoder: delta_for_scaling must be in [0,1)");
  return std::sqrt(plan.norm_const() / (1.0 - delta));
}

// Largest-magnitude entry of each U column is made positive; V flips in
// tandem so U sigma V^T is unchanged.
void align_factor_signs(Matrix& U, Matrix& V) {
  for (Index j = 0; j < U.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < U.rows(); ++i) {
      const double a = std::abs(U(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (U(arg, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

// Moore-Penrose pseudoinverse with a hard failure on rank deficiency; the
// sampled eigenvector blocks must keep full column rank for the ideal
// decoder to be well posed.
Matrix full_rank_pinv(const Matrix& B, const char* what) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff =
      std::max(B.rows(), B.cols()) * Eigen::NumTraits<double>::epsilon() * (s.size() ? s[0] : 0.0);
  if (s.size() == 0 || s[s.size() - 1] <= cutoff)
    throw std::runtime_error(std::string("ideal decoder: sampled ") + what +
                             " eigenvector block is rank-deficient "
                             "(sampling too aggressive for the requested k)");
  Vector inv = s;
  for (Index i = 0; i < inv.size(); ++i) inv[i] = 1.0 / inv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Matrix graph_upsample(const SparseMatrix& L, const IndexList& known, const Matrix& R,
                      double pcg_tol, Index pcg_max_iter) {
  const Index n = L.rows();
  if (L.cols() != n) throw std::invalid_argument("graph upsample: square Laplacian required");
  if (static_cast<Index>(known.size()) != R.rows())
    throw std::invalid_argument("graph upsample: known set and R row count differ");
  const std::vector<char> mask = known_mask(n, known, "graph upsample");

  for (const IndexList& comp : L.connected_components()) {
    bool covered = false;
    for (const Index u : comp)
      if (mask[static_cast<std::size_t>(u)]) {
        covered = true;
        break;
      }
    if (!covered)
      throw std::runtime_error("graph upsample: connected component containing node " +
                               std::to_string(comp.front()) + " has no sampled node");
  }

  Matrix S(n, R.cols());
  for (std::size_t i = 0; i < known.size(); ++i)
    S.row(known[i]) = R.row(static_cast<Index>(i));
  if (static_cast<Index>(known.size()) == n) return S;

  IndexList unknown;
  unknown.reserve(static_cast<std::size_t>(n) - known.size());
  for (Index i = 0; i < n; ++i)
    if (!mask[static_cast<std::size_t>(i)]) unknown.push_back(i);

  const SparseMatrix L_aa = L.submatrix(unknown, unknown);
  const SparseMatrix L_ab = L.submatrix(unknown, known);
  const Vector diag_aa = L_aa.diagonal();
  const Matrix rhs = -L_ab.multiply(R);

  PcgOptions opt;
  opt.tol = pcg_tol;
  opt.max_iter = pcg_max_iter;
  for (Index j = 0; j < R.cols(); ++j) {
    Vector x = Vector::Zero(static_cast<Index>(unknown.size()));
    const PcgResult res =
        pcg_solve([&L_aa](const Vector& v) { return L_aa.multiply(v); }, rhs.col(j), x, opt,
                  &diag_aa);
    if (!res.converged)
      throw std::runtime_error("graph upsample: interior solve did not converge (column " +
                               std::to_string(j) + ")");
    for (std::size_t i = 0; i < unknown.size(); ++i) S(unknown[i], j) = x[static_cast<Index>(i)];
  }
  return S;
}

IdealDecodeResult ideal_decode(const Matrix& Xt, const SamplingPlan& plan, const EigenPairs& Pk,
                               const EigenPairs& Qk) {
  if (Xt.rows() != plan.rho_r() || Xt.cols() != plan.rho_c())
    throw std::invalid_argument("ideal decoder: Xt does not match plan");
  if (Pk.dimension() != plan.p || Qk.dimension() != plan.n)
    throw std::invalid_argument("ideal decoder: basis dimensions do not match plan");

  Matrix B(plan.rho_r(), Pk.order());
  for (Index i = 0; i < plan.rho_r(); ++i)
    B.row(i) = Pk.eigenvectors.row(plan.omega_r[static_cast<std::size_t>(i)]);
  Matrix C(plan.rho_c(), Qk.order());
  for (Index j = 0; j < plan.rho_c(); ++j)
    C.row(j) = Qk.eigenvectors.row(plan.omega_c[static_cast<std::size_t>(j)]);

  const Matrix A = full_rank_pinv(B, "row") * Xt * full_rank_pinv(C, "column").transpose();

  IdealDecodeResult out;
  out.fit_residual = (B * A * C.transpose() - Xt).norm();
  out.X = Pk.eigenvectors * A * Qk.eigenvectors.transpose();
  return out;
}

AlternateDecodeResult alternate_decode(const Matrix& Xt, const SamplingPlan& plan,
                                       const SparseMatrix& Lr, const SparseMatrix& Lc,
                                       const SpectralGap& gap_r, const SpectralGap& gap_c,
                                       const DecoderConfig& cfg) {
  if (Xt.rows() != plan.rho_r() || Xt.cols() != plan.rho_c())
    throw std::invalid_argument("alternate decoder: Xt does not match plan");
  if (Lr.rows() != plan.p || Lc.rows() != plan.n)
    throw std::invalid_argument("alternate decoder: Laplacians do not match plan");
  if (cfg.gamma <= 0.0) throw std::invalid_argument("alternate decoder: gamma must be positive");

  const double gbar_r = cfg.gamma / gap_r.lambda_k1;
  const double gbar_c = cfg.gamma / gap_c.lambda_k1;

  // Normal operator M_r^T (M_r X M_c) M_c^T + gbar_c X Lc + gbar_r Lr X;
  // the sampling part is a mask on the sampled grid.
  const auto apply = [&](const Matrix& X) -> Matrix {
    Matrix out = gbar_c * Lc.right_multiply(X) + gbar_r * Lr.multiply(X);
    for (Index j = 0; j < plan.rho_c(); ++j) {
      const Index cj = plan.omega_c[static_cast<std::size_t>(j)];
      for (Index i = 0; i < plan.rho_r(); ++i) {
        const Index ri = plan.omega_r[static_cast<std::size_t>(i)];
        out(ri, cj) += X(ri, cj);
      }
    }
    return out;
  };

  Matrix rhs = Matrix::Zero(plan.p, plan.n);
  for (Index j = 0; j < plan.rho_c(); ++j)
    for (Index i = 0; i < plan.rho_r(); ++i)
      rhs(plan.omega_r[static_cast<std::size_t>(i)], plan.omega_c[static_cast<std::size_t>(j)]) =
          Xt(i, j);

  PcgOptions opt;
  opt.tol = cfg.pcg_tol;
  opt.max_iter = cfg.pcg_max_iter;
  Matrix X = Matrix::Zero(plan.p, plan.n);
  const PcgResult res =
      detail::pcg_core(apply, rhs, X, opt, [](const Matrix& r) -> Matrix { return r; });

  return AlternateDecodeResult{std::move(X), res.converged, res.iterations};
}

ApproxDecodeResult approx_decode(const Matrix& Xt, const SamplingPlan& plan,
                                 const SparseMatrix& Lr, const SparseMatrix& Lc,
                                 const DecoderConfig& cfg) {
  if (Xt.rows() != plan.rho_r() || Xt.cols() != plan.rho_c())
    throw std::invalid_argument("approximate decoder: Xt does not match plan");
  if (Lr.rows() != plan.p || Lc.rows() != plan.n)
    throw std::invalid_argument("approximate decoder: Laplacians do not match plan");
  if (!(cfg.rank_threshold > 0.0 && cfg.rank_threshold < 1.0))
    throw std::invalid_argument("approximate decoder: rank threshold must be in (0,1)");

  const SvdResult svd = thin_svd(Xt);
  const Index k = detect_rank(svd.sigma, cfg.rank_threshold);
  if (k == 0)
    throw std::runtime_error("approximate decoder: no singular value above the rank threshold");

  Matrix U = graph_upsample(Lr, plan.omega_r, svd.U.leftCols(k), cfg.pcg_tol, cfg.pcg_max_iter);
  Matrix V = graph_upsample(Lc, plan.omega_c, svd.V.leftCols(k), cfg.pcg_tol, cfg.pcg_max_iter);

  for (Index j = 0; j < k; ++j) {
    const double nu = U.col(j).norm();
    const double nv = V.col(j).norm();
    if (nu <= 1e-14 || nv <= 1e-14)
      throw std::runtime_error("approximate decoder: zero column " + std::to_string(j) +
                               " after upsampling (rank overestimated)");
    U.col(j) /= nu;
    V.col(j) /= nv;
  }
  align_factor_signs(U, V);

  ApproxDecodeResult out;
  out.factors.k = k;
  out.factors.sigma = scaling_constant(plan, cfg.delta_for_scaling) * svd.sigma.head(k);
  out.factors.scale_applied = true;
  out.X = U * out.factors.sigma.asDiagonal() * V.transpose();
  out.factors.U = std::move(U);
  out.factors.V = std::move(V);
  return out;
}

Matrix approx_decode_onesided(const Matrix& Xt, const SamplingPlan& plan, const SparseMatrix& L,
                              const Matrix& Y, Side side, const DecoderConfig& cfg) {
  if (Xt.rows() != plan.rho_r() || Xt.cols() != plan.rho_c())
    throw std::invalid_argument("one-sided decoder: Xt does not match plan");
  if (Y.rows() != plan.p || Y.cols() != plan.n)
    throw std::invalid_argument("one-sided decoder: Y does not match plan");

  const SvdResult svd = thin_svd(Xt);
  const Index k = detect_rank(svd.sigma, cfg.rank_threshold);
  if (k == 0)
    throw std::runtime_error("one-sided decoder: no singular value above the rank threshold");

  const Matrix St = side == Side::U ? svd.U.leftCols(k) : svd.V.leftCols(k);
  const IndexList& omega = side == Side::U ? plan.omega_r : plan.omega_c;
  Matrix S = graph_upsample(L, omega, St, cfg.pcg_tol, cfg.pcg_max_iter);

  // The projection needs an orthonormal basis of the upsampled span, not
  // merely unit columns.
  Eigen::HouseholderQR<Matrix> qr(S);
  const Matrix Q = qr.householderQ() * Matrix::Identity(S.rows(), k);

  return side == Side::U ? Matrix(Q * (Q.transpose() * Y)) : Matrix((Y * Q) * Q.transpose());
}

Matrix intermediate_uv_decode(const Matrix& Rt, const IndexList& omega, const SparseMatrix& L,
                              double gammap, double pcg_tol, Index pcg_max_iter) {
  const Index n = L.rows();
  if (L.cols() != n) throw std::invalid_argument("intermediate decoder: square Laplacian required");
  if (static_cast<Index>(omega.size()) != Rt.rows())
    throw std::invalid_argument("intermediate decoder: omega and Rt row count differ");
  if (gammap <= 0.0)
    throw std::invalid_argument(
        "intermediate decoder: gammap must be positive (the gammap -> 0 limit is graph_upsample)");
  const std::vector<char> mask = known_mask(n, omega, "intermediate decoder");

  Matrix rhs = Matrix::Zero(n, Rt.cols());
  for (std::size_t i = 0; i < omega.size(); ++i) rhs.row(omega[i]) = Rt.row(static_cast<Index>(i));

  Vector diag = gammap * L.diagonal();
  for (const Index i : omega) diag[i] += 1.0;

  const auto apply = [&](const Vector& v) -> Vector {
    Vector out = gammap * L.multiply(v);
    for (const Index i : omega) out[i] += v[i];
    return out;
  };

  PcgOptions opt;
  opt.tol = pcg_tol;
  opt.max_iter = pcg_max_iter;
  Matrix S(n, Rt.cols());
  for (Index j = 0; j < Rt.cols(); ++j) {
    Vector x = Vector::Zero(n);
    const PcgResult res = pcg_solve(apply, rhs.col(j), x, opt, &diag);
    if (!res.converged)
      throw std::runtime_error("intermediate decoder: PCG did not converge (column " +
                               std::to_string(j) + ")");
    S.col(j) = x;
  }
  return S;
}

}  // namespace cpcag
