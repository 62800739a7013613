#pragma once

#include "cpcag/eigs.hpp"
#include "cpcag/graph.hpp"
#include "cpcag/sampling.hpp"
#include "cpcag/sparse.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

enum class DecoderVariant { ideal, alternate, approx, approx2, approx3 };

struct DecoderConfig {
  DecoderVariant variant = DecoderVariant::approx;
  double gamma = 1.0;             // alternate decoder weight; scaled by 1/lambda_{k+1}
  double gammap_r = 0.0;          // intermediate subspace problems; 0 means the
  double gammap_c = 0.0;          // hard-constraint upsampling limit
  double delta_for_scaling = 0.0; // delta in sqrt(np / (rho_r rho_c (1-delta)))
  double rank_threshold = 0.1;    // sigma_k / sigma_1 cutoff
  double pcg_tol = 1e-10;
  Index pcg_max_iter = 5000;
};

// Thin factorization with the detected rank. After the approximate decoder,
// U and V columns are unit norm and sigma carries the upsampling scale.
struct LowRankFactors {
  Matrix U;      // p x k
  Vector sigma;  // length k, nonincreasing
  Matrix V;      // n x k
  Index k = 0;
  bool scale_applied = false;
};

// Dirichlet-energy minimizing extension of known rows: rows at `known`
// equal R exactly, the rest solve L_aa S_a = -L_ab R (one PCG per column).
// Every connected component of L must contain a known node.
Matrix graph_upsample(const SparseMatrix& L, const IndexList& known, const Matrix& R,
                      double pcg_tol = 1e-10, Index pcg_max_iter = 5000);

struct IdealDecodeResult {
  Matrix X;
  double fit_residual = 0.0;  // ||M_r X M_c - Xt||_F of the sampled fit
};

// Least-squares fit of the sampled data over the known spectral bases:
// X = Pk A* Qk^T with A* the minimum-norm solution of (M_r Pk) A (Qk^T M_c) = Xt.
IdealDecodeResult ideal_decode(const Matrix& Xt, const SamplingPlan& plan, const EigenPairs& Pk,
                               const EigenPairs& Qk);

struct AlternateDecodeResult {
  Matrix X;
  bool converged = false;
  Index iterations = 0;
};

// min_X ||M_r X M_c - Xt||_F^2 + (gamma/lambda_{kc+1}) tr(X Lc X^T)
//                              + (gamma/lambda_{kr+1}) tr(X^T Lr X)
// solved by conjugate gradient on the normal operator.
AlternateDecodeResult alternate_decode(const Matrix& Xt, const SamplingPlan& plan,
                                       const SparseMatrix& Lr, const SparseMatrix& Lc,
                                       const SpectralGap& gap_r, const SpectralGap& gap_c,
                                       const DecoderConfig& cfg);

struct ApproxDecodeResult {
  Matrix X;
  LowRankFactors factors;
};

// Subspace-upsampling decoder: thin SVD of Xt, rank cut at
// sigma_k/sigma_1 >= rank_threshold, per-column upsampling of both factor
// matrices, unit normalization, singular values rescaled by
// sqrt(np / (rho_r rho_c (1-delta))).
ApproxDecodeResult approx_decode(const Matrix& Xt, const SamplingPlan& plan,
                                 const SparseMatrix& Lr, const SparseMatrix& Lc,
                                 const DecoderConfig& cfg);

enum class Side { U, V };

// One-sided variants for when the full data matrix is available: upsample
// a single subspace, orthonormalize it, and project: X = U U^T Y (side U)
// or X = Y V V^T (side V).
Matrix approx_decode_onesided(const Matrix& Xt, const SamplingPlan& plan, const SparseMatrix& L,
                              const Matrix& Y, Side side, const DecoderConfig& cfg);

// Penalized subspace recovery min ||S(omega) - Rt||_F^2 + gammap tr(S^T L S),
// i.e. (diag(ind_omega) + gammap L) S = scatter(Rt), one PCG per column.
// The gammap -> 0 limit is graph_upsample.
Matrix intermediate_uv_decode(const Matrix& Rt, const IndexList& omega, const SparseMatrix& L,
                              double gammap, double pcg_tol = 1e-10, Index pcg_max_iter = 5000);

}  // namespace cpcag
