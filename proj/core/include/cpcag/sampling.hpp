#pragma once

#include <cstdint>

#include "cpcag/eigs.hpp"
#include "cpcag/types.hpp"

namespace cpcag {

// Uniform without-replacement row/column sampling plan. The index lists
// keep their draw order; entry (i, j) of the subsampled matrix is
// Y(omega_r[i], omega_c[j]).
struct SamplingPlan {
  IndexList omega_r;
  IndexList omega_c;
  Index p = 0;  // ambient rows
  Index n = 0;  // ambient columns
  double delta = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  Index rho_r() const { return static_cast<Index>(omega_r.size()); }
  Index rho_c() const { return static_cast<Index>(omega_c.size()); }
  // np / (rho_r rho_c), the norm-conservation constant of the sampling RIP.
  double norm_const() const;
};

enum class SampleBoundMode {
  dual,    // two-graph low-rank RIP: (27 / delta^2) nu^2 log(4k / epsilon)
  single,  // one-graph bandlimited RIP: (3 / delta^2) nu^2 log(2k / epsilon)
};

// Ceiling of the sample-size bound. May exceed the ambient dimension at
// small scale; callers clamp.
Index required_samples(double nu, Index k, double delta, double epsilon, SampleBoundMode mode);

// Fisher-Yates partial shuffle under the counter-based generator; the row
// stream and column stream are derived independently from the seed.
SamplingPlan draw_plan(Index p, Index n, Index rho_r, Index rho_c, double delta, double epsilon,
                       std::uint64_t seed);

// Ytilde(i, j) = Y(omega_r[i], omega_c[j]); pure selection.
Matrix subsample(const Matrix& Y, const SamplingPlan& plan);

struct RipReport {
  double max_deviation = 0.0;   // max over trials of |ratio - 1|
  double violation_rate = 0.0;  // fraction of trials outside [1-delta, 1+delta]
  Index trials = 0;
};

// Monte-Carlo check of the two-sided norm preservation on random members
// of the model set (Y = Pk G Qk^T, G standard normal). Trials use derived
// per-trial seeds, so the result is independent of evaluation order.
RipReport rip_check(const EigenPairs& Pk, const EigenPairs& Qk, const SamplingPlan& plan,
                    Index trials, std::uint64_t seed);

}  // namespace cpcag
