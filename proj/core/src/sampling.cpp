#include "cpcag/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cpcag/rng.hpp"

namespace cpcag {

double SamplingPlan::norm_const() const {
  return (static_cast<double>(n) * static_cast<double>(p)) /
         (static_cast<double>(rho_r()) * static_cast<double>(rho_c()));
}

Index required_samples(double nu, Index k, double delta, double epsilon, SampleBoundMode mode) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("required_samples: delta must be in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("required_samples: epsilon must be in (0,1)");
  if (k < 1) throw std::invalid_argument("required_samples: k must be >= 1");
  if (nu + 1e-9 < std::sqrt(static_cast<double>(k)))
    throw std::invalid_argument("required_samples: coherence below sqrt(k) is impossible");

  double bound;
  if (mode == SampleBoundMode::dual)
    bound = 27.0 / (delta * delta) * nu * nu * std::log(4.0 * static_cast<double>(k) / epsilon);
  else
    bound = 3.0 / (delta * delta) * nu * nu * std::log(2.0 * static_cast<double>(k) / epsilon);
  return static_cast<Index>(std::ceil(bound));
}

namespace {

IndexList partial_shuffle(Index n, Index take, CounterRng rng) {
  IndexList pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < take; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(take));
  return pool;
}

}  // namespace

SamplingPlan draw_plan(Index p, Index n, Index rho_r, Index rho_c, double delta, double epsilon,
                       std::uint64_t seed) {
  if (rho_r < 1 || rho_r > p)
    throw std::invalid_argument("draw_plan: rho_r out of range [1, " + std::to_string(p) + "]");
  if (rho_c < 1 || rho_c > n)
    throw std::invalid_argument("draw_plan: rho_c out of range [1, " + std::to_string(n) + "]");

  SamplingPlan plan;
  plan.p = p;
  plan.n = n;
  plan.delta = delta;
  plan.epsilon = epsilon;
  plan.seed = seed;
  plan.omega_r = partial_shuffle(p, rho_r, CounterRng::derive(seed, 0x726f7773ULL));
  plan.omega_c = partial_shuffle(n, rho_c, CounterRng::derive(seed, 0x636f6c73ULL));
  return plan;
}

Matrix subsample(const Matrix& Y, const SamplingPlan& plan) {
  if (Y.rows() != plan.p || Y.cols() != plan.n)
    throw std::invalid_argument("subsample: plan does not match matrix dimensions");
  Matrix out(plan.rho_r(), plan.rho_c());
  for (Index j = 0; j < plan.rho_c(); ++j)
    for (Index i = 0; i < plan.rho_r(); ++i)
      out(i, j) = Y(plan.omega_r[static_cast<std::size_t>(i)],
                    plan.omega_c[static_cast<std::size_t>(j)]);
  return out;
}

RipReport rip_check(const EigenPairs& Pk, const EigenPairs& Qk, const SamplingPlan& plan,
                    Index trials, std::uint64_t seed) {
  if (Pk.dimension() != plan.p || Qk.dimension() != plan.n)
    throw std::invalid_argument("rip_check: basis dimensions do not match plan");
  const Index kr = Pk.order();
  const Index kc = Qk.order();
  const double c = plan.norm_const();

  RipReport rep;
  rep.trials = trials;
  Index violations = 0;
  Matrix G(kr, kc);
  for (Index t = 0; t < trials; ++t) {
    CounterRng rng = CounterRng::derive(seed, static_cast<std::uint64_t>(t));
    for (Index j = 0; j < kc; ++j)
      for (Index i = 0; i < kr; ++i) G(i, j) = rng.next_gaussian();
    const Matrix Y = Pk.eigenvectors * G * Qk.eigenvectors.transpose();
    const double full = Y.squaredNorm();
    if (full == 0.0) continue;
    const double ratio = c * subsample(Y, plan).squaredNorm() / full;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(ratio - 1.0));
    if (ratio < 1.0 - plan.delta || ratio > 1.0 + plan.delta) ++violations;
  }
  rep.violation_rate = trials > 0 ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0;
  return rep;
}

}  // namespace cpcag
