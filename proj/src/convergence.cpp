#include "anneal/convergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace anneal {

MinorizationBound minorization_constant(const TargetSpec& target, double uniform_weight) {
  if (!(uniform_weight > 0.0 && uniform_weight <= 1.0))
    throw std::invalid_argument(
        "minorization_constant: no certificate possible for a pure random-walk proposal; the "
        "uniform-independence weight must lie in (0, 1]");
  // Independence sampler with uniform proposal on the box: the target density
  // against the proposal is bounded by M = ((1+delta)/delta)^J because
  // u in [0, 1], giving the one-step bound K(x, .) >= (1/M) pi(.). A kernel
  // mixture runs that component with probability uniform_weight, so the
  // mixture inherits beta = uniform_weight / M.
  const double log_beta =
      std::log(uniform_weight) + target.J * (std::log(target.delta) - std::log1p(target.delta));
  return MinorizationBound{std::exp(log_beta), log_beta, target, uniform_weight};
}

double tv_bound_after(const MinorizationBound& bound, double k) {
  if (!(k >= 0.0)) throw std::invalid_argument("tv_bound_after: k >= 0 required");
  if (bound.beta >= 1.0) return k >= 1.0 ? 0.0 : 1.0;
  if (bound.beta > 0.0) return std::min(1.0, std::exp(k * std::log1p(-bound.beta)));
  // beta underflowed; log1p(-beta) == -beta to machine precision there.
  return std::min(1.0, std::exp(-k * std::exp(bound.log_beta)));
}

StepsForTv steps_for_tv(const MinorizationBound& bound, double tv_target, double budget) {
  if (!(tv_target > 0.0 && tv_target < 1.0))
    throw std::invalid_argument("steps_for_tv: tv_target must lie in (0, 1)");
  if (!(budget >= 1.0)) throw std::invalid_argument("steps_for_tv: budget >= 1 required");
  double k_real;
  if (bound.beta >= 1.0) {
    k_real = 1.0;
  } else if (bound.beta > 0.0) {
    k_real = std::log(tv_target) / std::log1p(-bound.beta);
  } else {
    k_real = -std::log(tv_target) * std::exp(-bound.log_beta);  // may overflow to +inf
  }
  double k = std::ceil(k_real);
  if (k <= budget && k < 9007199254740992.0) {
    // Settle ceil against floating-point fuzz at exact thresholds; the true
    // correction is at most one unit, and above 2^53 a unit step cannot
    // change the double.
    for (int i = 0; i < 64 && k > 0.0 && tv_bound_after(bound, k - 1.0) <= tv_target; ++i)
      k -= 1.0;
    for (int i = 0; i < 64 && tv_bound_after(bound, k) > tv_target; ++i) k += 1.0;
  }
  const bool within = k <= budget;
  const bool representable = within && k < 9007199254740992.0;
  return StepsForTv{k, within, representable ? static_cast<std::uint64_t>(k) : 0};
}

Certificate certify(const GuaranteeSpec& spec, double tv_target, double uniform_weight,
                    std::optional<double> fixed_delta, double budget) {
  TargetSpec target = fixed_delta.has_value()
                          ? TargetSpec(min_J(spec, *fixed_delta), *fixed_delta)
                          : min_delta_J(spec);
  const double sigma_value = sigma(spec, target);
  const MinorizationBound bound = minorization_constant(target, uniform_weight);
  const StepsForTv steps = steps_for_tv(bound, tv_target, budget);
  // For an infeasible requirement the reported bound is the one that would
  // hold after the required k; feasibility is a separate field, not baked
  // into the arithmetic.
  const double tv = steps.within_budget ? tv_bound_after(bound, steps.k_real) : tv_target;
  Certificate cert{spec,
                   target,
                   tv_target,
                   sigma_value,
                   steps.k_real,
                   tv,
                   compose_confidence(sigma_value, tv),
                   steps.within_budget,
                   budget,
                   uniform_weight};
  return cert;
}

}  // namespace anneal
