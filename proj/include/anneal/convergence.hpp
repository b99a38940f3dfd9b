#ifndef ANNEAL_CONVERGENCE_HPP
#define ANNEAL_CONVERGENCE_HPP

#include <cstdint>
#include <optional>

#include "anneal/guarantees.hpp"
#include "anneal/target.hpp"

namespace anneal {

// Default cap on certifiable final-stage steps; the CLI lets the environment
// override it (ANNEAL_CERT_BUDGET).
inline constexpr double kDefaultStepBudget = 1e9;

// Per-step minorization constant of the final-stage kernel:
//   beta = uniform_weight * (delta / (1 + delta))^J.
// Valid only when the proposal carries a uniform-independence component with
// positive weight; beta is kept in log space because J in the hundreds
// underflows the plain value.
struct MinorizationBound {
  double beta;
  double log_beta;
  TargetSpec target;
  double uniform_weight;
};

MinorizationBound minorization_constant(const TargetSpec& target, double uniform_weight);

// min(1, (1 - beta)^k); k may be any non-negative real.
double tv_bound_after(const MinorizationBound& bound, double k);

struct StepsForTv {
  double k_real;       // exact required step count (can exceed any budget)
  bool within_budget;  // k_real <= budget
  std::uint64_t k;     // integral count when within budget and below 2^53, else 0
};

// Smallest k with (1 - beta)^k <= tv_target. Counts above the budget are
// reported, never hidden: the caller sees the exact requirement.
StepsForTv steps_for_tv(const MinorizationBound& bound, double tv_target,
                        double budget = kDefaultStepBudget);

// Full certificate pipeline: choose (J, delta) for the guarantee spec (fixed
// delta, or the smallest-J optimum when fixed_delta is empty), bound the
// kernel, count the required final-stage steps and compose the confidence.
// The certified k counts final-stage steps only and the geometric bound is
// start-independent, so warm-up stages can never invalidate the result.
Certificate certify(const GuaranteeSpec& spec, double tv_target, double uniform_weight,
                    std::optional<double> fixed_delta,
                    double budget = kDefaultStepBudget);

}  // namespace anneal

#endif  // ANNEAL_CONVERGENCE_HPP
