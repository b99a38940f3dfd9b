#ifndef ANNEAL_VERIFY_HPP
#define ANNEAL_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "anneal/domain.hpp"
#include "anneal/guarantees.hpp"
#include "anneal/sampler.hpp"
#include "anneal/target.hpp"

namespace anneal {

struct RejectionResult {
  std::vector<Point> samples;
  std::uint64_t proposals = 0;
  bool completed = true;          // false: proposal budget ran out, partial result
  bool worst_case_warning = false;  // worst-case expected cost exceeded the budget
};

// Exact sampler for the (U + delta)^J law: uniform proposals accepted with
// probability ((U(theta)+delta)/(1+delta))^J. Acceptance is computed in log
// space; the envelope is valid because U <= 1.
RejectionResult rejection_sample_target(const TargetSpec& target, const BoundedDomain& domain,
                                        const DeterministicCriterion& criterion, std::size_t n,
                                        CounterRng& rng,
                                        std::uint64_t proposal_budget = 100'000'000);

enum class Verdict { Yes, No, Borderline };

// Monte Carlo test of the approximate-global-optimizer predicate: estimates
// the fraction of the domain where U exceeds U(theta) + epsilon and compares
// it against alpha with a 3-standard-error band. Points inside the band are
// Borderline rather than misclassified; the exact Lebesgue measure is only
// being estimated.
Verdict is_approx_optimizer(const Point& theta, double epsilon, double alpha,
                            const DeterministicCriterion& criterion, const BoundedDomain& domain,
                            std::size_t n_mc, CounterRng& rng);

struct SigmaCheckReport {
  double sigma = 0.0;      // equilibrium confidence for (spec, target)
  double fraction = 0.0;   // fraction of exact samples classified Yes
  double se = 0.0;         // binomial standard error at sigma
  double margin = 0.0;     // fraction - (sigma - 3 se)
  bool pass = false;
  bool completed = true;   // false when exact sampling ran out of budget
  std::size_t n_samples = 0;
  std::size_t n_yes = 0;
  std::size_t n_no = 0;
  std::size_t n_borderline = 0;
};

// Draws exact equilibrium samples, classifies each one, and checks that the
// Yes-fraction stays above sigma - 3 se. Borderline verdicts count against
// the check, so a pass genuinely witnesses the bound.
SigmaCheckReport empirical_sigma_check(const GuaranteeSpec& spec, const TargetSpec& target,
                                       const DeterministicCriterion& criterion,
                                       const BoundedDomain& domain, std::size_t n_samples,
                                       std::size_t n_mc, CounterRng& rng,
                                       std::uint64_t proposal_budget = 100'000'000);

// --- exact computations on a 1-D discretization -------------------------
// Cells are the grid values of U at cell centers; the kernel is the
// uniform-independence Metropolis chain on the cells. These are visualization
// and bound-domination tools, never certificate inputs.

// Row-major m x m transition matrix.
std::vector<double> discrete_transition_matrix(const std::vector<double>& u_grid,
                                               const TargetSpec& target);

// Normalized (u + delta)^J over the cells: the exact stationary vector by
// detailed balance.
std::vector<double> discrete_stationary_weights(const std::vector<double>& u_grid,
                                                const TargetSpec& target);

// Stationary vector recovered independently by power iteration on P.
std::vector<double> discrete_stationary_power(const std::vector<double>& transition,
                                              std::size_t m, double tol = 1e-14,
                                              std::size_t max_iter = 200000);

// Exact per-step minorization constant of the discrete kernel:
// min over (i, j) of P(i, j) / pi(j).
double discrete_doeblin_constant(const std::vector<double>& transition,
                                 const std::vector<double>& stationary);

struct TvPoint {
  std::uint64_t step;
  double tv;
};

// Exact TV distance to stationarity after each step, obtained by powering
// the initial distribution through the transition matrix. TV on the discrete
// space is half the L1 distance, which realizes the sup-over-sets
// definition. start_cell nullopt starts from the stationary vector itself.
// Grids above 2000 cells are rejected (dense powering is O(cells^2) a step).
std::vector<TvPoint> exact_tv_discretized(const TargetSpec& target,
                                          const std::vector<double>& u_grid,
                                          const Proposal& proposal, std::uint64_t k_max,
                                          std::optional<std::size_t> start_cell = 0);

// --- histogram helpers ----------------------------------------------------

// Two-sample TV between 1-D sample sets binned over [lo, hi].
double two_sample_tv_1d(const std::vector<double>& a, const std::vector<double>& b, double lo,
                        double hi, std::size_t bins);

// TV between a 1-D sample histogram and the exact bin masses of the
// grid-normalized (u + delta)^J density.
double sample_vs_grid_tv_1d(const std::vector<double>& samples,
                            const std::vector<double>& u_grid, const TargetSpec& target,
                            double lo, double hi, std::size_t bins);

// --- verification suites ----------------------------------------------------

struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string status;  // "pass", "fail" or "infeasible"
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool pass = true;  // no check with status "fail"
};

// Suites: "bijection", "sigma-bound", "stationarity", "tv-domination", "all".
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

nlohmann::json suite_report_to_json(const SuiteReport& report);

}  // namespace anneal

#endif  // ANNEAL_VERIFY_HPP
