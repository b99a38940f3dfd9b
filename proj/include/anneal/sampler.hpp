#ifndef ANNEAL_SAMPLER_HPP
#define ANNEAL_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anneal/domain.hpp"
#include "anneal/rng.hpp"
#include "anneal/target.hpp"

namespace anneal {

// Proposal distribution of the Metropolis step. The uniform-independence
// component is the certificate-granting one; a mixture runs the walk kernel
// with probability walk_weight and the independence kernel otherwise, which
// keeps the independence component's minorization at weight 1 - walk_weight.
struct Proposal {
  enum class Kind { UniformIndependence, GaussianWalk, Mixture };

  Kind kind = Kind::UniformIndependence;
  std::vector<double> walk_scales;  // per dimension; walk and mixture only
  double walk_weight = 0.0;         // mixture only, in [0, 1)

  static Proposal uniform();
  static Proposal walk(std::vector<double> scales);
  static Proposal mixture(double walk_weight, std::vector<double> scales);

  // Weight of the uniform-independence component: 1, 0, or 1 - walk_weight.
  double uniform_weight() const;
  void validate(std::size_t dim) const;
};

struct Stage {
  double J;
  std::uint64_t steps;  // zero-length stages are legal no-ops
};

// Finite ladder of homogeneous stages; J non-decreasing, so the chain is a
// finite sequence of homogeneous chains.
class Schedule {
 public:
  explicit Schedule(std::vector<Stage> stages);

  const std::vector<Stage>& stages() const { return stages_; }
  double final_J() const { return stages_.back().J; }
  std::uint64_t total_steps() const;

 private:
  std::vector<Stage> stages_;
};

// Geometric warm-up ladder J in {1, 2, 4, ...} capped at J_final; each
// warm-up stage gets max(1, k_final/10) steps, the final stage k_final.
// Warm-up is heuristic and deliberately outside the certificate, which
// counts final-stage steps only.
Schedule default_schedule(double J_final, std::uint64_t k_final);

struct ChainState {
  Point theta;
  // Deterministic kernels: criterion value at theta.
  double u_cached = 0.0;
  // Stored-product kernels: sum_i log(g_i + delta) over exactly J draws made
  // at theta, and the mean of those draws (reporting only).
  double log_product_cached = 0.0;
  double estimate_cached = 0.0;
  std::uint64_t step_index = 0;
};

ChainState init_deterministic_state(const BoundedDomain& domain, const Point& start,
                                    const DeterministicCriterion& criterion);

// Draws J conditional samples at the starting point.
ChainState init_mueller_state(const BoundedDomain& domain, const Point& start,
                              const ExpectedValueCriterion& criterion, const TargetSpec& target,
                              CounterRng& rng);

// One Metropolis-Hastings step for a deterministic criterion. Exactly one
// criterion evaluation per in-domain proposal; proposals outside the box are
// rejected as moves, which preserves the target law on the domain.
ChainState mh_step_deterministic(const ChainState& state, const BoundedDomain& domain,
                                 const TargetSpec& target, const Proposal& proposal,
                                 const DeterministicCriterion& criterion, CounterRng& rng);

// One stored-product step for an expected-value criterion (J integer): draws
// J conditional samples at the proposed point and accepts on the ratio of
// log-products. The current point's product is kept, never refreshed, on
// rejection, which is what makes the chain's theta-marginal exactly the
// (U + delta)^J law.
ChainState mh_step_mueller(const ChainState& state, const BoundedDomain& domain,
                           const TargetSpec& target, const Proposal& proposal,
                           const ExpectedValueCriterion& criterion, CounterRng& rng);

struct TraceEntry {
  std::uint64_t step;
  double J;
  std::vector<double> coords;
  double value;  // criterion value, or the stored-draw mean for noisy runs
};

using TraceSink = std::function<void(const TraceEntry&)>;

struct RunResult {
  ChainState final_state;
  std::vector<TraceEntry> trace;  // decimated; always contains first and last
  std::vector<double> best_coords;
  double best_value = 0.0;
  std::uint64_t total_steps = 0;
};

// Runs each stage's homogeneous kernel for its step count. The stored
// product is re-drawn at stage boundaries where J changes. The trace keeps
// every decimation-th state plus the initial and final ones; sink, when
// given, sees the same entries as they are produced.
RunResult run_schedule(const BoundedDomain& domain, const Point& initial,
                       const Schedule& schedule, const TargetSpec& target_final,
                       const Proposal& proposal, const DeterministicCriterion& criterion,
                       CounterRng& rng, std::uint64_t decimation = 1,
                       const TraceSink* sink = nullptr);

RunResult run_schedule(const BoundedDomain& domain, const Point& initial,
                       const Schedule& schedule, const TargetSpec& target_final,
                       const Proposal& proposal, const ExpectedValueCriterion& criterion,
                       CounterRng& rng, std::uint64_t decimation = 1,
                       const TraceSink* sink = nullptr);

// CSV line for a trace entry: step,J,x0,...,value with %.17g doubles, so
// identical runs produce byte-identical files.
std::string trace_csv_header(std::size_t dim);
std::string trace_csv_line(const TraceEntry& e);

}  // namespace anneal

#endif  // ANNEAL_SAMPLER_HPP
