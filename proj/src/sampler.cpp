#include "anneal/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace anneal {

Proposal Proposal::uniform() {
  Proposal p;
  p.kind = Kind::UniformIndependence;
  return p;
}

Proposal Proposal::walk(std::vector<double> scales) {
  Proposal p;
  p.kind = Kind::GaussianWalk;
  p.walk_scales = std::move(scales);
  return p;
}

Proposal Proposal::mixture(double walk_weight, std::vector<double> scales) {
  Proposal p;
  p.kind = Kind::Mixture;
  p.walk_weight = walk_weight;
  p.walk_scales = std::move(scales);
  return p;
}

double Proposal::uniform_weight() const {
  switch (kind) {
    case Kind::UniformIndependence:
      return 1.0;
    case Kind::GaussianWalk:
      return 0.0;
    case Kind::Mixture:
      return 1.0 - walk_weight;
  }
  return 0.0;
}

void Proposal::validate(std::size_t dim) const {
  if (kind == Kind::UniformIndependence) return;
  if (walk_scales.size() != dim)
    throw std::invalid_argument("Proposal: walk needs one positive scale per dimension");
  for (double s : walk_scales) {
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("Proposal: walk scales must be positive and finite");
  }
  if (kind == Kind::Mixture && !(walk_weight >= 0.0 && walk_weight < 1.0))
    throw std::invalid_argument("Proposal: mixture walk weight must lie in [0, 1)");
}

Schedule::Schedule(std::vector<Stage> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw std::invalid_argument("Schedule: at least one stage required");
  double prev = 1.0;
  for (const Stage& s : stages_) {
    if (!(s.J >= 1.0)) throw std::invalid_argument("Schedule: stage J >= 1 required");
    if (s.J < prev) throw std::invalid_argument("Schedule: stage J must be non-decreasing");
    prev = s.J;
  }
  if (stages_.back().steps == 0)
    throw std::invalid_argument("Schedule: final stage needs at least one step");
}

std::uint64_t Schedule::total_steps() const {
  std::uint64_t n = 0;
  for (const Stage& s : stages_) n += s.steps;
  return n;
}

Schedule default_schedule(double J_final, std::uint64_t k_final) {
  if (!(J_final >= 1.0)) throw std::invalid_argument("default_schedule: J_final >= 1 required");
  if (k_final == 0) throw std::invalid_argument("default_schedule: k_final >= 1 required");
  const std::uint64_t warm = std::max<std::uint64_t>(1, k_final / 10);
  std::vector<Stage> stages;
  for (double j = 1.0; j < J_final; j *= 2.0) stages.push_back({j, warm});
  stages.push_back({J_final, k_final});
  return Schedule(std::move(stages));
}

namespace {

struct ProposalDraw {
  std::vector<double> coords;
  bool in_domain;
};

// Both implemented components are symmetric in the acceptance ratio (the
// uniform density cancels, the Gaussian walk is symmetric), so the log
// q-ratio is 0 for every draw.
ProposalDraw draw_proposal(const Proposal& proposal, const BoundedDomain& domain,
                           const Point& current, CounterRng& rng) {
  Proposal::Kind kind = proposal.kind;
  if (kind == Proposal::Kind::Mixture) {
    kind = rng.uniform01() < proposal.walk_weight ? Proposal::Kind::GaussianWalk
                                                  : Proposal::Kind::UniformIndependence;
  }
  ProposalDraw d;
  d.coords.resize(domain.dim());
  if (kind == Proposal::Kind::UniformIndependence) {
    for (std::size_t i = 0; i < domain.dim(); ++i)
      d.coords[i] = rng.uniform(domain.lower(i), domain.upper(i));
    d.in_domain = true;
  } else {
    for (std::size_t i = 0; i < domain.dim(); ++i)
      d.coords[i] = current[i] + proposal.walk_scales[i] * rng.normal01();
    d.in_domain = domain.contains(d.coords);
  }
  return d;
}

// The acceptance uniform is consumed for every in-domain proposal, even when
// the ratio already guarantees acceptance; the per-step draw pattern is part
// of the reproducibility contract.
bool accept(double log_ratio, CounterRng& rng) {
  return rng.uniform01() < std::exp(std::min(0.0, log_ratio));
}

std::uint64_t integer_J(const TargetSpec& target) {
  if (!target.integer_J())
    throw std::invalid_argument("stored-product kernel requires integer J");
  return static_cast<std::uint64_t>(target.J);
}

struct MuellerDraws {
  double log_product;
  double mean;
};

MuellerDraws draw_products(const ExpectedValueCriterion& criterion, const Point& at,
                           const TargetSpec& target, CounterRng& rng) {
  const std::uint64_t J = integer_J(target);
  double log_product = 0.0;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < J; ++i) {
    const double g = criterion.sample(at, rng);
    log_product += std::log(g + target.delta);
    sum += g;
  }
  return {log_product, sum / static_cast<double>(J)};
}

}  // namespace

ChainState init_deterministic_state(const BoundedDomain& domain, const Point& start,
                                    const DeterministicCriterion& criterion) {
  if (!domain.contains(start))
    throw std::invalid_argument("init_deterministic_state: start outside the domain");
  ChainState s{start};
  s.u_cached = criterion.eval(start);
  return s;
}

ChainState init_mueller_state(const BoundedDomain& domain, const Point& start,
                              const ExpectedValueCriterion& criterion, const TargetSpec& target,
                              CounterRng& rng) {
  if (!domain.contains(start))
    throw std::invalid_argument("init_mueller_state: start outside the domain");
  ChainState s{start};
  const MuellerDraws d = draw_products(criterion, start, target, rng);
  s.log_product_cached = d.log_product;
  s.estimate_cached = d.mean;
  return s;
}

ChainState mh_step_deterministic(const ChainState& state, const BoundedDomain& domain,
                                 const TargetSpec& target, const Proposal& proposal,
                                 const DeterministicCriterion& criterion, CounterRng& rng) {
  ChainState next = state;
  next.step_index = state.step_index + 1;
  const ProposalDraw d = draw_proposal(proposal, domain, state.theta, rng);
  if (!d.in_domain) return next;
  const Point prop(d.coords);
  const double u_prop = criterion.eval(prop);
  const double lr = acceptance_log_ratio(target, state.u_cached, u_prop, 0.0, 0.0);
  if (accept(lr, rng)) {
    next.theta = prop;
    next.u_cached = u_prop;
  }
  return next;
}

ChainState mh_step_mueller(const ChainState& state, const BoundedDomain& domain,
                           const TargetSpec& target, const Proposal& proposal,
                           const ExpectedValueCriterion& criterion, CounterRng& rng) {
  ChainState next = state;
  next.step_index = state.step_index + 1;
  const ProposalDraw d = draw_proposal(proposal, domain, state.theta, rng);
  if (!d.in_domain) return next;
  const Point prop(d.coords);
  const MuellerDraws md = draw_products(criterion, prop, target, rng);
  const double lr = md.log_product - state.log_product_cached;
  if (accept(lr, rng)) {
    next.theta = prop;
    next.log_product_cached = md.log_product;
    next.estimate_cached = md.mean;
  }
  return next;
}

namespace {

struct KernelOps {
  std::function<ChainState(const ChainState&, const TargetSpec&, CounterRng&)> step;
  std::function<void(ChainState&, const TargetSpec&, CounterRng&)> stage_boundary;
  std::function<double(const ChainState&)> value;
};

RunResult run_generic(const BoundedDomain& domain, const Schedule& schedule,
                      const TargetSpec& target_final, const Proposal& proposal,
                      ChainState state, const KernelOps& ops, CounterRng& rng,
                      std::uint64_t decimation, const TraceSink* sink) {
  if (schedule.final_J() != target_final.J)
    throw std::invalid_argument("run_schedule: final stage J must equal the target J");
  if (decimation == 0) throw std::invalid_argument("run_schedule: decimation >= 1 required");
  proposal.validate(domain.dim());

  RunResult result{state, {}, state.theta.coords(), ops.value(state), 0};

  std::uint64_t last_recorded = std::uint64_t(-1);
  auto record = [&](const ChainState& s, double stage_J) {
    if (s.step_index == last_recorded) return;
    last_recorded = s.step_index;
    TraceEntry e{s.step_index, stage_J, s.theta.coords(), ops.value(s)};
    if (sink) (*sink)(e);
    result.trace.push_back(std::move(e));
  };

  record(state, schedule.stages().front().J);
  double prev_J = schedule.stages().front().J;
  bool first_stage = true;
  for (const Stage& stage : schedule.stages()) {
    const TargetSpec stage_target(stage.J, target_final.delta);
    if (!first_stage && stage.J != prev_J) ops.stage_boundary(state, stage_target, rng);
    first_stage = false;
    prev_J = stage.J;
    for (std::uint64_t i = 0; i < stage.steps; ++i) {
      state = ops.step(state, stage_target, rng);
      const double v = ops.value(state);
      if (v > result.best_value) {
        result.best_value = v;
        result.best_coords = state.theta.coords();
      }
      if (state.step_index % decimation == 0) record(state, stage.J);
    }
  }
  record(state, schedule.stages().back().J);
  result.total_steps = state.step_index;
  result.final_state = std::move(state);
  return result;
}

}  // namespace

RunResult run_schedule(const BoundedDomain& domain, const Point& initial,
                       const Schedule& schedule, const TargetSpec& target_final,
                       const Proposal& proposal, const DeterministicCriterion& criterion,
                       CounterRng& rng, std::uint64_t decimation, const TraceSink* sink) {
  KernelOps ops;
  ops.step = [&](const ChainState& s, const TargetSpec& t, CounterRng& r) {
    return mh_step_deterministic(s, domain, t, proposal, criterion, r);
  };
  ops.stage_boundary = [](ChainState&, const TargetSpec&, CounterRng&) {};
  ops.value = [](const ChainState& s) { return s.u_cached; };
  ChainState state = init_deterministic_state(domain, initial, criterion);
  return run_generic(domain, schedule, target_final, proposal, std::move(state), ops, rng,
                     decimation, sink);
}

RunResult run_schedule(const BoundedDomain& domain, const Point& initial,
                       const Schedule& schedule, const TargetSpec& target_final,
                       const Proposal& proposal, const ExpectedValueCriterion& criterion,
                       CounterRng& rng, std::uint64_t decimation, const TraceSink* sink) {
  for (const Stage& s : schedule.stages()) {
    if (std::floor(s.J) != s.J)
      throw std::invalid_argument("run_schedule: stored-product stages require integer J");
  }
  KernelOps ops;
  ops.step = [&](const ChainState& s, const TargetSpec& t, CounterRng& r) {
    return mh_step_mueller(s, domain, t, proposal, criterion, r);
  };
  // J changed: the stored product must be re-drawn with the new stage's draw
  // count to keep its semantics consistent.
  ops.stage_boundary = [&](ChainState& s, const TargetSpec& t, CounterRng& r) {
    const MuellerDraws d = draw_products(criterion, s.theta, t, r);
    s.log_product_cached = d.log_product;
    s.estimate_cached = d.mean;
  };
  ops.value = [](const ChainState& s) { return s.estimate_cached; };
  ChainState state = init_mueller_state(
      domain, initial, criterion, TargetSpec(schedule.stages().front().J, target_final.delta),
      rng);
  return run_generic(domain, schedule, target_final, proposal, std::move(state), ops, rng,
                     decimation, sink);
}

std::string trace_csv_header(std::size_t dim) {
  std::ostringstream os;
  os << "step,J";
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
  os << ",value";
  return os.str();
}

std::string trace_csv_line(const TraceEntry& e) {
  std::ostringstream os;
  char buf[32];
  os << e.step;
  std::snprintf(buf, sizeof(buf), "%.17g", e.J);
  os << ',' << buf;
  for (double c : e.coords) {
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    os << ',' << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", e.value);
  os << ',' << buf;
  return os.str();
}

}  // namespace anneal
