#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "anneal/registry.hpp"
#include "anneal/sampler.hpp"

using namespace anneal;

namespace {

const BoundedDomain kUnit({0.0}, {1.0});

DeterministicCriterion counting_criterion(std::shared_ptr<int> counter, double value) {
  return DeterministicCriterion([counter, value](const Point&) {
    ++*counter;
    return value;
  });
}

}  // namespace

TEST_CASE("default_schedule builds the geometric ladder") {
  const Schedule single = default_schedule(1.0, 100);
  REQUIRE_EQ(single.stages().size(), 1);
  CHECK_EQ(single.stages()[0].J, 1.0);
  CHECK_EQ(single.stages()[0].steps, 100);

  const Schedule s = default_schedule(6.0, 100);
  REQUIRE_EQ(s.stages().size(), 4);
  CHECK_EQ(s.stages()[0].J, 1.0);
  CHECK_EQ(s.stages()[0].steps, 10);
  CHECK_EQ(s.stages()[1].J, 2.0);
  CHECK_EQ(s.stages()[2].J, 4.0);
  CHECK_EQ(s.stages()[3].J, 6.0);
  CHECK_EQ(s.stages()[3].steps, 100);
  CHECK_EQ(s.total_steps(), 130);
  CHECK_EQ(s.final_J(), 6.0);

  // total = k + ceil(log2(J_final)) * (k/10) within the rounding of k/10.
  const Schedule s9 = default_schedule(9.0, 1000);
  CHECK_EQ(s9.total_steps(), 1000 + 4 * 100);

  const Schedule tiny = default_schedule(4.0, 5);  // warm-up floor of one step
  CHECK_EQ(tiny.stages()[0].steps, 1);
}

TEST_CASE("schedule invariants") {
  CHECK_THROWS_AS(Schedule({}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({{2.0, 5}, {1.0, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({{0.5, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({{1.0, 5}, {2.0, 0}}), std::invalid_argument);
  CHECK_NOTHROW(Schedule({{1.0, 0}, {2.0, 5}}));  // zero-length warm-up stage is legal
}

TEST_CASE("proposal validation and uniform weight") {
  CHECK_EQ(Proposal::uniform().uniform_weight(), 1.0);
  CHECK_EQ(Proposal::walk({0.1}).uniform_weight(), 0.0);
  CHECK_EQ(Proposal::mixture(0.3, {0.1}).uniform_weight(), doctest::Approx(0.7).epsilon(1e-15));
  CHECK_NOTHROW(Proposal::uniform().validate(3));
  CHECK_THROWS_AS(Proposal::walk({0.1}).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(Proposal::walk({-0.1}).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(Proposal::mixture(1.0, {0.1}).validate(1), std::invalid_argument);
}

TEST_CASE("out-of-domain proposals are rejected as moves") {
  auto count = std::make_shared<int>(0);
  const DeterministicCriterion crit = counting_criterion(count, 0.5);
  const TargetSpec target(4.0, 0.5);
  // A walk this wide leaves [0, 1] on essentially every draw.
  const Proposal wide = Proposal::walk({1e9});
  CounterRng rng(3, 0);
  ChainState state = init_deterministic_state(kUnit, kUnit.make_point({0.5}), crit);
  CHECK_EQ(*count, 1);
  for (int i = 0; i < 50; ++i) {
    const ChainState next = mh_step_deterministic(state, kUnit, target, wide, crit, rng);
    CHECK_EQ(next.step_index, state.step_index + 1);
    CHECK_EQ(next.theta[0], 0.5);
    CHECK_EQ(next.u_cached, state.u_cached);
    state = next;
  }
  CHECK_EQ(*count, 1);  // no criterion evaluation for rejected-out-of-box moves
}

TEST_CASE("equal criterion values with a symmetric proposal always accept") {
  const DeterministicCriterion flat([](const Point&) { return 0.7; });
  const TargetSpec target(9.0, 0.5);
  const Proposal uniform = Proposal::uniform();
  CounterRng rng(5, 0);
  ChainState state = init_deterministic_state(kUnit, kUnit.make_point({0.5}), flat);
  for (int i = 0; i < 200; ++i) {
    const double before = state.theta[0];
    state = mh_step_deterministic(state, kUnit, target, uniform, flat, rng);
    CHECK(state.theta[0] != before);  // accepted: a fresh uniform point a.s. differs
    CHECK_EQ(state.u_cached, 0.7);
  }
}

TEST_CASE("exactly one criterion evaluation per in-domain step") {
  auto count = std::make_shared<int>(0);
  const DeterministicCriterion crit = counting_criterion(count, 0.4);
  const TargetSpec target(2.0, 1.0);
  CounterRng rng(6, 0);
  ChainState state = init_deterministic_state(kUnit, kUnit.make_point({0.25}), crit);
  const int steps = 500;
  for (int i = 0; i < steps; ++i)
    state = mh_step_deterministic(state, kUnit, target, Proposal::uniform(), crit, rng);
  CHECK_EQ(*count, steps + 1);  // one per step plus the initial evaluation
}

TEST_CASE("the chain never leaves the domain") {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  const Proposal mix = Proposal::mixture(0.5, {0.2});
  CounterRng rng(7, 0);
  ChainState state = init_deterministic_state(f.domain, f.domain.uniform_point(rng), f.criterion);
  for (int i = 0; i < 20000; ++i) {
    state = mh_step_deterministic(state, f.domain, target, mix, f.criterion, rng);
    CHECK(f.domain.contains(state.theta));
  }
}

TEST_CASE("identical seeds give bit-identical traces") {
  const RegistryEntry& f = find_function("bumps1d");
  const Schedule schedule = default_schedule(6.0, 2000);
  const TargetSpec target(6.0, 0.5);
  auto run_once = [&]() {
    CounterRng rng(77, 0);
    const Point start = f.domain.uniform_point(rng);
    return run_schedule(f.domain, start, schedule, target, Proposal::mixture(0.3, {0.1}),
                        f.criterion, rng, 1);
  };
  const RunResult a = run_once();
  const RunResult b = run_once();
  REQUIRE_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK_EQ(a.trace[i].step, b.trace[i].step);
    CHECK_EQ(a.trace[i].coords[0], b.trace[i].coords[0]);
    CHECK_EQ(a.trace[i].value, b.trace[i].value);
    CHECK_EQ(trace_csv_line(a.trace[i]), trace_csv_line(b.trace[i]));
  }
}

TEST_CASE("single stage equals raw kernel steps; zero-length stages are no-ops") {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  const Proposal uniform = Proposal::uniform();

  CounterRng r1(911, 0);
  const Point start1 = f.domain.uniform_point(r1);
  const RunResult via_schedule =
      run_schedule(f.domain, start1, Schedule({{6.0, 500}}), target, uniform, f.criterion, r1,
                   1000);

  CounterRng r2(911, 0);
  const Point start2 = f.domain.uniform_point(r2);
  ChainState manual = init_deterministic_state(f.domain, start2, f.criterion);
  for (int i = 0; i < 500; ++i)
    manual = mh_step_deterministic(manual, f.domain, target, uniform, f.criterion, r2);
  CHECK_EQ(via_schedule.final_state.theta[0], manual.theta[0]);
  CHECK_EQ(via_schedule.final_state.u_cached, manual.u_cached);

  CounterRng r3(911, 0);
  const Point start3 = f.domain.uniform_point(r3);
  const RunResult with_empty =
      run_schedule(f.domain, start3, Schedule({{1.0, 0}, {6.0, 500}}), target, uniform,
                   f.criterion, r3, 1000);
  CHECK_EQ(with_empty.final_state.theta[0], via_schedule.final_state.theta[0]);
  CHECK_EQ(with_empty.total_steps, 500);
}

TEST_CASE("long-run histogram matches the grid-normalized density") {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  const Proposal uniform = Proposal::uniform();
  CounterRng rng(13, 0);
  ChainState state = init_deterministic_state(f.domain, f.domain.uniform_point(rng), f.criterion);

  constexpr std::size_t kGrid = 10000;
  std::vector<double> u_grid(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / kGrid;
    u_grid[i] = f.criterion.eval(Point({t}));
  }
  constexpr std::size_t kBins = 100;
  std::vector<double> hist(kBins, 0.0);
  constexpr int kSteps = 1000000;
  for (int i = 0; i < kSteps; ++i) {
    state = mh_step_deterministic(state, f.domain, target, uniform, f.criterion, rng);
    auto b = static_cast<std::size_t>(state.theta[0] * kBins);
    if (b >= kBins) b = kBins - 1;
    hist[b] += 1.0 / kSteps;
  }

  // Exact bin masses from the grid-normalized (u + delta)^J density.
  std::vector<double> w(kGrid);
  double total = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    w[i] = std::pow(u_grid[i] + target.delta, target.J);
    total += w[i];
  }
  double tv = 0.0;
  for (std::size_t b = 0; b < kBins; ++b) {
    double mass = 0.0;
    for (std::size_t i = b * (kGrid / kBins); i < (b + 1) * (kGrid / kBins); ++i) mass += w[i];
    tv += std::abs(hist[b] - mass / total);
  }
  tv *= 0.5;
  CHECK(tv <= 0.02);
}

TEST_CASE("empirical detailed-balance residuals vanish on binned pairs") {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  const Proposal uniform = Proposal::uniform();
  CounterRng rng(14, 0);
  ChainState state = init_deterministic_state(f.domain, f.domain.uniform_point(rng), f.criterion);
  constexpr std::size_t kBins = 20;
  std::array<std::array<double, kBins>, kBins> counts{};
  auto bin_of = [&](double x) {
    auto b = static_cast<std::size_t>(x * kBins);
    return b >= kBins ? kBins - 1 : b;
  };
  std::size_t prev = bin_of(state.theta[0]);
  for (int i = 0; i < 500000; ++i) {
    state = mh_step_deterministic(state, f.domain, target, uniform, f.criterion, rng);
    const std::size_t cur = bin_of(state.theta[0]);
    counts[prev][cur] += 1.0;
    prev = cur;
  }
  for (std::size_t a = 0; a < kBins; ++a) {
    for (std::size_t b = a + 1; b < kBins; ++b) {
      const double nab = counts[a][b];
      const double nba = counts[b][a];
      if (nab + nba < 25.0) continue;  // too few transitions for a z-score
      const double z = std::abs(nab - nba) / std::sqrt(nab + nba);
      CHECK(z < 5.0);
    }
  }
}

TEST_CASE("zero-variance conditional draws reproduce the deterministic kernel exactly") {
  const RegistryEntry& f = find_function("bumps1d");
  // J = 2 keeps every stored-product sum exactly representable, so the two
  // kernels must agree bit for bit, value column included.
  const Schedule schedule = default_schedule(2.0, 3000);
  const TargetSpec target(2.0, 0.5);
  const Proposal uniform = Proposal::uniform();
  const ExpectedValueCriterion zero_variance(
      [&f](const Point& p, CounterRng&) { return f.criterion.eval(p); });

  CounterRng r1(313, 0);
  const RunResult det = run_schedule(f.domain, f.domain.make_point({0.25}), schedule, target,
                                     uniform, f.criterion, r1, 1);
  CounterRng r2(313, 0);
  const RunResult noisy = run_schedule(f.domain, f.domain.make_point({0.25}), schedule, target,
                                       uniform, zero_variance, r2, 1);
  REQUIRE_EQ(det.trace.size(), noisy.trace.size());
  for (std::size_t i = 0; i < det.trace.size(); ++i) {
    CHECK_EQ(det.trace[i].step, noisy.trace[i].step);
    CHECK_EQ(det.trace[i].coords[0], noisy.trace[i].coords[0]);
    CHECK_EQ(det.trace[i].value, noisy.trace[i].value);
  }
}

TEST_CASE("stored-product chain matches the enumerated extended-state law") {
  // Two-level criterion: p = 0.3 on the left half, 0.7 on the right; g is a
  // Bernoulli(p) draw; J = 1, delta = 0.5, uniform proposal. The extended
  // state (side, stored g) is a 4-state chain whose transition matrix can be
  // enumerated exactly.
  const double p_left = 0.3, p_right = 0.7, delta = 0.5;
  const ExpectedValueCriterion noisy(
      [&](const Point& p, CounterRng& rng) {
        return rng.bernoulli(p[0] < 0.5 ? p_left : p_right) ? 1.0 : 0.0;
      });
  const TargetSpec target(1.0, delta);

  // Exact stationary law by enumeration and power iteration.
  auto idx = [](int side, int g) { return side * 2 + g; };
  std::array<std::array<double, 4>, 4> P{};
  const double p_of[2] = {p_left, p_right};
  for (int s = 0; s < 2; ++s) {
    for (int g = 0; g < 2; ++g) {
      for (int sp = 0; sp < 2; ++sp) {
        for (int gt = 0; gt < 2; ++gt) {
          const double prob = 0.5 * (gt == 1 ? p_of[sp] : 1.0 - p_of[sp]);
          const double acc = std::min(1.0, (gt + delta) / (g + delta));
          P[idx(s, g)][idx(sp, gt)] += prob * acc;
          P[idx(s, g)][idx(s, g)] += prob * (1.0 - acc);
        }
      }
    }
  }
  std::array<double, 4> pi{0.25, 0.25, 0.25, 0.25};
  for (int it = 0; it < 2000; ++it) {
    std::array<double, 4> next{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) next[b] += pi[a] * P[a][b];
    pi = next;
  }

  CounterRng rng(2718, 0);
  ChainState state = init_mueller_state(kUnit, kUnit.make_point({0.25}), noisy, target, rng);
  std::array<double, 4> occupancy{};
  constexpr int kSteps = 1000000;
  for (int i = 0; i < kSteps; ++i) {
    state = mh_step_mueller(state, kUnit, target, Proposal::uniform(), noisy, rng);
    const int side = state.theta[0] < 0.5 ? 0 : 1;
    const int g = state.estimate_cached > 0.5 ? 1 : 0;  // J = 1: the stored draw itself
    occupancy[idx(side, g)] += 1.0 / kSteps;
  }
  for (int s = 0; s < 4; ++s) CHECK(std::abs(occupancy[s] - pi[s]) < 1e-2);
  // Marginal over sides is the (p + delta) law: (0.4, 0.6).
  CHECK(std::abs(occupancy[0] + occupancy[1] - 0.4) < 1e-2);
}

TEST_CASE("stored-product kernel consumes no draws on out-of-box proposals") {
  auto calls = std::make_shared<int>(0);
  const ExpectedValueCriterion noisy(
      [calls](const Point&, CounterRng&) {
        ++*calls;
        return 0.5;
      });
  const TargetSpec target(3.0, 0.5);
  CounterRng rng(41, 0);
  ChainState state = init_mueller_state(kUnit, kUnit.make_point({0.5}), noisy, target, rng);
  CHECK_EQ(*calls, 3);
  const Proposal wide = Proposal::walk({1e9});
  for (int i = 0; i < 50; ++i) state = mh_step_mueller(state, kUnit, target, wide, noisy, rng);
  CHECK_EQ(*calls, 3);
  CHECK_EQ(state.step_index, 50);
}

TEST_CASE("stored-product stages demand integer J") {
  const ExpectedValueCriterion noisy([](const Point&, CounterRng&) { return 0.5; });
  CounterRng rng(1, 0);
  CHECK_THROWS_AS(init_mueller_state(kUnit, kUnit.make_point({0.5}), noisy,
                                     TargetSpec(2.5, 0.5), rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_schedule(kUnit, kUnit.make_point({0.5}), Schedule({{2.5, 10}}),
                               TargetSpec(2.5, 0.5), Proposal::uniform(), noisy, rng),
                  std::invalid_argument);
}

TEST_CASE("default schedule finds the bumps1d optimum on almost every seed") {
  const RegistryEntry& f = find_function("bumps1d");
  const Schedule schedule = default_schedule(6.0, 70000);  // 91k total steps
  const TargetSpec target(6.0, 0.5);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed, 0);
    const RunResult r = run_schedule(f.domain, f.domain.uniform_point(rng), schedule, target,
                                     Proposal::uniform(), f.criterion, rng, 100000);
    if (r.best_value >= f.max_value - 0.05) ++good;
  }
  CHECK(good >= 19);
}

TEST_CASE("trace decimation and csv format") {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(2.0, 0.5);
  CounterRng rng(55, 0);
  std::vector<TraceEntry> seen;
  TraceSink sink = [&](const TraceEntry& e) { seen.push_back(e); };
  const RunResult r = run_schedule(f.domain, f.domain.make_point({0.5}), Schedule({{2.0, 1000}}),
                                   target, Proposal::uniform(), f.criterion, rng, 250, &sink);
  REQUIRE_EQ(r.trace.size(), seen.size());
  REQUIRE_EQ(r.trace.size(), 5);  // steps 0, 250, 500, 750, 1000
  CHECK_EQ(r.trace.front().step, 0);
  CHECK_EQ(r.trace[1].step, 250);
  CHECK_EQ(r.trace.back().step, 1000);

  CHECK_EQ(trace_csv_header(2), "step,J,x0,x1,value");
  const std::string line = trace_csv_line(r.trace[1]);
  CHECK(line.rfind("250,2,", 0) == 0);
}
