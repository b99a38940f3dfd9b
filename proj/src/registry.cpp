#include "anneal/registry.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace anneal {
namespace {

constexpr double kPi = 3.14159265358979323846;

// bumps1d on [0, 1]:
//   U(t) = 0.5 (1 + cos(6 pi t)) exp(-2 (t - 2/3)^2)
// Three cosine humps under a Gaussian envelope; unique global maximizer at
// t = 2/3 where both factors equal 1, so max U = 1 exactly. min U = 0 at the
// cosine troughs.
double bumps1d(const Point& p) {
  const double t = p[0];
  const double d = t - 2.0 / 3.0;
  return 0.5 * (1.0 + std::cos(6.0 * kPi * t)) * std::exp(-2.0 * d * d);
}

// steps1d on [0, 1]: U = 0.9 on [0.4, 0.5], 0.2 elsewhere. Discontinuous,
// with a positive-measure maximizer set.
double steps1d(const Point& p) {
  const double t = p[0];
  return (t >= 0.4 && t <= 0.5) ? 0.9 : 0.2;
}

// rastrigin-scaled-2d on [-5.12, 5.12]^2, flipped to maximization:
//   U(x, y) = 1 - [h(x) + h(y)] / 92.4288,  h(t) = t^2 + 10 (1 - cos(2 pi t)).
// h(t) <= 5.12^2 + 20 = 46.2144 per axis, so U lies in (0, 1]; unique global
// maximizer at the origin with U = 1 exactly.
double rastrigin_scaled_2d(const Point& p) {
  double r = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double t = p[i];
    r += t * t + 10.0 * (1.0 - std::cos(2.0 * kPi * t));
  }
  return 1.0 - r / 92.4288;
}

// Noisy counterpart of a deterministic entry: one Bernoulli(U(theta)) draw,
// valued in {0, 1}, so its expectation is exactly U(theta).
ExpectedValueCriterion bernoulli_of(const DeterministicCriterion& base, std::string name) {
  return ExpectedValueCriterion(
      [base](const Point& p, CounterRng& rng) { return rng.bernoulli(base.eval(p)) ? 1.0 : 0.0; },
      std::move(name));
}

std::vector<RegistryEntry> build_registry() {
  std::vector<RegistryEntry> r;

  DeterministicCriterion bumps(bumps1d, "bumps1d");
  r.push_back(RegistryEntry{
      "bumps1d",
      "0.5*(1+cos(6*pi*t))*exp(-2*(t-2/3)^2) on [0,1]; unique maximizer t=2/3, max 1",
      BoundedDomain({0.0}, {1.0}), bumps, std::nullopt, 1.0, {{2.0 / 3.0}}});

  DeterministicCriterion steps(steps1d, "steps1d");
  r.push_back(RegistryEntry{
      "steps1d",
      "0.9 on [0.4,0.5], 0.2 elsewhere, on [0,1]; maximizer set [0.4,0.5], max 0.9",
      BoundedDomain({0.0}, {1.0}), steps, std::nullopt, 0.9, {{0.45}}});

  DeterministicCriterion rast(rastrigin_scaled_2d, "rastrigin-scaled-2d");
  r.push_back(RegistryEntry{
      "rastrigin-scaled-2d",
      "1 - sum_i [t_i^2 + 10(1-cos(2*pi*t_i))]/92.4288 on [-5.12,5.12]^2; "
      "unique maximizer (0,0), max 1",
      BoundedDomain({-5.12, -5.12}, {5.12, 5.12}), rast, std::nullopt, 1.0, {{0.0, 0.0}}});

  r.push_back(RegistryEntry{
      "noisy-bumps1d",
      "single Bernoulli(U(theta)) draw of bumps1d; expected value equals bumps1d",
      BoundedDomain({0.0}, {1.0}), bumps, bernoulli_of(bumps, "noisy-bumps1d"), 1.0,
      {{2.0 / 3.0}}});

  r.push_back(RegistryEntry{
      "noisy-steps1d",
      "single Bernoulli(U(theta)) draw of steps1d; expected value equals steps1d",
      BoundedDomain({0.0}, {1.0}), steps, bernoulli_of(steps, "noisy-steps1d"), 0.9, {{0.45}}});

  return r;
}

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> r = build_registry();
  return r;
}

}  // namespace

const RegistryEntry& find_function(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e;
  }
  std::ostringstream os;
  os << "unknown function '" << name << "'; available:";
  for (const auto& e : registry()) os << " " << e.name;
  throw std::invalid_argument(os.str());
}

std::vector<std::string> function_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

}  // namespace anneal
