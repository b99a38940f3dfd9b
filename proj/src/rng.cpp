#include "anneal/rng.hpp"

#include <cmath>

namespace anneal {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamStep = 0xD2B74407B1CE6E93ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed) + stream * kStreamStep), stream_(stream) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double CounterRng::normal01() {
  // 1 - u keeps the log argument in (0, 1].
  const double r = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
  const double t = 6.283185307179586476925286766559 * uniform01();
  return r * std::cos(t);
}

bool CounterRng::bernoulli(double p) { return uniform01() < p; }

}  // namespace anneal
