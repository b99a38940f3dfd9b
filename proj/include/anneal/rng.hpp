#ifndef ANNEAL_RNG_HPP
#define ANNEAL_RNG_HPP

#include <cstdint>

namespace anneal {

// Counter-based pseudo-random generator: the i-th output of a (seed, stream)
// pair is a fixed 64-bit mix of key + i*gamma, so sequences are reproducible
// bit-for-bit across platforms and streams never share state. Each chain or
// verification worker owns one stream; merging results needs no coordination.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; always consumes exactly two uniforms.
  double normal01();
  // Bernoulli(p); consumes one uniform.
  bool bernoulli(double p);

  std::uint64_t counter() const { return counter_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace anneal

#endif  // ANNEAL_RNG_HPP
