#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace pnsim::engine {

enum class StreamPurpose : std::uint8_t { Mining, Topology, Region, Reselection };

std::string_view to_string(StreamPurpose purpose);

// Seeded pseudo-random stream. The generator is mt19937_64, whose output
// sequence is fixed by the standard; all distributions are computed here
// rather than through <random> distributions, whose algorithms are
// implementation-defined. Same (seed, purpose) gives the same draws on every
// platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamPurpose purpose);

  std::uint64_t seed() const { return seed_; }
  StreamPurpose purpose() const { return purpose_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Exponential variate with the given mean.
  double exponential(double mean);

  // Pareto variate with scale 1 and the given shape.
  double pareto(double shape);

 private:
  std::uint64_t seed_;
  StreamPurpose purpose_;
  std::mt19937_64 engine_;
};

// Index i drawn with probability cumulative[i] - cumulative[i-1], given a
// non-decreasing prefix-sum array whose last element is the total weight.
std::size_t sample_cumulative(RandomStream& stream, std::span<const double> cumulative);

}  // namespace pnsim::engine
