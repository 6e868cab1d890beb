#include "pnsim/random.hpp"

#include <algorithm>
#include <cmath>

#include "pnsim/types.hpp"

namespace pnsim::engine {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t stream_seed(std::uint64_t seed, StreamPurpose purpose) {
  return splitmix64(splitmix64(seed) ^ fnv1a(to_string(purpose)));
}

}  // namespace

std::string_view to_string(StreamPurpose purpose) {
  switch (purpose) {
    case StreamPurpose::Mining:
      return "mining";
    case StreamPurpose::Topology:
      return "topology";
    case StreamPurpose::Region:
      return "region";
    case StreamPurpose::Reselection:
      return "reselection";
  }
  return "unknown";
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose)
    : seed_(seed), purpose_(purpose), engine_(stream_seed(seed, purpose)) {}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw SimulationError("uniform_below: bound must be positive");
  // Lemire's nearly-divisionless method, 128-bit multiply.
  std::uint64_t x = engine_();
  auto m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::exponential(double mean) {
  return -mean * std::log1p(-uniform01());
}

double RandomStream::pareto(double shape) {
  return std::pow(1.0 - uniform01(), -1.0 / shape);
}

std::size_t sample_cumulative(RandomStream& stream, std::span<const double> cumulative) {
  if (cumulative.empty()) throw SimulationError("sample_cumulative: empty distribution");
  const double target = stream.uniform01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it != cumulative.end()) return static_cast<std::size_t>(it - cumulative.begin());
  // target rounded up to the total: take the last entry with positive weight.
  std::size_t index = cumulative.size() - 1;
  while (index > 0 && cumulative[index] == cumulative[index - 1]) --index;
  return index;
}

}  // namespace pnsim::engine
