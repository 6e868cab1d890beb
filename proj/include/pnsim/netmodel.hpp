#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnsim/random.hpp"
#include "pnsim/types.hpp"

namespace pnsim::net {

inline constexpr double kUnlimitedBandwidth = std::numeric_limits<double>::infinity();

// Geographic regions with node-placement weights, one-way latency matrix
// (ms) and per-region upload/download bandwidth (bits per second).
struct RegionDataset {
  std::vector<std::string> regions;
  std::vector<double> weights;
  std::vector<std::vector<SimTime>> latency_ms;
  std::vector<double> upload_bps;
  std::vector<double> download_bps;

  std::size_t size() const { return regions.size(); }

  // Throws ConfigError naming the first violated constraint.
  void validate() const;

  static RegionDataset from_json(const nlohmann::json& doc);
  static RegionDataset load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Built-in copy of presets/regions_default.json.
  static RegionDataset builtin_default();
};

// Replaces every pairwise latency and bandwidth by constants. Latency 0 and
// unlimited bandwidth together give a zero-delay network.
struct UniformOverride {
  bool enabled = false;
  SimTime latency_ms = 0;
  double bandwidth_bps = kUnlimitedBandwidth;
};

RegionIndex assign_region(engine::RandomStream& stream, const RegionDataset& dataset);

// Deterministic point-to-point delays. INV and GETDATA are latency-only;
// BLOCK adds a transfer term over min(sender upload, receiver download).
class DelayModel {
 public:
  DelayModel(RegionDataset dataset, UniformOverride uniform);

  const RegionDataset& dataset() const { return dataset_; }
  const UniformOverride& uniform() const { return uniform_; }

  SimTime control_delay(RegionIndex src, RegionIndex dst) const;
  SimTime block_transfer_delay(RegionIndex src, RegionIndex dst, std::uint64_t size_bytes) const;

 private:
  RegionDataset dataset_;
  UniformOverride uniform_;
};

// ceil(size * 8 / bandwidth seconds) in ms; 0 for unlimited bandwidth.
SimTime transfer_time_ms(std::uint64_t size_bytes, double bandwidth_bps);

}  // namespace pnsim::net
