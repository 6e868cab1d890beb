#include "pnsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace pnsim::net {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("region dataset: " + message);
}

template <typename T>
std::vector<T> read_array(const nlohmann::json& doc, const char* key) {
  require(doc.contains(key), std::string("missing field '") + key + "'");
  require(doc.at(key).is_array(), std::string("field '") + key + "' must be an array");
  return doc.at(key).get<std::vector<T>>();
}

}  // namespace

void RegionDataset::validate() const {
  const std::size_t n = regions.size();
  require(n > 0, "no regions");
  require(weights.size() == n, "weights length does not match region count");
  require(latency_ms.size() == n, "latency matrix row count does not match region count");
  for (std::size_t i = 0; i < n; ++i) {
    require(latency_ms[i].size() == n, "latency row " + std::to_string(i) + " has wrong length");
    for (SimTime value : latency_ms[i]) {
      require(value > 0, "latency entries must be positive (row " + std::to_string(i) + ")");
    }
  }
  require(upload_bps.size() == n, "upload list length does not match region count");
  require(download_bps.size() == n, "download list length does not match region count");
  for (std::size_t i = 0; i < n; ++i) {
    require(upload_bps[i] > 0 && download_bps[i] > 0,
            "bandwidth must be positive for region '" + regions[i] + "'");
    require(weights[i] >= 0, "negative weight for region '" + regions[i] + "'");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-9, "weights must sum to 1 (got " + std::to_string(total) + ")");
}

RegionDataset RegionDataset::from_json(const nlohmann::json& doc) {
  RegionDataset dataset;
  try {
    dataset.regions = read_array<std::string>(doc, "regions");
    dataset.weights = read_array<double>(doc, "weights");
    dataset.latency_ms = read_array<std::vector<SimTime>>(doc, "latency_ms");
    dataset.upload_bps = read_array<double>(doc, "upload_bps");
    dataset.download_bps = read_array<double>(doc, "download_bps");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("region dataset: ") + e.what());
  }
  dataset.validate();
  return dataset;
}

RegionDataset RegionDataset::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open region dataset '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("region dataset '" + path.string() + "': " + e.what());
  }
  return from_json(doc);
}

nlohmann::json RegionDataset::to_json() const {
  return nlohmann::json{{"regions", regions},       {"weights", weights},
                        {"latency_ms", latency_ms}, {"upload_bps", upload_bps},
                        {"download_bps", download_bps}};
}

RegionDataset RegionDataset::builtin_default() {
  // Keep in sync with presets/regions_default.json (checked by a unit test).
  RegionDataset dataset;
  dataset.regions = {"north_america", "europe", "south_america", "asia_pacific", "japan", "australia"};
  dataset.weights = {0.3869, 0.5159, 0.0113, 0.0574, 0.0119, 0.0166};
  dataset.latency_ms = {
      {36, 119, 255, 310, 154, 208},  //
      {119, 12, 221, 266, 242, 350},  //
      {255, 221, 137, 347, 256, 269},  //
      {310, 266, 347, 162, 40, 146},  //
      {154, 242, 256, 40, 9, 158},    //
      {208, 350, 269, 146, 158, 33},  //
  };
  dataset.upload_bps = {4'700'000, 8'100'000, 1'800'000, 5'300'000, 3'400'000, 5'200'000};
  dataset.download_bps = {25'000'000, 24'000'000, 6'500'000, 10'000'000, 17'500'000, 14'000'000};
  return dataset;
}

RegionIndex assign_region(engine::RandomStream& stream, const RegionDataset& dataset) {
  std::vector<double> cumulative(dataset.weights.size());
  std::partial_sum(dataset.weights.begin(), dataset.weights.end(), cumulative.begin());
  return static_cast<RegionIndex>(engine::sample_cumulative(stream, cumulative));
}

SimTime transfer_time_ms(std::uint64_t size_bytes, double bandwidth_bps) {
  if (std::isinf(bandwidth_bps)) return 0;
  const double millis = static_cast<double>(size_bytes) * 8.0 * 1000.0 / bandwidth_bps;
  return static_cast<SimTime>(std::ceil(millis));
}

DelayModel::DelayModel(RegionDataset dataset, UniformOverride uniform)
    : dataset_(std::move(dataset)), uniform_(uniform) {
  dataset_.validate();
  if (uniform_.enabled) {
    if (uniform_.latency_ms < 0) throw ConfigError("uniform network latency must be >= 0");
    if (!(uniform_.bandwidth_bps > 0)) throw ConfigError("uniform network bandwidth must be > 0");
  }
}

SimTime DelayModel::control_delay(RegionIndex src, RegionIndex dst) const {
  if (uniform_.enabled) return uniform_.latency_ms;
  return dataset_.latency_ms[src][dst];
}

SimTime DelayModel::block_transfer_delay(RegionIndex src, RegionIndex dst,
                                         std::uint64_t size_bytes) const {
  if (size_bytes == 0) throw SimulationError("block_transfer_delay: size must be positive");
  if (uniform_.enabled) return uniform_.latency_ms + transfer_time_ms(size_bytes, uniform_.bandwidth_bps);
  const double bandwidth = std::min(dataset_.upload_bps[src], dataset_.download_bps[dst]);
  return dataset_.latency_ms[src][dst] + transfer_time_ms(size_bytes, bandwidth);
}

}  // namespace pnsim::net
