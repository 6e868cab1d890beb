#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnsim/metrics.hpp"
#include "pnsim/netmodel.hpp"
#include "pnsim/selection.hpp"
#include "pnsim/simulation.hpp"

namespace pnsim::runner {

enum class Preset : std::uint8_t { Bitcoin, Litecoin, Dogecoin, Custom };

std::string to_string(Preset preset);
Preset parse_preset(const std::string& name);

enum class PolicyKind : std::uint8_t { Proposed, Fixed };

PolicyKind parse_policy(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Proposed;
  double p = 0.3;
  std::uint32_t k = 1;
  std::uint32_t reselect_every = 10;
  std::uint32_t outbound = 8;
  std::optional<std::uint32_t> inbound_cap;  // unset: 30 proposed, 125 fixed

  pns::SelectionPolicy build() const;
  pns::SelectionPolicy build(PolicyKind as) const;
};

struct RunConfig {
  Preset preset = Preset::Bitcoin;
  std::size_t nodes = 6000;
  double interval_ms = 600'000;
  std::uint64_t block_size = 546'816;
  PolicyConfig policy;
  std::optional<std::filesystem::path> region_dataset;  // unset: built-in default
  net::UniformOverride uniform;
  sim::MiningProfile mining;
  std::uint64_t blocks = 5000;
  std::uint64_t seed = 42;
  metrics::SummaryOptions summary;
  bool trace = false;
};

// Preset rows: bitcoin 6000 nodes / 10 min / 534 KiB, litecoin 800 /
// 2.5 min / 6.11 KiB, dogecoin 600 / 1 min / 8 KiB. Custom leaves the
// three fields zero so they must be given explicitly.
void apply_preset(RunConfig& config, Preset preset);
RunConfig preset_config(Preset preset);

// Throws ConfigError describing the first invalid field.
void validate(const RunConfig& config);

// Reads an INI file with [run], [netmodel], [chain], [pns] and [metrics]
// sections on top of `base`. A preset named in [run] is applied before the
// remaining keys.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

// "latency_ms,bandwidth_bps"; bandwidth may be "inf".
net::UniformOverride parse_uniform_network(const std::string& text);

sim::SimulationSetup make_setup(const RunConfig& config);
sim::SimulationSetup make_setup(const RunConfig& config, PolicyKind as);

nlohmann::json to_json(const RunConfig& config);

struct RunResult {
  std::vector<metrics::BlockStats> blocks;
  std::vector<chain::Block> chain;  // generated blocks
  metrics::RunSummary summary;
  std::uint64_t events = 0;
  std::uint64_t reselections = 0;
  SimTime end_time = 0;
};

// Runs one simulation; writes outputs when `out_dir` is given.
RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& out_dir = std::nullopt);
RunResult run(const RunConfig& config, PolicyKind as,
              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Output files of a run directory.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const RunResult& result,
                       const std::string& policy_label);

struct SweepCell {
  double p = 0;
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  std::optional<double> mean_median_ms;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // P-major, then K, then seed
};

// One independent run per (P, K, seed); up to `jobs` cells in parallel.
// A failing cell aborts the sweep with an error naming the cell.
SweepResult sweep(const RunConfig& config, const std::vector<double>& p_values,
                  const std::vector<std::uint32_t>& k_values, const std::vector<std::uint64_t>& seeds,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt, unsigned jobs = 1);

void write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& result);

struct CompareResult {
  RunResult proposed;
  RunResult fixed;
};

// Same seed and environment, proposed vs fixed-random policy.
CompareResult compare(const RunConfig& config, const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      unsigned jobs = 1);

}  // namespace pnsim::runner
