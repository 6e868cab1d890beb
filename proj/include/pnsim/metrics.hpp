#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pnsim/chain.hpp"
#include "pnsim/types.hpp"

namespace pnsim::metrics {

// First-arrival times of one block at every node; kNever where the block
// never arrived. The creator's arrival equals created_at.
struct BlockPropagationRecord {
  BlockId block = kNoBlock;
  SimTime created_at = 0;
  NodeId creator = kNoNode;
  std::vector<SimTime> arrivals;

  double coverage() const;
};

// q-quantile (0 < q <= 1) of (arrival - created_at) over all nodes. With
// n nodes and h = q * n: if h is a whole number the result is the midpoint
// of the h-th and (h+1)-th smallest offsets (just the h-th when h = n),
// otherwise the ceil(h)-th smallest. Nodes the block never reached count
// as +infinity; the result is nullopt when it would depend on one.
std::optional<double> propagation_percentile(const BlockPropagationRecord& record, double q);

// Same convention over plain offsets; nullopt values are unreached nodes.
std::optional<double> percentile(std::vector<std::optional<double>> offsets, double q);

struct BlockStats {
  BlockId block = kNoBlock;
  std::uint32_t height = 0;
  SimTime created_at = 0;
  std::optional<double> median_ms;
  double coverage = 0;
  bool on_main_chain = false;
};

struct Window {
  std::size_t start_block = 0;  // zero-based position in the series
  std::size_t size = 0;         // entries in the window
  std::size_t defined = 0;      // entries that contributed to the mean
  std::optional<double> mean;
};

// Non-overlapping windows in series order; the trailing window may be
// shorter. Undefined entries are skipped inside each window.
std::vector<Window> rolling_average(std::span<const std::optional<double>> series, std::size_t window);

struct Bin {
  double start_ms = 0;
  std::size_t count = 0;
};

// Half-open bins [k*w, (k+1)*w) covering the range of the defined values,
// empty bins included. Undefined values are not counted.
std::vector<Bin> histogram(std::span<const std::optional<double>> series, double bin_width_ms);

struct SummaryOptions {
  std::size_t warmup_blocks = 0;  // leading blocks excluded from the mean
  std::size_t window = 100;
  double bin_width_ms = 100.0;
};

struct RunSummary {
  std::vector<std::optional<double>> medians;  // one per generated block
  std::optional<double> mean_of_medians;
  std::size_t blocks_in_mean = 0;
  std::size_t undefined_medians = 0;  // within the averaged range
  std::vector<Window> rolling;
  std::vector<Bin> bins;
  chain::ForkStats forks;
};

// Mean of the per-block medians over [warmup, end).
std::optional<double> mean_of_medians(std::span<const std::optional<double>> medians,
                                      std::size_t from = 0, std::size_t to = SIZE_MAX);

RunSummary summarize(std::span<const BlockStats> blocks, const chain::ForkStats& forks,
                     const SummaryOptions& options = {});

}  // namespace pnsim::metrics
