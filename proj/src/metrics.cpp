#include "pnsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pnsim::metrics {

double BlockPropagationRecord::coverage() const {
  if (arrivals.empty()) return 0.0;
  const auto reached = std::count_if(arrivals.begin(), arrivals.end(), [](SimTime t) { return t != kNever; });
  return static_cast<double>(reached) / static_cast<double>(arrivals.size());
}

std::optional<double> percentile(std::vector<std::optional<double>> offsets, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("percentile q must lie in (0, 1]");
  if (offsets.empty()) return std::nullopt;
  constexpr double kUnreached = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  values.reserve(offsets.size());
  for (const auto& offset : offsets) values.push_back(offset.value_or(kUnreached));
  std::sort(values.begin(), values.end());

  const std::size_t n = values.size();
  const double h = q * static_cast<double>(n);
  const double whole = std::round(h);
  double result = 0;
  if (std::abs(h - whole) < 1e-9) {
    const auto rank = static_cast<std::size_t>(whole);  // 1-based
    result = rank >= n ? values[n - 1] : 0.5 * (values[rank - 1] + values[rank]);
  } else {
    const auto rank = static_cast<std::size_t>(std::ceil(h));
    result = values[rank - 1];
  }
  if (std::isinf(result)) return std::nullopt;
  return result;
}

std::optional<double> propagation_percentile(const BlockPropagationRecord& record, double q) {
  std::vector<std::optional<double>> offsets;
  offsets.reserve(record.arrivals.size());
  for (SimTime arrival : record.arrivals) {
    if (arrival == kNever) {
      offsets.emplace_back(std::nullopt);
    } else {
      offsets.emplace_back(static_cast<double>(arrival - record.created_at));
    }
  }
  return percentile(std::move(offsets), q);
}

std::vector<Window> rolling_average(std::span<const std::optional<double>> series, std::size_t window) {
  if (window == 0) throw ConfigError("rolling window must be at least 1");
  std::vector<Window> windows;
  for (std::size_t start = 0; start < series.size(); start += window) {
    Window w;
    w.start_block = start;
    w.size = std::min(window, series.size() - start);
    double sum = 0;
    for (std::size_t i = start; i < start + w.size; ++i) {
      if (series[i]) {
        sum += *series[i];
        ++w.defined;
      }
    }
    if (w.defined > 0) w.mean = sum / static_cast<double>(w.defined);
    windows.push_back(w);
  }
  return windows;
}

std::vector<Bin> histogram(std::span<const std::optional<double>> series, double bin_width_ms) {
  if (!(bin_width_ms > 0)) throw ConfigError("histogram bin width must be positive");
  std::vector<long long> keys;
  for (const auto& value : series) {
    if (value) keys.push_back(static_cast<long long>(std::floor(*value / bin_width_ms)));
  }
  if (keys.empty()) return {};
  const auto [lo, hi] = std::minmax_element(keys.begin(), keys.end());
  const long long first = *lo;
  std::vector<Bin> bins(static_cast<std::size_t>(*hi - first + 1));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    bins[i].start_ms = static_cast<double>(first + static_cast<long long>(i)) * bin_width_ms;
  }
  for (long long key : keys) ++bins[static_cast<std::size_t>(key - first)].count;
  return bins;
}

std::optional<double> mean_of_medians(std::span<const std::optional<double>> medians, std::size_t from,
                                      std::size_t to) {
  to = std::min(to, medians.size());
  double sum = 0;
  std::size_t defined = 0;
  for (std::size_t i = from; i < to; ++i) {
    if (medians[i]) {
      sum += *medians[i];
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / static_cast<double>(defined);
}

RunSummary summarize(std::span<const BlockStats> blocks, const chain::ForkStats& forks,
                     const SummaryOptions& options) {
  RunSummary summary;
  summary.forks = forks;
  summary.medians.reserve(blocks.size());
  for (const BlockStats& block : blocks) summary.medians.push_back(block.median_ms);

  const std::size_t from = std::min(options.warmup_blocks, summary.medians.size());
  summary.mean_of_medians = mean_of_medians(summary.medians, from);
  for (std::size_t i = from; i < summary.medians.size(); ++i) {
    if (summary.medians[i]) {
      ++summary.blocks_in_mean;
    } else {
      ++summary.undefined_medians;
    }
  }
  summary.rolling = rolling_average(summary.medians, options.window);
  summary.bins = histogram(summary.medians, options.bin_width_ms);
  return summary;
}

}  // namespace pnsim::metrics
