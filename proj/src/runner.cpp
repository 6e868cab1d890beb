#include "pnsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace pnsim::runner {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << std::fixed;
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
  }
}

// Empty field for undefined values.
std::string field(const std::optional<double>& value, int precision) {
  if (!value) return "";
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << *value;
  return out.str();
}

nlohmann::json optional_json(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::string cell_name(double p, std::uint32_t k, std::uint64_t seed) {
  std::ostringstream out;
  out << "P" << std::setprecision(6) << p << "_K" << k << "_seed" << seed;
  return out.str();
}

// Runs tasks [0, count) on up to `jobs` threads; rethrows the first failure.
template <typename Task>
void parallel_for(std::size_t count, unsigned jobs, Task task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

RunResult run(const RunConfig& config, const std::optional<fs::path>& out_dir) {
  return run(config, config.policy.kind, out_dir);
}

RunResult run(const RunConfig& config, PolicyKind as, const std::optional<fs::path>& out_dir) {
  sim::SimulationSetup setup = make_setup(config, as);
  if (out_dir) ensure_directory(*out_dir);

  std::ofstream event_trace;
  std::ofstream message_trace;
  if (config.trace && out_dir) {
    event_trace = open_output(*out_dir / "events.log");
    message_trace = open_output(*out_dir / "messages.log");
    setup.event_trace = &event_trace;
    setup.message_trace = &message_trace;
  }

  sim::Simulation simulation(std::move(setup));
  simulation.run();

  RunResult result;
  result.blocks = simulation.block_stats();
  const auto generated = simulation.blocks().generated();
  result.chain.assign(generated.begin(), generated.end());
  result.summary = metrics::summarize(result.blocks, simulation.forks(), config.summary);
  result.events = simulation.engine().dispatched();
  result.reselections = simulation.network().reselections();
  result.end_time = simulation.engine().now();

  if (out_dir) {
    write_run_outputs(*out_dir, config, result, as == PolicyKind::Proposed ? "proposed" : "fixed");
  }
  return result;
}

void write_run_outputs(const fs::path& dir, const RunConfig& config, const RunResult& result,
                       const std::string& policy_label) {
  ensure_directory(dir);
  {
    auto out = open_output(dir / "blocks.csv");
    out << "block_id,height,created_at,median_ms,coverage,on_main_chain\n";
    for (const auto& block : result.blocks) {
      out << block.block << ',' << block.height << ',' << block.created_at << ','
          << field(block.median_ms, 1) << ',' << std::setprecision(6) << block.coverage << ','
          << (block.on_main_chain ? 1 : 0) << '\n';
    }
  }
  {
    std::vector<bool> on_main(result.chain.size() + 1, false);
    for (const auto& block : result.blocks) {
      if (block.block < on_main.size()) on_main[block.block] = block.on_main_chain;
    }
    auto out = open_output(dir / "chain.csv");
    out << "id,parent,height,miner,created_at,on_main_chain\n";
    for (const auto& block : result.chain) {
      out << block.id << ',' << block.parent << ',' << block.height << ',' << block.miner << ','
          << block.created_at << ',' << (on_main[block.id] ? 1 : 0) << '\n';
    }
  }
  {
    auto out = open_output(dir / "rolling.csv");
    out << "window_start_block,mean_median_ms,blocks\n";
    for (const auto& window : result.summary.rolling) {
      out << window.start_block << ',' << field(window.mean, 3) << ',' << window.size << '\n';
    }
  }
  {
    auto out = open_output(dir / "histogram.csv");
    out << "bin_start_ms,count\n";
    for (const auto& bin : result.summary.bins) {
      out << std::setprecision(1) << bin.start_ms << ',' << bin.count << '\n';
    }
  }
  {
    const auto& summary = result.summary;
    nlohmann::json doc = {
        {"policy", policy_label},
        {"seed", config.seed},
        {"config", to_json(config)},
        {"generated_blocks", result.blocks.size()},
        {"mean_of_medians_ms", optional_json(summary.mean_of_medians)},
        {"blocks_in_mean", summary.blocks_in_mean},
        {"undefined_medians", summary.undefined_medians},
        {"fork_count", summary.forks.fork_count},
        {"orphan_count", summary.forks.orphan_count},
        {"events_dispatched", result.events},
        {"reselections", result.reselections},
        {"end_time_ms", result.end_time},
    };
    auto out = open_output(dir / "summary.json");
    out << doc.dump(2) << '\n';
  }
}

SweepResult sweep(const RunConfig& config, const std::vector<double>& p_values,
                  const std::vector<std::uint32_t>& k_values, const std::vector<std::uint64_t>& seeds,
                  const std::optional<fs::path>& out_dir, unsigned jobs) {
  if (p_values.empty() || k_values.empty() || seeds.empty()) {
    throw ConfigError("sweep needs at least one P, one K and one seed");
  }
  SweepResult result;
  for (double p : p_values) {
    for (std::uint32_t k : k_values) {
      for (std::uint64_t seed : seeds) result.cells.push_back(SweepCell{p, k, seed, std::nullopt});
    }
  }
  // Validate every cell up front so a bad P/K fails before any run starts.
  for (const SweepCell& cell : result.cells) {
    RunConfig cell_config = config;
    cell_config.policy.kind = PolicyKind::Proposed;
    cell_config.policy.p = cell.p;
    cell_config.policy.k = cell.k;
    try {
      validate(cell_config);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep cell " + cell_name(cell.p, cell.k, cell.seed) + ": " + e.what());
    }
  }
  if (out_dir) ensure_directory(*out_dir);

  parallel_for(result.cells.size(), jobs, [&](std::size_t index) {
    SweepCell& cell = result.cells[index];
    RunConfig cell_config = config;
    cell_config.policy.kind = PolicyKind::Proposed;
    cell_config.policy.p = cell.p;
    cell_config.policy.k = cell.k;
    cell_config.seed = cell.seed;
    cell_config.trace = false;
    try {
      std::optional<fs::path> cell_dir;
      if (out_dir) cell_dir = *out_dir / "cells" / cell_name(cell.p, cell.k, cell.seed);
      cell.mean_median_ms = run(cell_config, cell_dir).summary.mean_of_medians;
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep cell " + cell_name(cell.p, cell.k, cell.seed) + " failed: " + e.what());
    }
  });

  if (out_dir) write_sweep_outputs(*out_dir, result);
  return result;
}

void write_sweep_outputs(const fs::path& dir, const SweepResult& result) {
  ensure_directory(dir);
  {
    auto out = open_output(dir / "grid.csv");
    out << "P,K,seed,mean_median_ms\n";
    for (const SweepCell& cell : result.cells) {
      out << std::defaultfloat << std::setprecision(6) << cell.p << ',' << cell.k << ',' << cell.seed << ','
          << field(cell.mean_median_ms, 3) << '\n';
    }
  }
  auto out = open_output(dir / "grid_summary.csv");
  out << "P,K,seeds,mean_median_ms,stddev_ms,min_ms,max_ms\n";
  std::size_t i = 0;
  while (i < result.cells.size()) {
    std::size_t j = i;
    std::vector<double> values;
    while (j < result.cells.size() && result.cells[j].p == result.cells[i].p && result.cells[j].k == result.cells[i].k) {
      if (result.cells[j].mean_median_ms) values.push_back(*result.cells[j].mean_median_ms);
      ++j;
    }
    std::optional<double> mean, stddev, lo, hi;
    if (!values.empty()) {
      double sum = 0;
      for (double v : values) sum += v;
      mean = sum / static_cast<double>(values.size());
      double squares = 0;
      for (double v : values) squares += (v - *mean) * (v - *mean);
      stddev = values.size() > 1 ? std::sqrt(squares / static_cast<double>(values.size() - 1)) : 0.0;
      lo = *std::min_element(values.begin(), values.end());
      hi = *std::max_element(values.begin(), values.end());
    }
    out << std::defaultfloat << std::setprecision(6) << result.cells[i].p << ',' << result.cells[i].k << ','
        << values.size() << ','
        << field(mean, 3) << ',' << field(stddev, 3) << ',' << field(lo, 3) << ',' << field(hi, 3) << '\n';
    i = j;
  }
}

CompareResult compare(const RunConfig& config, const std::optional<fs::path>& out_dir, unsigned jobs) {
  CompareResult result;
  std::optional<fs::path> proposed_dir, fixed_dir;
  if (out_dir) {
    ensure_directory(*out_dir);
    proposed_dir = *out_dir / "proposed";
    fixed_dir = *out_dir / "fixed";
  }
  parallel_for(2, jobs, [&](std::size_t arm) {
    if (arm == 0) {
      result.proposed = run(config, PolicyKind::Proposed, proposed_dir);
    } else {
      result.fixed = run(config, PolicyKind::Fixed, fixed_dir);
    }
  });

  if (out_dir) {
    const auto& a = result.proposed.summary;
    const auto& b = result.fixed.summary;
    {
      auto out = open_output(*out_dir / "rolling_pair.csv");
      out << "window_start_block,proposed_mean_median_ms,fixed_mean_median_ms\n";
      for (std::size_t i = 0; i < std::min(a.rolling.size(), b.rolling.size()); ++i) {
        out << a.rolling[i].start_block << ',' << field(a.rolling[i].mean, 3) << ',' << field(b.rolling[i].mean, 3)
            << '\n';
      }
    }
    std::optional<double> gap;
    if (a.mean_of_medians && b.mean_of_medians && *b.mean_of_medians != 0) {
      gap = (*b.mean_of_medians - *a.mean_of_medians) / *b.mean_of_medians;
    }
    nlohmann::json doc = {
        {"seed", config.seed},
        {"config", to_json(config)},
        {"proposed_mean_of_medians_ms", optional_json(a.mean_of_medians)},
        {"fixed_mean_of_medians_ms", optional_json(b.mean_of_medians)},
        {"relative_improvement", optional_json(gap)},
    };
    auto out = open_output(*out_dir / "compare.json");
    out << doc.dump(2) << '\n';
  }
  return result;
}

}  // namespace pnsim::runner
