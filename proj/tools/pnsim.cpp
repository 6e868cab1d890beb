// pnsim: block propagation experiments with score-based neighbor selection.
//
//   pnsim run     --preset bitcoin --blocks 2000 --out out/run
//   pnsim sweep   --preset bitcoin --p-list 0.1,0.2,0.3 --k-list 1,2,3 --out out/sweep
//   pnsim compare --preset bitcoin --uniform-network 100,8000000 --out out/cmp

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pnsim/runner.hpp"

namespace {

using pnsim::runner::RunConfig;

struct CommonFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> preset;
  std::optional<std::string> policy;
  std::optional<double> p;
  std::optional<std::uint32_t> k;
  std::optional<std::uint32_t> reselect_every;
  std::optional<std::uint32_t> outbound;
  std::optional<std::uint32_t> inbound_cap;
  std::optional<std::uint64_t> blocks;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> nodes;
  std::optional<double> interval_ms;
  std::optional<std::uint64_t> block_size;
  std::optional<std::string> region_dataset;
  std::optional<std::string> uniform_network;
  bool uniform_mining = false;
  std::optional<double> pareto_mining;
  std::optional<std::size_t> warmup;
  std::optional<std::size_t> window;
  std::optional<double> bin_width;
  std::string out = "pnsim-out";
  bool trace = false;
  unsigned jobs = 1;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--config", f.config_file, "INI config file ([run] [netmodel] [chain] [pns] [metrics])");
  cmd.add_option("--preset", f.preset, "bitcoin | litecoin | dogecoin | custom");
  cmd.add_option("--policy", f.policy, "proposed | fixed");
  cmd.add_option("--p", f.p, "score weight P in [0, 1]");
  cmd.add_option("--k", f.k, "random outbound slots K");
  cmd.add_option("--reselect-every", f.reselect_every, "blocks received between reselections");
  cmd.add_option("--outbound", f.outbound, "outbound slots per node");
  cmd.add_option("--inbound-cap", f.inbound_cap, "inbound connection cap per node");
  cmd.add_option("--blocks", f.blocks, "blocks to generate");
  cmd.add_option("--seed", f.seed, "random seed");
  cmd.add_option("--nodes", f.nodes, "node count");
  cmd.add_option("--interval-ms", f.interval_ms, "mean block interval (ms)");
  cmd.add_option("--block-size", f.block_size, "block size (bytes)");
  cmd.add_option("--region-dataset", f.region_dataset, "region dataset JSON file");
  cmd.add_option("--uniform-network", f.uniform_network, "uniform delays: <latency_ms,bandwidth_bps>");
  cmd.add_flag("--uniform-mining", f.uniform_mining, "equal mining power for every node");
  cmd.add_option("--pareto-mining", f.pareto_mining, "Pareto-distributed mining power with this shape");
  cmd.add_option("--warmup", f.warmup, "leading blocks excluded from the mean of medians");
  cmd.add_option("--window", f.window, "rolling window size in blocks");
  cmd.add_option("--bin-width", f.bin_width, "histogram bin width (ms)");
  cmd.add_option("--out", f.out, "output directory")->capture_default_str();
  cmd.add_flag("--trace", f.trace, "write event and message traces");
  cmd.add_option("--jobs", f.jobs, "parallel simulations")->capture_default_str();
}

RunConfig resolve(const CommonFlags& f) {
  using namespace pnsim::runner;
  RunConfig config;
  if (f.preset) apply_preset(config, parse_preset(*f.preset));
  if (f.config_file) config = load_config_file(*f.config_file, config);
  if (f.preset) {
    // The command line wins over a preset named in the config file.
    const RunConfig from_file = config;
    apply_preset(config, parse_preset(*f.preset));
    if (from_file.preset == config.preset) {
      config.nodes = from_file.nodes;
      config.interval_ms = from_file.interval_ms;
      config.block_size = from_file.block_size;
    }
  }
  if (f.policy) config.policy.kind = parse_policy(*f.policy);
  if (f.p) config.policy.p = *f.p;
  if (f.k) config.policy.k = *f.k;
  if (f.reselect_every) config.policy.reselect_every = *f.reselect_every;
  if (f.outbound) config.policy.outbound = *f.outbound;
  if (f.inbound_cap) config.policy.inbound_cap = *f.inbound_cap;
  if (f.blocks) config.blocks = *f.blocks;
  if (f.seed) config.seed = *f.seed;
  if (f.nodes) config.nodes = *f.nodes;
  if (f.interval_ms) config.interval_ms = *f.interval_ms;
  if (f.block_size) config.block_size = *f.block_size;
  if (f.region_dataset) config.region_dataset = *f.region_dataset;
  if (f.uniform_network) config.uniform = parse_uniform_network(*f.uniform_network);
  if (f.pareto_mining) {
    config.mining.kind = pnsim::sim::MiningProfile::Kind::Pareto;
    config.mining.pareto_shape = *f.pareto_mining;
  }
  if (f.uniform_mining) config.mining.kind = pnsim::sim::MiningProfile::Kind::Uniform;
  if (f.warmup) config.summary.warmup_blocks = *f.warmup;
  if (f.window) config.summary.window = *f.window;
  if (f.bin_width) config.summary.bin_width_ms = *f.bin_width;
  config.trace = f.trace;
  validate(config);
  return config;
}

std::string format_ms(const std::optional<double>& value) {
  if (!value) return "undefined";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << *value << " ms";
  return out.str();
}

void print_run(const std::string& label, const pnsim::runner::RunResult& result) {
  const auto& summary = result.summary;
  std::cout << label << ": mean of medians " << format_ms(summary.mean_of_medians) << " over "
            << summary.blocks_in_mean << " blocks";
  if (summary.undefined_medians > 0) std::cout << " (" << summary.undefined_medians << " undefined)";
  std::cout << ", forks " << summary.forks.fork_count << ", orphans " << summary.forks.orphan_count
            << ", reselections " << result.reselections << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockchain block propagation simulator with proximity neighbor selection"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, compare_flags;
  std::vector<double> p_list{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::uint32_t> k_list{1, 2, 3};
  std::vector<std::uint64_t> seeds{1, 2, 3};

  auto* run_cmd = app.add_subcommand("run", "single simulation run");
  add_common(*run_cmd, run_flags);

  auto* sweep_cmd = app.add_subcommand("sweep", "P x K x seed grid of proposed-policy runs");
  add_common(*sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--p-list", p_list, "P values")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--k-list", k_list, "K values")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds, "seeds")->delimiter(',')->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "proposed vs fixed-random on the same environment");
  add_common(*compare_cmd, compare_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const RunConfig config = resolve(run_flags);
      const auto result = pnsim::runner::run(config, run_flags.out);
      print_run(config.policy.kind == pnsim::runner::PolicyKind::Proposed ? "proposed" : "fixed", result);
      std::cout << "outputs written to " << run_flags.out << '\n';
    } else if (sweep_cmd->parsed()) {
      const RunConfig config = resolve(sweep_flags);
      const auto result = pnsim::runner::sweep(config, p_list, k_list, seeds, sweep_flags.out, sweep_flags.jobs);
      for (const auto& cell : result.cells) {
        std::cout << "P=" << cell.p << " K=" << cell.k << " seed=" << cell.seed << ": "
                  << format_ms(cell.mean_median_ms) << '\n';
      }
      std::cout << "grid written to " << sweep_flags.out << '\n';
    } else if (compare_cmd->parsed()) {
      const RunConfig config = resolve(compare_flags);
      const auto result = pnsim::runner::compare(config, compare_flags.out, compare_flags.jobs);
      print_run("proposed", result.proposed);
      print_run("fixed   ", result.fixed);
      std::cout << "outputs written to " << compare_flags.out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "pnsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
