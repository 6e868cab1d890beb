#include <cmath>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pnsim/runner.hpp"

namespace pnsim::runner {

namespace {

constexpr std::uint64_t kKiB = 1024;

template <typename T>
void read_key(const boost::property_tree::ptree& tree, const std::string& key, T& target) {
  if (auto value = tree.get_optional<std::string>(key)) {
    std::istringstream in(*value);
    T parsed{};
    if (!(in >> parsed) || !(in >> std::ws).eof()) {
      throw ConfigError("config key '" + key + "': cannot parse '" + *value + "'");
    }
    target = parsed;
  }
}

}  // namespace

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Bitcoin:
      return "bitcoin";
    case Preset::Litecoin:
      return "litecoin";
    case Preset::Dogecoin:
      return "dogecoin";
    case Preset::Custom:
      return "custom";
  }
  return "custom";
}

Preset parse_preset(const std::string& name) {
  if (name == "bitcoin") return Preset::Bitcoin;
  if (name == "litecoin") return Preset::Litecoin;
  if (name == "dogecoin") return Preset::Dogecoin;
  if (name == "custom") return Preset::Custom;
  throw ConfigError("unknown preset '" + name + "' (expected bitcoin, litecoin, dogecoin or custom)");
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "proposed" || name == "pns") return PolicyKind::Proposed;
  if (name == "fixed" || name == "fixed-random") return PolicyKind::Fixed;
  throw ConfigError("unknown policy '" + name + "' (expected proposed or fixed)");
}

pns::SelectionPolicy PolicyConfig::build() const { return build(kind); }

pns::SelectionPolicy PolicyConfig::build(PolicyKind as) const {
  if (as == PolicyKind::Fixed) {
    pns::FixedRandomPolicy fixed;
    fixed.outbound_slots = outbound;
    fixed.inbound_cap = inbound_cap.value_or(fixed.inbound_cap);
    return fixed;
  }
  pns::ProposedPolicy proposed;
  proposed.weight = p;
  proposed.random_slots = k;
  proposed.reselect_every = reselect_every;
  proposed.outbound_slots = outbound;
  proposed.inbound_cap = inbound_cap.value_or(proposed.inbound_cap);
  return proposed;
}

void apply_preset(RunConfig& config, Preset preset) {
  config.preset = preset;
  switch (preset) {
    case Preset::Bitcoin:
      config.nodes = 6000;
      config.interval_ms = 10 * 60 * 1000;
      config.block_size = 534 * kKiB;
      break;
    case Preset::Litecoin:
      config.nodes = 800;
      config.interval_ms = 150 * 1000;
      config.block_size = static_cast<std::uint64_t>(std::llround(6.11 * kKiB));
      break;
    case Preset::Dogecoin:
      config.nodes = 600;
      config.interval_ms = 60 * 1000;
      config.block_size = 8 * kKiB;
      break;
    case Preset::Custom:
      config.nodes = 0;
      config.interval_ms = 0;
      config.block_size = 0;
      break;
  }
}

RunConfig preset_config(Preset preset) {
  RunConfig config;
  apply_preset(config, preset);
  return config;
}

void validate(const RunConfig& config) {
  const bool custom = config.preset == Preset::Custom;
  auto need = [&](bool ok, const std::string& what, const char* flag) {
    if (ok) return;
    throw ConfigError(what + (custom ? std::string(" (the custom preset requires ") + flag + ")" : ""));
  };
  need(config.nodes > 0, "node count must be positive", "--nodes");
  need(config.interval_ms > 0, "block interval must be positive", "--interval-ms");
  need(config.block_size > 0, "block size must be positive", "--block-size");
  if (config.nodes <= config.policy.outbound) {
    throw ConfigError("node count must exceed the outbound slot count");
  }
  pns::validate(config.policy.build());
  if (config.summary.window == 0) throw ConfigError("rolling window must be at least 1");
  if (!(config.summary.bin_width_ms > 0)) throw ConfigError("histogram bin width must be positive");
  if (config.uniform.enabled) {
    if (config.uniform.latency_ms < 0) throw ConfigError("uniform latency must be >= 0");
    if (!(config.uniform.bandwidth_bps > 0)) throw ConfigError("uniform bandwidth must be positive");
  }
  if (config.mining.kind == sim::MiningProfile::Kind::Pareto && !(config.mining.pareto_shape > 0)) {
    throw ConfigError("pareto shape must be positive");
  }
}

net::UniformOverride parse_uniform_network(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ConfigError("--uniform-network expects <latency_ms,bandwidth_bps>, got '" + text + "'");
  }
  net::UniformOverride uniform;
  uniform.enabled = true;
  const std::string latency = text.substr(0, comma);
  const std::string bandwidth = text.substr(comma + 1);
  try {
    std::size_t used = 0;
    uniform.latency_ms = std::stoll(latency, &used);
    if (used != latency.size()) throw std::invalid_argument(latency);
    if (bandwidth == "inf" || bandwidth == "unlimited") {
      uniform.bandwidth_bps = net::kUnlimitedBandwidth;
    } else {
      uniform.bandwidth_bps = std::stod(bandwidth, &used);
      if (used != bandwidth.size()) throw std::invalid_argument(bandwidth);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("--uniform-network expects <latency_ms,bandwidth_bps>, got '" + text + "'");
  }
  if (uniform.latency_ms < 0 || !(uniform.bandwidth_bps > 0)) {
    throw ConfigError("uniform network needs latency >= 0 and bandwidth > 0");
  }
  return uniform;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  RunConfig config = std::move(base);

  if (auto preset = tree.get_optional<std::string>("run.preset")) apply_preset(config, parse_preset(*preset));
  read_key(tree, "run.nodes", config.nodes);
  read_key(tree, "run.interval_ms", config.interval_ms);
  read_key(tree, "run.block_size", config.block_size);
  read_key(tree, "run.blocks", config.blocks);
  read_key(tree, "run.seed", config.seed);

  if (auto dataset = tree.get_optional<std::string>("netmodel.region_dataset")) {
    std::filesystem::path dataset_path(*dataset);
    if (dataset_path.is_relative()) dataset_path = path.parent_path() / dataset_path;
    config.region_dataset = dataset_path;
  }
  const bool has_latency = tree.get_optional<std::string>("netmodel.uniform_latency_ms").has_value();
  const bool has_bandwidth = tree.get_optional<std::string>("netmodel.uniform_bandwidth_bps").has_value();
  if (has_latency || has_bandwidth) {
    config.uniform.enabled = true;
    read_key(tree, "netmodel.uniform_latency_ms", config.uniform.latency_ms);
    if (auto bw = tree.get_optional<std::string>("netmodel.uniform_bandwidth_bps"); bw && *bw == "inf") {
      config.uniform.bandwidth_bps = net::kUnlimitedBandwidth;
    } else {
      read_key(tree, "netmodel.uniform_bandwidth_bps", config.uniform.bandwidth_bps);
    }
  }

  if (auto mining = tree.get_optional<std::string>("chain.mining")) {
    if (*mining == "uniform") {
      config.mining.kind = sim::MiningProfile::Kind::Uniform;
    } else if (*mining == "pareto") {
      config.mining.kind = sim::MiningProfile::Kind::Pareto;
    } else {
      throw ConfigError("chain.mining must be 'uniform' or 'pareto'");
    }
  }
  read_key(tree, "chain.pareto_shape", config.mining.pareto_shape);

  if (auto policy = tree.get_optional<std::string>("pns.policy")) config.policy.kind = parse_policy(*policy);
  read_key(tree, "pns.p", config.policy.p);
  read_key(tree, "pns.k", config.policy.k);
  read_key(tree, "pns.reselect_every", config.policy.reselect_every);
  read_key(tree, "pns.outbound", config.policy.outbound);
  if (tree.get_optional<std::string>("pns.inbound_cap")) {
    std::uint32_t cap = 0;
    read_key(tree, "pns.inbound_cap", cap);
    config.policy.inbound_cap = cap;
  }

  read_key(tree, "metrics.warmup", config.summary.warmup_blocks);
  read_key(tree, "metrics.window", config.summary.window);
  read_key(tree, "metrics.bin_width_ms", config.summary.bin_width_ms);
  return config;
}

sim::SimulationSetup make_setup(const RunConfig& config) { return make_setup(config, config.policy.kind); }

sim::SimulationSetup make_setup(const RunConfig& config, PolicyKind as) {
  validate(config);
  sim::SimulationSetup setup;
  setup.node_count = config.nodes;
  setup.mean_interval_ms = config.interval_ms;
  setup.block_size = config.block_size;
  setup.blocks = config.blocks;
  setup.seed = config.seed;
  setup.policy = config.policy.build(as);
  setup.dataset = config.region_dataset ? net::RegionDataset::load(*config.region_dataset)
                                        : net::RegionDataset::builtin_default();
  setup.uniform = config.uniform;
  setup.mining = config.mining;
  return setup;
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json policy = {
      {"variant", config.policy.kind == PolicyKind::Proposed ? "proposed" : "fixed"},
      {"p", config.policy.p},
      {"k", config.policy.k},
      {"reselect_every", config.policy.reselect_every},
      {"outbound_slots", config.policy.outbound},
      {"inbound_cap", pns::inbound_cap(config.policy.build())},
  };
  nlohmann::json uniform = nullptr;
  if (config.uniform.enabled) {
    uniform = {{"latency_ms", config.uniform.latency_ms},
               {"bandwidth_bps", std::isinf(config.uniform.bandwidth_bps)
                                     ? nlohmann::json("inf")
                                     : nlohmann::json(config.uniform.bandwidth_bps)}};
  }
  return {
      {"preset", to_string(config.preset)},
      {"nodes", config.nodes},
      {"interval_ms", config.interval_ms},
      {"block_size", config.block_size},
      {"blocks", config.blocks},
      {"seed", config.seed},
      {"policy", policy},
      {"region_dataset", config.region_dataset ? config.region_dataset->string() : "builtin-default"},
      {"uniform_network", uniform},
      {"mining", config.mining.kind == sim::MiningProfile::Kind::Uniform ? "uniform" : "pareto"},
      {"pareto_shape", config.mining.pareto_shape},
      {"warmup_blocks", config.summary.warmup_blocks},
      {"window", config.summary.window},
      {"bin_width_ms", config.summary.bin_width_ms},
  };
}

}  // namespace pnsim::runner
