#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "sinr/apps.hpp"
#include "sinr/phy.hpp"

namespace sinr {

struct GeneratorConfig {
  std::string kind = "random";  // random | path | block | file
  std::size_t n = 50;
  double extent = 10.0;         // side of the square, in pivotal boxes
  std::uint32_t delta = 4;
  std::uint32_t id_range = 0;   // 0: smallest power of two >= n
  bool connected = true;
  std::size_t boxes = 8;        // path
  std::size_t rows = 2;         // block
  std::size_t cols = 2;
  std::size_t spacing = 1;
  std::uint32_t per_box = 2;    // path and block
  std::string file;             // network JSON
};

struct PayloadConfig {
  std::string mode = "random";  // random | all | list
  std::uint32_t k = 4;          // random: rumors spread over random stations
  std::uint32_t count = 1;      // all: rumors per station
  PayloadPlacement list;
};

struct ScenarioConfig {
  std::string label = "run";
  GeneratorConfig generator;
  ModelParams params;
  std::uint32_t c_len = 8;
  double c_d = 4.0;
  std::size_t certify_trials = 40;
  std::string selector_file;
  std::uint64_t network_seed = 1;
  std::uint64_t selector_seed = 1;
  std::uint64_t payload_seed = 1;
  std::set<std::string> stages = {"backbone", "election", "multibroadcast", "baseline"};
  ElectionMode election_mode = ElectionMode::Eager;
  ChoiceRule rule = ChoiceRule::MinTag;
  PayloadConfig payloads;
  std::string dot_dir;
  std::string trace_dir;
};

struct ScenarioPlan {
  std::vector<ScenarioConfig> runs;  // one per sweep entry, or the base config alone
  std::string metrics_path;
  unsigned threads = 0;              // 0: hardware concurrency
};

/// Parses a scenario file. Each entry of "sweep" is merged over the base
/// configuration as a JSON merge patch. Relative paths resolve against
/// base_dir; referenced files must exist.
ScenarioPlan load_scenario(const std::string& text, const std::string& base_dir = ".");

struct ScenarioMetrics {
  std::string label;
  std::size_t n = 0;
  std::uint32_t id_range = 0;
  std::uint32_t delta = 0;
  std::size_t boxes = 0;
  std::size_t backbone_size = 0;
  std::uint32_t box_ecc = 0;          // D from the minimum-id box
  std::size_t graph_diameter = 0;
  std::uint32_t dilution = 0;
  std::uint32_t dilution_prime = 0;
  std::uint64_t multi_round_len = 0;
  std::uint64_t backbone_rounds = 0;
  std::uint64_t election_phases = 0;
  std::uint64_t election_multi_rounds = 0;
  std::uint64_t election_rounds = 0;
  std::uint64_t k = 0;
  std::uint32_t tree_depth = 0;
  std::uint64_t gathering_multi_rounds = 0;
  std::uint64_t flooding_multi_rounds = 0;
  std::uint64_t multibroadcast_rounds = 0;
  std::uint64_t transmissions = 0;    // station transmissions in multi-rounds
  std::uint64_t baseline_election_rounds = 0;
  std::uint64_t baseline_multibroadcast_rounds = 0;
  bool ok = false;
};

struct ScenarioRun {
  ScenarioMetrics metrics;
  bool ok = false;
  std::string failed_stage;
  std::string error;
  std::string trace_path;
};

/// Generates the network and runs the configured stages. Stage failures
/// are recorded in the result, not thrown.
ScenarioRun run_scenario(const ScenarioConfig& cfg);

/// Runs every configuration on a worker pool; results keep plan order.
std::vector<ScenarioRun> run_plan(const ScenarioPlan& plan);

/// Column order of the metrics CSV.
const std::vector<std::string>& metrics_columns();
std::string metrics_csv(const std::vector<ScenarioRun>& runs);

Network generate_network(const GeneratorConfig& g, const ModelParams& params, std::uint64_t seed);

PayloadPlacement make_payloads(const PayloadConfig& p, const Network& net, std::uint64_t seed);

struct BaselineResult {
  std::uint64_t rounds = 0;        // message-passing rounds on the station graph
  std::uint64_t physical_rounds = 0;  // rounds * N
};

/// Min-id flooding where each station transmits alone in the slot of its id,
/// N slots per round, forwarding what it knew when the round began, until
/// every station knows the minimum.
BaselineResult round_robin_election(const Network& net, const ModelParams& params);

/// Same slot structure; each round every station forwards its smallest
/// not yet forwarded rumor, until every station holds all of them.
BaselineResult round_robin_multibroadcast(const Network& net, const ModelParams& params,
                                          const PayloadPlacement& placement);

}  // namespace sinr
