#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sinr/backbone.hpp"

namespace sinr {

// ---------------------------------------------------------------------------
// Global leader election on the box graph

enum class ElectionStatus { Forward, WaitBack, Back, WaitConf, Confirm, Stop };

const char* to_string(ElectionStatus s);

struct BoxElection {
  StationId ld = 0;
  ElectionStatus st = ElectionStatus::Forward;
  std::set<GridCoord> pred;
  std::set<GridCoord> succ;
  StationId l0 = 0;
  // boxes of succ that sent (back, ld) and of pred that sent (confirm, ld)
  // since ld last changed
  std::set<GridCoord> backs;
  std::set<GridCoord> confirms;
};

using LeaderElectionState = std::map<GridCoord, BoxElection>;

/// Literal applies the base status rules only (all boxes stop within 3D+3
/// phases). Eager additionally re-evaluates wait-back after the second
/// multi-round (whose messages then also carry ld, so that a neighbor's fresh
/// smaller leader blocks the early release) and lets a box without successors
/// pass from confirm straight to stop, which yields the 3D+1 bound.
enum class ElectionMode { Eager, Literal };

struct ElectionSnapshot {
  std::uint32_t phase = 0;
  std::map<GridCoord, std::pair<StationId, ElectionStatus>> boxes;
};

struct ElectionOptions {
  ElectionMode mode = ElectionMode::Eager;
  /// Abort once this many phases pass without every box stopped; default
  /// is the mode's bound in terms of the box-graph eccentricity of the
  /// minimum-id box.
  std::optional<std::uint32_t> phase_cap;
  bool keep_trace = true;
};

struct ElectionResult {
  StationId leader = 0;
  GridCoord leader_box;
  LeaderElectionState state;
  std::uint32_t phases = 0;          // until every box is in stop
  std::uint32_t decided_phase = 0;   // until every box is in confirm or stop
  std::uint32_t ecc = 0;             // D: box distance from leader_box to the farthest box
  std::uint32_t phase_bound = 0;
  std::uint64_t multi_rounds = 0;
  std::uint64_t physical_rounds = 0;
  std::vector<ElectionSnapshot> trace;  // state after each phase, trace[0] initial
};

/// Box graph adjacency derived from the backbone's senders.
std::map<GridCoord, std::vector<GridCoord>> box_graph(const BackboneStructure& bb);

/// Hop distances from `root` in the box graph.
std::map<GridCoord, std::uint32_t> box_distances(const BackboneStructure& bb,
                                                 const GridCoord& root);

/// 3D+1 for Eager, 3D+3 for Literal.
std::uint32_t election_phase_bound(ElectionMode mode, std::uint32_t ecc);

/// Runs GlobalLeader phase by phase over physical multi-rounds. Throws
/// ProtocolError when a safety or absorption check fails or the phase cap is
/// exceeded.
ElectionResult global_leader_election(const MultiRoundRunner& mr,
                                      const ElectionOptions& opts = {});
ElectionResult global_leader_election(const BackboneStructure& bb, const Network& net,
                                      const ModelParams& params,
                                      const ElectionOptions& opts = {});

// ---------------------------------------------------------------------------
// Multi-broadcast

struct BoxBroadcast {
  std::vector<Rumor> pending;   // R, in arrival order
  std::set<Rumor> sent;         // S
  std::uint32_t k_local = 0;
  std::optional<GridCoord> tree_pred;
  std::set<GridCoord> tree_succ;
  std::uint32_t level = 0;
};

struct BroadcastState {
  GridCoord root;
  std::map<GridCoord, BoxBroadcast> boxes;
  std::uint64_t k_total = 0;
  std::uint32_t depth = 0;
};

struct TreeResult {
  BroadcastState state;
  std::uint64_t multi_rounds = 0;
};

/// Each non-root box keeps the pred with the smallest l0 and announces it in
/// one multi-round. Throws ProtocolError on a cycle or a non-spanning result.
TreeResult build_tree(const MultiRoundRunner& mr, const ElectionResult& election);

struct CountResult {
  std::uint64_t k_total = 0;
  std::uint64_t multi_rounds = 0;
};

/// Subtree sums towards the root; k_local must be filled in.
CountResult count_messages(BroadcastState& state, const MultiRoundRunner& mr);

enum class ChoiceRule { MinTag, Lifo };

struct MultiBroadcastOptions {
  ChoiceRule rule = ChoiceRule::MinTag;
  ElectionOptions election;
};

struct StageRounds {
  std::uint64_t multi_rounds = 0;
  std::uint64_t physical_rounds = 0;
};

struct MultiBroadcastResult {
  ElectionResult election;
  BroadcastState state;
  std::uint64_t k = 0;
  StageRounds tree;
  StageRounds local;        // convergecast plus leader rebroadcast
  StageRounds counting;
  StageRounds gathering;    // greedy convergecast on the tree
  StageRounds flooding;
  std::uint64_t total_physical_rounds = 0;  // everything after the backbone
  std::uint64_t round_budget = 0;
  /// Flooding multi-round (1-based) in which each box first and last got a
  /// rumor from the flood.
  std::map<GridCoord, std::pair<std::uint64_t, std::uint64_t>> flood_window;
  std::map<StationId, std::set<Rumor>> held;
};

/// Rumors of each station, tagged (origin, seq) with seq = 1, 2, ...
using PayloadPlacement = std::map<StationId, std::uint32_t>;

std::vector<Rumor> rumors_of(const PayloadPlacement& placement);

/// Election, tree, local dissemination, counting, greedy gathering at the
/// root and pipelined flooding. Throws ProtocolError if a stage bound fails
/// or some station misses a rumor.
MultiBroadcastResult multi_broadcast(const MultiRoundRunner& mr, const PayloadPlacement& placement,
                                     const MultiBroadcastOptions& opts = {});
MultiBroadcastResult multi_broadcast(const BackboneStructure& bb, const Network& net,
                                     const PayloadPlacement& placement, const ModelParams& params,
                                     const MultiBroadcastOptions& opts = {});

}  // namespace sinr
