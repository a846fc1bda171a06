#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinr/phy.hpp"
#include "sinr/schedule.hpp"
#include "sinr/selector.hpp"

namespace sinr {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tag of a rumor: originating station and its sequence number there.
struct Rumor {
  StationId origin = 0;
  std::uint32_t seq = 0;
  friend auto operator<=>(const Rumor&, const Rumor&) = default;
};

/// A protocol message: at most one rumor plus a few control words.
struct Message {
  std::vector<std::int64_t> control;
  std::optional<Rumor> rumor;
  friend bool operator==(const Message&, const Message&) = default;
};

std::size_t control_bits(const Message& m);

/// Throws ProtocolError when m carries more than 32 * (ceil(log2 N) + 1)
/// control bits.
void check_message_size(const Message& m, std::uint32_t id_range);

enum class StationRole { Active, Passive, Leader };

/// Local knowledge of one station after the construction phases.
struct StationState {
  StationRole st = StationRole::Active;
  std::vector<StationId> roster;   // set[1..count]
  std::set<StationId> neighbors;   // Gamma(v)
  std::uint32_t dir_flags = 0;     // D(v), bit k <=> dir_set()[k]
  std::map<int, StationId> twin;   // DIR index -> smallest neighbor id there
};

struct BoxRecord {
  GridCoord coord;
  StationId leader = 0;
  std::vector<StationId> roster;
  std::map<GridCoord, StationId> senders;    // s^C by offset
  std::map<GridCoord, StationId> receivers;  // r^C by offset (relays traffic from C+offset)
};

struct BackboneRounds {
  std::uint64_t leader_election = 0;
  std::uint64_t local_learning = 0;
  std::uint64_t neighborhood_learning = 0;
  std::uint64_t total() const { return leader_election + local_learning + neighborhood_learning; }
};

struct BackboneStructure {
  std::map<GridCoord, BoxRecord> boxes;
  std::set<StationId> backbone;             // H
  std::map<StationId, StationId> assoc;     // station -> its leader
  std::map<StationId, StationState> states;
  std::uint32_t dilution_prime = 1;         // delta'
  std::uint64_t multi_round_len = 0;        // physical rounds per multi-round
  BackboneRounds rounds;
  std::vector<std::size_t> contest_sizes;   // |M(0)|, |M(1)|, ...
  std::uint32_t selector_dilution = 0;
  std::uint32_t selector_length = 0;        // physical rounds of one selector pass
  std::uint64_t round_budget = 0;

  /// Nonempty boxes adjacent to c in the box graph.
  std::vector<GridCoord> box_neighbors(const GridCoord& c) const;
};

// ---------------------------------------------------------------------------
// Phase 1: local leader election

struct LocalElection {
  std::map<GridCoord, StationId> leaders;
  std::vector<std::size_t> contest_sizes;  // |M(i)| after i selector passes
  std::uint64_t rounds = 0;

  /// Each logged step is 0 or at most half of its predecessor.
  bool halving_holds() const;
};

/// ceil(log2 N) passes of the selector; a station hearing a box-mate turns
/// passive. Throws ProtocolError if a box ends with two or more leaders.
LocalElection local_leader_election(const Network& net, const GeometricSchedule& sel,
                                    const ModelParams& params);

// ---------------------------------------------------------------------------
// Phase 2: local learning

struct LocalLearning {
  std::map<GridCoord, BoxRecord> boxes;      // leader and roster filled
  std::map<StationId, StationState> states;  // per-station copies
  std::uint64_t rounds = 0;
};

/// Each selector round is followed by a confirmation round in which leaders
/// that heard a box-mate u announce (u, count). Leaders seed their roster with
/// themselves. Throws ProtocolError listing unconfirmed ids on failure.
LocalLearning local_learning(const Network& net, const GeometricSchedule& sel,
                             const std::map<GridCoord, StationId>& leaders,
                             const ModelParams& params);

// ---------------------------------------------------------------------------
// Phase 3: neighborhood learning

struct NeighborhoodLearning {
  std::map<GridCoord, BoxRecord> boxes;
  std::map<StationId, StationState> states;
  std::uint64_t rounds = 0;
};

/// Two roster-indexed sweeps diluted by delta', then one handshake block per
/// DIR offset in which each sender addresses its receiver.
NeighborhoodLearning neighborhood_learning(const Network& net, const LocalLearning& learned,
                                           const ModelParams& params,
                                           std::uint32_t dilution_prime);

// ---------------------------------------------------------------------------
// Multi-round and convergecast

struct Delivery {
  GridCoord from;
  Message msg;
};

struct MultiRoundResult {
  /// Messages delivered into each station's box, by station id.
  std::map<StationId, std::vector<Delivery>> delivered;
  /// Transmitting station ids of every physical round.
  std::vector<std::vector<StationId>> transmitters;
  std::uint64_t rounds = 0;
};

class MultiRoundRunner;

/// Simulates one message-passing round on the box graph. `outbox[C]` is
/// sent by C's leader to its own box, then by each sender s^C_d, and relayed
/// by the receiver of C+d to the whole of C+d. When `leader_outbox` is given,
/// the leader slot broadcasts it instead. Throws ProtocolError if some
/// physical round has two transmitters in a box or violates delta'-dilution.
MultiRoundResult multi_round(const BackboneStructure& bb, const Network& net,
                             const std::map<GridCoord, Message>& outbox, const ModelParams& params,
                             const std::map<GridCoord, Message>* leader_outbox = nullptr);

/// Reusable multi-round executor; keeps the channel of one network.
class MultiRoundRunner {
 public:
  MultiRoundRunner(const BackboneStructure& bb, const Network& net, const ModelParams& params);
  ~MultiRoundRunner();
  MultiRoundRunner(const MultiRoundRunner&) = delete;
  MultiRoundRunner& operator=(const MultiRoundRunner&) = delete;

  MultiRoundResult run(const std::map<GridCoord, Message>& outbox,
                       const std::map<GridCoord, Message>* leader_outbox = nullptr) const;

  const BackboneStructure& backbone() const { return *bb_; }
  const Network& network() const { return *net_; }
  const ModelParams& params() const { return params_; }
  /// Box of station index i.
  const GridCoord& box_of_index(std::size_t i) const;

  /// Multi-rounds executed and single-station transmissions made so far.
  std::uint64_t runs() const { return runs_; }
  std::uint64_t transmissions() const { return transmissions_; }

 private:
  struct Impl;
  const BackboneStructure* bb_;
  const Network* net_;
  ModelParams params_;
  std::unique_ptr<Impl> impl_;
  mutable std::uint64_t runs_ = 0;
  mutable std::uint64_t transmissions_ = 0;
};

struct ConvergecastResult {
  std::map<StationId, std::vector<Message>> collected;  // by leader id, roster order
  std::uint64_t rounds = 0;
};

/// Roster-indexed round robin diluted by delta': every station's payload
/// reaches its leader in Delta * delta'^2 rounds.
ConvergecastResult convergecast(const BackboneStructure& bb, const Network& net,
                                const std::map<StationId, Message>& payloads,
                                const ModelParams& params);

// ---------------------------------------------------------------------------

struct BackboneOptions {
  std::optional<std::uint32_t> dilution_prime;  // default: calibrated constant
  std::size_t certify_trials = 40;
  bool check_properties = true;
};

struct BackboneCheck {
  bool connected = false;
  bool dominating = false;
  bool box_bound = false;     // |H ∩ box| <= 1 + 2|DIR|
  bool assoc_ok = false;      // every station maps to a neighbor leader of its box
  std::size_t max_per_box = 0;
  std::string diagnostic;
  bool ok() const { return connected && dominating && box_bound && assoc_ok; }
};

BackboneCheck check_backbone(const BackboneStructure& bb, const Network& net,
                             const ModelParams& params);

/// Physical-round budget (3 C_len delta^2 + 22 delta'^2) * Delta * ceil(log2 N)^3,
/// C_len being the selector's classical length over Delta * ceil(log2 N).
std::uint64_t backbone_round_budget(std::uint32_t delta_density, std::uint32_t id_range,
                                    std::uint32_t classical_length, std::uint32_t dilution,
                                    std::uint32_t dilution_prime);

/// Smallest box-count side covering the network's nonempty boxes (at least 8).
std::uint32_t network_extent(const Network& net, const ModelParams& params);

/// Runs the three construction phases with the given selector.
BackboneStructure build_backbone(const Network& net, const GeometricSchedule& sel,
                                 const ModelParams& params, const BackboneOptions& opts = {});

/// Builds and certifies a selector from spec and seed, then the backbone.
BackboneStructure build_backbone(const Network& net, const ModelParams& params,
                                 const SelectorSpec& spec, std::uint64_t seed,
                                 const BackboneOptions& opts = {});

}  // namespace sinr
