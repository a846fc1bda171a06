#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sinr/geometry.hpp"

namespace sinr {

using StationId = std::uint32_t;

/// Physical constants of a uniform-power network. The range r is always
/// derived from these, never configured.
struct ModelParams {
  double alpha = 3.0;
  double beta = 1.0;
  double noise = 1.0;
  double eps = 1.0;
  double power = 1.0;

  /// Throws std::invalid_argument unless alpha >= 2, beta >= 1, noise >= 1,
  /// eps > 0 and power > 0.
  void validate() const;
  double range() const { return range_of(*this); }
  double gamma() const { return pivotal_gamma(*this); }
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Station {
  StationId id = 0;
  Point pos;
};

struct Network {
  std::vector<Station> stations;
  std::uint32_t id_range = 0;  // N
  std::uint32_t delta = 1;     // per pivotal box density bound

  std::size_t size() const { return stations.size(); }
  /// Position of the station with the given id in `stations`, if present.
  std::optional<std::size_t> index_of(StationId id) const;
};

/// Throws std::invalid_argument if ids collide or leave [1, N], or some
/// pivotal box holds more than delta stations.
void validate(const Network& net, const ModelParams& params);

/// Stations per nonempty pivotal box, in ascending box order; entries are
/// indices into net.stations sorted by station id.
std::map<GridCoord, std::vector<std::size_t>> group_by_box(const Network& net,
                                                           const ModelParams& params);

struct ColocatedTransceiver : std::runtime_error {
  ColocatedTransceiver() : std::runtime_error("co-located transceiver") {}
};

double received_power(const Point& from, const Point& to, const ModelParams& params);

/// SINR(v, u, T): the power of v at u over noise plus the power of every other
/// member of T at u.
double sinr(const Station& v, const Station& u, std::span<const Station> transmitters,
            const ModelParams& params);

/// u hears v iff SINR(v,u,T) >= beta and v's power at u is at least
/// (1+eps) beta N.
bool hears(const Station& v, const Station& u, std::span<const Station> transmitters,
           const ModelParams& params);

template <class Payload>
struct Reception {
  StationId sender;
  Payload payload;
};

/// Result of one synchronous round, keyed by receiving station id. Stations
/// that transmitted or heard nothing have no entry.
template <class Payload>
struct RoundOutcome {
  std::map<StationId, Reception<Payload>> received;
};

/// Precomputed view of a network for fast round evaluation. Stations are
/// addressed by their index in net.stations.
class Channel {
 public:
  Channel(const Network& net, const ModelParams& params);

  const Network& network() const { return *net_; }
  const ModelParams& params() const { return params_; }
  std::size_t size() const { return net_->size(); }

  /// Communication-graph neighbors of station index v, ascending.
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adj_[v]; }

  /// (receiver, sender) index pairs of one round. `tx` lists distinct
  /// transmitter indices; transmitters never receive.
  std::vector<std::pair<std::size_t, std::size_t>> receptions(
      std::span<const std::size_t> tx) const;

  bool hears(std::size_t v, std::size_t u, std::span<const std::size_t> tx) const;

 private:
  double power_at(std::size_t from, std::size_t to) const;

  const Network* net_;
  ModelParams params_;
  double sensitivity_;
  std::vector<std::vector<std::size_t>> adj_;
  mutable std::vector<char> mark_;
};

template <class Payload>
RoundOutcome<Payload> simulate_round(const Channel& ch, const std::map<StationId, Payload>& tx) {
  const auto& net = ch.network();
  std::vector<std::size_t> idx;
  idx.reserve(tx.size());
  for (const auto& [id, _] : tx) {
    auto i = net.index_of(id);
    if (!i) throw std::invalid_argument("transmitter id not in network: " + std::to_string(id));
    idx.push_back(*i);
  }
  RoundOutcome<Payload> out;
  for (auto [u, v] : ch.receptions(idx)) {
    auto sender = net.stations[v].id;
    out.received.emplace(net.stations[u].id, Reception<Payload>{sender, tx.at(sender)});
  }
  return out;
}

template <class Payload>
RoundOutcome<Payload> simulate_round(const Network& net, const std::map<StationId, Payload>& tx,
                                     const ModelParams& params) {
  Channel ch(net, params);
  return simulate_round(ch, tx);
}

struct CommGraph {
  std::vector<std::vector<std::size_t>> adjacency;  // by station index
  std::size_t edges = 0;
  std::vector<std::size_t> degrees;
  std::size_t max_degree = 0;
  std::size_t diameter = 0;  // largest finite eccentricity
  bool connected = true;
  bool degree_bound_exceeded = false;
};

/// Edge (v,u) iff u hears v when v transmits alone. `degree_bound`, when
/// given, flags graphs whose maximum degree exceeds it.
CommGraph communication_graph(const Network& net, const ModelParams& params,
                              std::optional<std::size_t> degree_bound = std::nullopt);

/// Hop distances from `source` (SIZE_MAX marks unreachable).
std::vector<std::size_t> bfs_distances(const std::vector<std::vector<std::size_t>>& adj,
                                       std::size_t source);

}  // namespace sinr
