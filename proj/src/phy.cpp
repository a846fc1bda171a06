#include "sinr/phy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace sinr {

void ModelParams::validate() const {
  if (!(alpha >= 2.0)) throw std::invalid_argument("alpha must be >= 2");
  if (!(beta >= 1.0)) throw std::invalid_argument("beta must be >= 1");
  if (!(noise >= 1.0)) throw std::invalid_argument("noise must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!(power > 0.0)) throw std::invalid_argument("power must be > 0");
}

std::optional<std::size_t> Network::index_of(StationId id) const {
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (stations[i].id == id) return i;
  }
  return std::nullopt;
}

std::map<GridCoord, std::vector<std::size_t>> group_by_box(const Network& net,
                                                           const ModelParams& params) {
  auto grid = pivotal_grid(params);
  std::map<GridCoord, std::vector<std::size_t>> boxes;
  for (std::size_t i = 0; i < net.stations.size(); ++i) {
    boxes[box_of(net.stations[i].pos, grid)].push_back(i);
  }
  for (auto& [_, members] : boxes) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return net.stations[a].id < net.stations[b].id;
    });
  }
  return boxes;
}

void validate(const Network& net, const ModelParams& params) {
  params.validate();
  if (net.delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (net.stations.size() > net.id_range) {
    throw std::invalid_argument("more stations than the id range admits");
  }
  std::set<StationId> seen;
  for (const auto& s : net.stations) {
    if (s.id < 1 || s.id > net.id_range) {
      throw std::invalid_argument("station id outside [1, N]: " + std::to_string(s.id));
    }
    if (!std::isfinite(s.pos.x) || !std::isfinite(s.pos.y)) {
      throw std::invalid_argument("non-finite station coordinate");
    }
    if (!seen.insert(s.id).second) {
      throw std::invalid_argument("duplicate station id: " + std::to_string(s.id));
    }
  }
  for (const auto& [coord, members] : group_by_box(net, params)) {
    if (members.size() > net.delta) {
      throw std::invalid_argument("box (" + std::to_string(coord.i) + "," +
                                  std::to_string(coord.j) + ") holds " +
                                  std::to_string(members.size()) + " > delta stations");
    }
  }
}

double received_power(const Point& from, const Point& to, const ModelParams& params) {
  double d = dist(from, to);
  if (d == 0.0) throw ColocatedTransceiver();
  return params.power * std::pow(d, -params.alpha);
}

double sinr(const Station& v, const Station& u, std::span<const Station> transmitters,
            const ModelParams& params) {
  double signal = received_power(v.pos, u.pos, params);
  double interference = 0.0;
  for (const auto& w : transmitters) {
    if (w.id == v.id) continue;
    interference += received_power(w.pos, u.pos, params);
  }
  return signal / (params.noise + interference);
}

bool hears(const Station& v, const Station& u, std::span<const Station> transmitters,
           const ModelParams& params) {
  double signal = received_power(v.pos, u.pos, params);
  if (!(signal >= (1.0 + params.eps) * params.beta * params.noise)) return false;
  return sinr(v, u, transmitters, params) >= params.beta;
}

Channel::Channel(const Network& net, const ModelParams& params)
    : net_(&net),
      params_(params),
      sensitivity_((1.0 + params.eps) * params.beta * params.noise),
      adj_(net.size()),
      mark_(net.size(), 0) {
  // Stations within range lie in the same or a DIR-adjacent pivotal box.
  auto boxes = group_by_box(net, params);
  auto grid = pivotal_grid(params);
  auto dirs = dir_set();
  for (std::size_t v = 0; v < net.size(); ++v) {
    auto home = box_of(net.stations[v].pos, grid);
    auto scan = [&](const GridCoord& c) {
      auto it = boxes.find(c);
      if (it == boxes.end()) return;
      for (auto u : it->second) {
        if (u == v) continue;
        if (power_at(v, u) >= sensitivity_ && power_at(v, u) / params_.noise >= params_.beta) {
          adj_[v].push_back(u);
        }
      }
    };
    scan(home);
    for (const auto& d : dirs) scan(home + d);
    std::sort(adj_[v].begin(), adj_[v].end());
  }
}

double Channel::power_at(std::size_t from, std::size_t to) const {
  return received_power(net_->stations[from].pos, net_->stations[to].pos, params_);
}

bool Channel::hears(std::size_t v, std::size_t u, std::span<const std::size_t> tx) const {
  double signal = power_at(v, u);
  if (!(signal >= sensitivity_)) return false;
  double interference = 0.0;
  for (auto w : tx) {
    if (w == v) continue;
    interference += power_at(w, u);
  }
  return signal / (params_.noise + interference) >= params_.beta;
}

std::vector<std::pair<std::size_t, std::size_t>> Channel::receptions(
    std::span<const std::size_t> tx) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (tx.empty()) return out;
  for (auto v : tx) mark_[v] = 1;
  // Only stations within range of some transmitter can pass the
  // sensitivity condition.
  std::vector<std::size_t> candidates;
  for (auto v : tx) {
    for (auto u : adj_[v]) {
      if (mark_[u] == 0) {
        mark_[u] = 2;
        candidates.push_back(u);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (auto u : candidates) {
    // With beta >= 1 only the strongest transmitter can be heard.
    std::size_t best = tx[0];
    double best_power = -1.0;
    for (auto v : tx) {
      double p = power_at(v, u);
      if (p > best_power) {
        best_power = p;
        best = v;
      }
    }
    if (hears(best, u, tx)) out.emplace_back(u, best);
  }
  for (auto v : tx) mark_[v] = 0;
  for (auto u : candidates) mark_[u] = 0;
  return out;
}

std::vector<std::size_t> bfs_distances(const std::vector<std::vector<std::size_t>>& adj,
                                       std::size_t source) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> d(adj.size(), kInf);
  std::deque<std::size_t> queue{source};
  d[source] = 0;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto u : adj[v]) {
      if (d[u] == kInf) {
        d[u] = d[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return d;
}

CommGraph communication_graph(const Network& net, const ModelParams& params,
                              std::optional<std::size_t> degree_bound) {
  Channel ch(net, params);
  CommGraph g;
  g.adjacency.resize(net.size());
  g.degrees.resize(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    g.adjacency[v] = ch.neighbors(v);
    g.degrees[v] = g.adjacency[v].size();
    g.edges += g.degrees[v];
    g.max_degree = std::max(g.max_degree, g.degrees[v]);
  }
  g.edges /= 2;
  for (std::size_t v = 0; v < net.size(); ++v) {
    for (auto d : bfs_distances(g.adjacency, v)) {
      if (d == std::numeric_limits<std::size_t>::max()) {
        g.connected = false;
      } else {
        g.diameter = std::max(g.diameter, d);
      }
    }
  }
  g.degree_bound_exceeded = degree_bound && g.max_degree > *degree_bound;
  return g;
}

}  // namespace sinr
