#include "sinr/backbone.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <sstream>

namespace sinr {

std::size_t control_bits(const Message& m) {
  std::size_t bits = 0;
  for (auto w : m.control) {
    auto mag = static_cast<std::uint64_t>(w < 0 ? -w : w);
    bits += std::max<std::size_t>(1, std::bit_width(mag)) + 1;
  }
  return bits;
}

void check_message_size(const Message& m, std::uint32_t id_range) {
  std::size_t budget = 32 * (std::size_t{log2_ceil(id_range)} + 1);
  if (control_bits(m) > budget) {
    throw ProtocolError("message carries " + std::to_string(control_bits(m)) +
                        " control bits, budget " + std::to_string(budget));
  }
}

std::vector<GridCoord> BackboneStructure::box_neighbors(const GridCoord& c) const {
  std::vector<GridCoord> out;
  auto it = boxes.find(c);
  if (it == boxes.end()) return out;
  for (const auto& [off, _] : it->second.senders) out.push_back(c + off);
  std::sort(out.begin(), out.end());
  return out;
}

bool LocalElection::halving_holds() const {
  if (contest_sizes.empty()) return true;
  for (std::size_t i = 1; i < contest_sizes.size(); ++i) {
    if (contest_sizes[i] != 0 && 2 * contest_sizes[i] > contest_sizes[i - 1]) return false;
  }
  return contest_sizes.back() == 0;
}

namespace {

struct Layout {
  GridSpec grid;
  std::vector<GridCoord> box;  // by station index
  std::map<GridCoord, std::vector<std::size_t>> members;

  Layout(const Network& net, const ModelParams& params) : grid(pivotal_grid(params)) {
    box.reserve(net.size());
    for (const auto& s : net.stations) box.push_back(box_of(s.pos, grid));
    members = group_by_box(net, params);
  }
};

std::size_t subslot(const GridCoord& c, std::uint32_t dp) {
  return static_cast<std::size_t>(floor_mod(c.i, dp) * dp + floor_mod(c.j, dp));
}

Message msg_of(std::initializer_list<std::int64_t> words) {
  Message m;
  m.control.assign(words);
  return m;
}

std::string ids_to_string(const std::vector<StationId>& ids) {
  std::ostringstream os;
  for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? "," : "") << ids[k];
  return os.str();
}

std::string coord_to_string(const GridCoord& c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

std::size_t contested(const Layout& lay, const std::vector<char>& active) {
  std::size_t total = 0;
  for (const auto& [c, idx] : lay.members) {
    std::size_t k = 0;
    for (auto i : idx) k += active[i] ? 1 : 0;
    if (k >= 2) total += k;
  }
  return total;
}

// Runs one block of dp^2 physical rounds. `sender_of_box` names at most one
// transmitter per box; subslot (a,b) carries the boxes of that residue.
template <class OnReceive>
void diluted_block(const Channel& ch,
                   const std::map<GridCoord, std::size_t>& sender_of_box, std::uint32_t dp,
                   OnReceive&& on_receive,
                   std::vector<std::vector<StationId>>* trace = nullptr) {
  std::vector<std::vector<std::size_t>> slots(std::size_t{dp} * dp);
  for (const auto& [c, v] : sender_of_box) slots[subslot(c, dp)].push_back(v);
  for (auto& tx : slots) {
    std::sort(tx.begin(), tx.end());
    if (trace) {
      std::vector<StationId> ids;
      for (auto v : tx) ids.push_back(ch.network().stations[v].id);
      trace->push_back(std::move(ids));
    }
    for (auto [u, v] : ch.receptions(tx)) on_receive(u, v);
  }
}

void check_round(const std::vector<StationId>& tx, const Network& net, const Layout& lay,
                 std::uint32_t dp, std::size_t round) {
  std::vector<GridCoord> boxes;
  for (auto id : tx) boxes.push_back(lay.box[*net.index_of(id)]);
  auto sorted = boxes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ProtocolError("multi-round physical round " + std::to_string(round) +
                        " has two transmitters in one box");
  }
  if (!is_diluted(boxes, dp)) {
    throw ProtocolError("multi-round physical round " + std::to_string(round) +
                        " is not diluted");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

LocalElection local_leader_election(const Network& net, const GeometricSchedule& sel,
                                    const ModelParams& params) {
  LocalElection out;
  if (net.size() == 0) return out;
  Channel ch(net, params);
  Layout lay(net, params);
  auto buckets = round_buckets(sel, net, lay.grid);
  std::vector<char> active(net.size(), 1);
  const auto reps = log2_ceil(net.id_range);

  out.contest_sizes.push_back(contested(lay, active));
  std::vector<std::size_t> tx;
  for (std::uint32_t rep = 0; rep < reps; ++rep) {
    for (std::uint32_t t = 0; t < sel.length(); ++t) {
      tx.clear();
      for (auto i : buckets[t]) {
        if (active[i]) tx.push_back(i);
      }
      if (tx.empty()) continue;
      for (auto [u, v] : ch.receptions(tx)) {
        if (lay.box[u] == lay.box[v]) active[u] = 0;
      }
    }
    out.rounds += sel.length();
    out.contest_sizes.push_back(contested(lay, active));
  }

  for (const auto& [c, idx] : lay.members) {
    std::vector<StationId> left;
    for (auto i : idx) {
      if (active[i]) left.push_back(net.stations[i].id);
    }
    if (left.size() != 1) {
      throw ProtocolError("box " + coord_to_string(c) + " ends local leader election with " +
                          std::to_string(left.size()) + " active stations [" +
                          ids_to_string(left) + "]");
    }
    out.leaders[c] = left.front();
  }
  return out;
}

// ---------------------------------------------------------------------------

LocalLearning local_learning(const Network& net, const GeometricSchedule& sel,
                             const std::map<GridCoord, StationId>& leaders,
                             const ModelParams& params) {
  LocalLearning out;
  if (net.size() == 0) return out;
  Channel ch(net, params);
  Layout lay(net, params);
  auto buckets = round_buckets(sel, net, lay.grid);

  std::vector<StationRole> st(net.size(), StationRole::Active);
  std::vector<std::vector<StationId>> roster(net.size());
  for (const auto& [c, id] : leaders) {
    auto i = net.index_of(id);
    if (!i || lay.box[*i] != c) {
      throw std::invalid_argument("leader " + std::to_string(id) + " is not in box " +
                                  coord_to_string(c));
    }
    st[*i] = StationRole::Leader;
    roster[*i] = {id};
  }

  const auto reps = log2_ceil(net.id_range);
  std::vector<std::size_t> tx;
  std::map<std::size_t, std::pair<StationId, std::size_t>> confirm;  // leader -> (u, index)
  for (std::uint32_t rep = 0; rep < reps; ++rep) {
    for (std::uint32_t t = 0; t < sel.length(); ++t) {
      // round t: scheduled active stations announce themselves
      tx.clear();
      for (auto i : buckets[t]) {
        if (st[i] == StationRole::Active) tx.push_back(i);
      }
      if (tx.empty()) continue;
      confirm.clear();
      for (auto [u, v] : ch.receptions(tx)) {
        if (st[u] != StationRole::Leader || lay.box[u] != lay.box[v]) continue;
        auto id = net.stations[v].id;
        auto& r = roster[u];
        auto pos = std::find(r.begin(), r.end(), id);
        if (pos == r.end()) {
          r.push_back(id);
          pos = r.end() - 1;
        }
        confirm[u] = {id, std::size_t(pos - r.begin()) + 1};
      }
      // round t': leaders confirm (u, count)
      std::vector<std::size_t> ctx;
      for (const auto& [l, _] : confirm) ctx.push_back(l);
      for (const auto& [l, c] : confirm) {
        check_message_size(msg_of({c.first, std::int64_t(c.second)}), net.id_range);
      }
      for (auto [w, l] : ch.receptions(ctx)) {
        if (lay.box[w] != lay.box[l] || st[l] != StationRole::Leader) continue;
        auto [u, count] = confirm.at(l);
        auto& r = roster[w];
        if (r.size() < count) r.resize(count, 0);
        r[0] = net.stations[l].id;
        r[count - 1] = u;
        if (net.stations[w].id == u) st[w] = StationRole::Passive;
      }
    }
  }
  out.rounds = 2ull * reps * sel.length();

  for (const auto& [c, idx] : lay.members) {
    auto lit = leaders.find(c);
    if (lit == leaders.end()) {
      throw std::invalid_argument("box " + coord_to_string(c) + " has no leader");
    }
    auto l = *net.index_of(lit->second);
    std::vector<StationId> missing;
    for (auto i : idx) {
      auto id = net.stations[i].id;
      if (std::find(roster[l].begin(), roster[l].end(), id) == roster[l].end()) {
        missing.push_back(id);
      }
    }
    if (!missing.empty()) {
      throw ProtocolError("box " + coord_to_string(c) + " roster incomplete, unconfirmed [" +
                          ids_to_string(missing) + "]");
    }
    for (auto i : idx) {
      if (roster[i] != roster[l]) {
        throw ProtocolError("station " + std::to_string(net.stations[i].id) +
                            " holds an inconsistent roster copy in box " + coord_to_string(c));
      }
      if (st[i] == StationRole::Active) {
        throw ProtocolError("station " + std::to_string(net.stations[i].id) +
                            " was never confirmed");
      }
      StationState s;
      s.st = st[i];
      s.roster = roster[i];
      out.states[net.stations[i].id] = std::move(s);
    }
    BoxRecord rec;
    rec.coord = c;
    rec.leader = lit->second;
    rec.roster = roster[l];
    out.boxes[c] = std::move(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------

NeighborhoodLearning neighborhood_learning(const Network& net, const LocalLearning& learned,
                                           const ModelParams& params,
                                           std::uint32_t dilution_prime) {
  if (dilution_prime < 1) throw std::invalid_argument("dilution_prime must be >= 1");
  NeighborhoodLearning out;
  if (net.size() == 0) return out;
  Channel ch(net, params);
  Layout lay(net, params);
  const auto& dirs = dir_set();
  const std::uint32_t dp = dilution_prime;
  const std::uint32_t delta = net.delta;

  std::vector<StationState> state(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto it = learned.states.find(net.stations[i].id);
    if (it == learned.states.end()) {
      throw std::invalid_argument("station " + std::to_string(net.stations[i].id) +
                                  " has no roster");
    }
    state[i] = it->second;
  }

  auto index_senders = [&](std::uint32_t k) {
    std::map<GridCoord, std::size_t> senders;
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto& r = state[i].roster;
      if (k < r.size() && r[k] == net.stations[i].id) senders[lay.box[i]] = i;
    }
    return senders;
  };

  // sweep 1: every station announces (id, box)
  std::vector<std::map<StationId, GridCoord>> heard_box(net.size());
  for (std::uint32_t k = 0; k < delta; ++k) {
    auto senders = index_senders(k);
    for (const auto& [c, v] : senders) {
      check_message_size(msg_of({net.stations[v].id, c.i, c.j}), net.id_range);
    }
    diluted_block(ch, senders, dp, [&](std::size_t u, std::size_t v) {
      state[u].neighbors.insert(net.stations[v].id);
      heard_box[u][net.stations[v].id] = lay.box[v];
    });
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const auto& [id, c] : heard_box[i]) {
      int k = dir_index(c - lay.box[i]);
      if (k < 0) continue;
      state[i].dir_flags |= 1u << k;
      auto [it, fresh] = state[i].twin.emplace(k, id);
      if (!fresh) it->second = std::min(it->second, id);
    }
  }

  // sweep 2: every station announces D(v) and its twins; box-mates record them
  std::vector<std::map<StationId, std::pair<std::uint32_t, std::map<int, StationId>>>> mates(
      net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    mates[i][net.stations[i].id] = {state[i].dir_flags, state[i].twin};
  }
  for (std::uint32_t k = 0; k < delta; ++k) {
    auto senders = index_senders(k);
    for (const auto& [c, v] : senders) {
      Message m = msg_of({std::int64_t(state[v].dir_flags)});
      for (const auto& [d, id] : state[v].twin) m.control.push_back(id);
      check_message_size(m, net.id_range);
    }
    diluted_block(ch, senders, dp, [&](std::size_t u, std::size_t v) {
      if (lay.box[u] != lay.box[v]) return;
      mates[u][net.stations[v].id] = {state[v].dir_flags, state[v].twin};
    });
  }

  // every station derives its box's senders and predicted receivers
  std::vector<std::map<int, std::pair<StationId, StationId>>> plan(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (auto id : state[i].roster) {
      if (!mates[i].count(id)) {
        throw ProtocolError("station " + std::to_string(net.stations[i].id) +
                            " missed the second sweep message of " + std::to_string(id));
      }
    }
    for (int k = 0; k < int(dirs.size()); ++k) {
      for (const auto& [id, info] : mates[i]) {  // ascending id: first hit is min(nb)
        if (info.first & (1u << k)) {
          plan[i][k] = {id, info.second.at(k)};
          break;
        }
      }
    }
  }

  for (const auto& [c, idx] : lay.members) {
    BoxRecord rec = learned.boxes.at(c);
    for (auto i : idx) {
      if (plan[i] != plan[idx.front()]) {
        throw ProtocolError("box " + coord_to_string(c) + " disagrees on its senders");
      }
    }
    for (const auto& [k, sr] : plan[idx.front()]) rec.senders[dirs[k]] = sr.first;
    out.boxes[c] = std::move(rec);
  }

  // handshake: one diluted block per offset, s^C addresses r^{C+d}
  for (int k = 0; k < int(dirs.size()); ++k) {
    std::map<GridCoord, std::size_t> senders;
    std::map<std::size_t, StationId> target;
    for (const auto& [c, idx] : lay.members) {
      auto it = plan[idx.front()].find(k);
      if (it == plan[idx.front()].end()) continue;
      auto s = *net.index_of(it->second.first);
      senders[c] = s;
      target[s] = it->second.second;
      check_message_size(msg_of({it->second.second, k}), net.id_range);
    }
    std::set<std::size_t> confirmed;
    diluted_block(ch, senders, dp, [&](std::size_t u, std::size_t v) {
      if (net.stations[u].id != target.at(v)) return;
      out.boxes.at(lay.box[u]).receivers[-dirs[k]] = net.stations[u].id;
      confirmed.insert(v);
    });
    for (const auto& [c, s] : senders) {
      if (!confirmed.count(s)) {
        throw ProtocolError("sender " + std::to_string(net.stations[s].id) + " of box " +
                            coord_to_string(c) + " reached no receiver in direction " +
                            coord_to_string(dirs[k]));
      }
    }
  }

  out.rounds = (2ull * delta + dirs.size()) * dp * dp;
  for (std::size_t i = 0; i < net.size(); ++i) out.states[net.stations[i].id] = state[i];
  return out;
}

// ---------------------------------------------------------------------------

struct MultiRoundRunner::Impl {
  Channel ch;
  Layout lay;
  Impl(const Network& net, const ModelParams& params) : ch(net, params), lay(net, params) {}
};

MultiRoundRunner::MultiRoundRunner(const BackboneStructure& bb, const Network& net,
                                   const ModelParams& params)
    : bb_(&bb), net_(&net), params_(params), impl_(std::make_unique<Impl>(net, params)) {}

MultiRoundRunner::~MultiRoundRunner() = default;

const GridCoord& MultiRoundRunner::box_of_index(std::size_t i) const { return impl_->lay.box[i]; }

MultiRoundResult multi_round(const BackboneStructure& bb, const Network& net,
                             const std::map<GridCoord, Message>& outbox, const ModelParams& params,
                             const std::map<GridCoord, Message>* leader_outbox) {
  return MultiRoundRunner(bb, net, params).run(outbox, leader_outbox);
}

MultiRoundResult MultiRoundRunner::run(const std::map<GridCoord, Message>& outbox,
                                       const std::map<GridCoord, Message>* leader_outbox) const {
  const auto& bb = *bb_;
  const auto& net = *net_;
  const auto& ch = impl_->ch;
  const auto& lay = impl_->lay;
  MultiRoundResult out;
  const std::uint32_t dp = bb.dilution_prime;
  const auto& dirs = dir_set();
  out.rounds = (1 + 2 * dirs.size()) * std::uint64_t{dp} * dp;
  if (net.size() == 0) {
    ++runs_;
    return out;
  }
  const auto& own = leader_outbox ? *leader_outbox : outbox;
  for (const auto& [c, m] : outbox) check_message_size(m, net.id_range);
  for (const auto& [c, m] : own) check_message_size(m, net.id_range);

  // leader slot
  std::map<GridCoord, std::size_t> tx;
  for (const auto& [c, m] : own) {
    auto it = bb.boxes.find(c);
    if (it == bb.boxes.end()) continue;
    auto l = *net.index_of(it->second.leader);
    tx[c] = l;
    out.delivered[it->second.leader].push_back({c, m});
  }
  diluted_block(
      ch, tx, dp,
      [&](std::size_t u, std::size_t v) {
        if (lay.box[u] != lay.box[v]) return;
        out.delivered[net.stations[u].id].push_back({lay.box[v], own.at(lay.box[v])});
      },
      &out.transmitters);

  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto d = dirs[k];
    // round 1: senders towards d
    std::map<GridCoord, std::size_t> senders;
    std::map<std::size_t, GridCoord> origin;
    for (const auto& [c, m] : outbox) {
      auto it = bb.boxes.find(c);
      if (it == bb.boxes.end()) continue;
      auto s = it->second.senders.find(d);
      if (s == it->second.senders.end()) continue;
      auto i = *net.index_of(s->second);
      senders[c] = i;
      origin[i] = c;
    }
    std::map<GridCoord, std::pair<std::size_t, GridCoord>> relay;  // C' -> (receiver, origin)
    diluted_block(
        ch, senders, dp,
        [&](std::size_t u, std::size_t v) {
          auto c2 = lay.box[u];
          if (c2 != origin.at(v) + d) return;
          const auto& rec = bb.boxes.at(c2);
          auto r = rec.receivers.find(-d);
          if (r == rec.receivers.end() || r->second != net.stations[u].id) return;
          relay[c2] = {u, origin.at(v)};
        },
        &out.transmitters);
    for (const auto& [c, s] : senders) {
      if (!relay.count(c + d)) {
        throw ProtocolError("receiver of box " + coord_to_string(c + d) + " missed the message of " +
                            coord_to_string(c));
      }
    }
    // round 2: receivers relay into their boxes
    std::map<GridCoord, std::size_t> relays;
    for (const auto& [c2, ro] : relay) {
      relays[c2] = ro.first;
      out.delivered[net.stations[ro.first].id].push_back({ro.second, outbox.at(ro.second)});
    }
    diluted_block(
        ch, relays, dp,
        [&](std::size_t u, std::size_t v) {
          auto c2 = lay.box[v];
          if (lay.box[u] != c2) return;
          auto from = relay.at(c2).second;
          out.delivered[net.stations[u].id].push_back({from, outbox.at(from)});
        },
        &out.transmitters);
  }

  for (std::size_t t = 0; t < out.transmitters.size(); ++t) {
    check_round(out.transmitters[t], net, lay, dp, t + 1);
    transmissions_ += out.transmitters[t].size();
  }
  ++runs_;
  return out;
}

ConvergecastResult convergecast(const BackboneStructure& bb, const Network& net,
                                const std::map<StationId, Message>& payloads,
                                const ModelParams& params) {
  ConvergecastResult out;
  const std::uint32_t dp = bb.dilution_prime;
  out.rounds = std::uint64_t{net.delta} * dp * dp;
  if (net.size() == 0) return out;
  Channel ch(net, params);
  Layout lay(net, params);
  std::map<StationId, std::map<std::size_t, Message>> got;  // leader -> roster index -> payload
  for (const auto& [c, rec] : bb.boxes) {
    auto own = payloads.find(rec.leader);
    if (own == payloads.end()) continue;
    auto pos = std::find(rec.roster.begin(), rec.roster.end(), rec.leader) - rec.roster.begin();
    got[rec.leader][std::size_t(pos)] = own->second;
  }
  for (std::uint32_t k = 0; k < net.delta; ++k) {
    std::map<GridCoord, std::size_t> tx;
    for (const auto& [c, rec] : bb.boxes) {
      if (k >= rec.roster.size() || rec.roster[k] == rec.leader) continue;
      auto p = payloads.find(rec.roster[k]);
      if (p == payloads.end()) continue;
      check_message_size(p->second, net.id_range);
      auto i = *net.index_of(rec.roster[k]);
      tx[c] = i;
    }
    diluted_block(ch, tx, dp, [&](std::size_t u, std::size_t v) {
      if (lay.box[u] != lay.box[v]) return;
      const auto& rec = bb.boxes.at(lay.box[v]);
      if (net.stations[u].id != rec.leader) return;
      got[rec.leader][k] = payloads.at(net.stations[v].id);
    });
    for (const auto& [c, v] : tx) {
      const auto& rec = bb.boxes.at(c);
      if (!got[rec.leader].count(k)) {
        throw ProtocolError("leader " + std::to_string(rec.leader) + " missed the payload of " +
                            std::to_string(net.stations[v].id));
      }
    }
  }
  for (const auto& [c, rec] : bb.boxes) {
    auto& list = out.collected[rec.leader];
    for (auto& [k, m] : got[rec.leader]) list.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------

BackboneCheck check_backbone(const BackboneStructure& bb, const Network& net,
                             const ModelParams& params) {
  BackboneCheck out;
  auto g = communication_graph(net, params);
  Layout lay(net, params);
  std::ostringstream diag;

  std::vector<char> in_h(net.size(), 0);
  std::size_t h_count = 0;
  for (auto id : bb.backbone) {
    auto i = net.index_of(id);
    if (!i) {
      diag << "backbone id " << id << " not in network; ";
      continue;
    }
    in_h[*i] = 1;
    ++h_count;
  }

  out.dominating = true;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (in_h[i]) continue;
    bool dom = std::any_of(g.adjacency[i].begin(), g.adjacency[i].end(),
                           [&](std::size_t u) { return in_h[u] != 0; });
    if (!dom) {
      out.dominating = false;
      diag << "station " << net.stations[i].id << " not dominated; ";
    }
  }

  // connectivity of the subgraph induced by H
  out.connected = true;
  if (h_count > 0) {
    std::vector<std::vector<std::size_t>> sub(net.size());
    std::size_t first = net.size();
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (!in_h[i]) continue;
      first = std::min(first, i);
      for (auto u : g.adjacency[i]) {
        if (in_h[u]) sub[i].push_back(u);
      }
    }
    auto d = bfs_distances(sub, first);
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (in_h[i] && d[i] == SIZE_MAX) {
        out.connected = false;
        diag << "backbone station " << net.stations[i].id << " unreachable inside H; ";
        break;
      }
    }
  } else if (net.size() > 0) {
    out.connected = false;
    diag << "empty backbone; ";
  }

  const std::size_t bound = 1 + 2 * dir_set().size();
  std::map<GridCoord, std::size_t> per_box;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (in_h[i]) out.max_per_box = std::max(out.max_per_box, ++per_box[lay.box[i]]);
  }
  out.box_bound = out.max_per_box <= bound;
  if (!out.box_bound) diag << "some box holds " << out.max_per_box << " backbone stations; ";

  out.assoc_ok = bb.assoc.size() == net.size();
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto id = net.stations[i].id;
    auto it = bb.assoc.find(id);
    auto rec = bb.boxes.find(lay.box[i]);
    if (it == bb.assoc.end() || rec == bb.boxes.end() || it->second != rec->second.leader) {
      out.assoc_ok = false;
      diag << "station " << id << " not associated with its box leader; ";
      continue;
    }
    auto l = *net.index_of(it->second);
    bool near = l == i || std::binary_search(g.adjacency[i].begin(), g.adjacency[i].end(), l);
    if (!near) {
      out.assoc_ok = false;
      diag << "station " << id << " cannot hear its leader; ";
    }
  }
  out.diagnostic = diag.str();
  return out;
}

std::uint64_t backbone_round_budget(std::uint32_t delta_density, std::uint32_t id_range,
                                    std::uint32_t classical_length, std::uint32_t dilution,
                                    std::uint32_t dilution_prime) {
  std::uint64_t lg = log2_ceil(id_range);
  std::uint64_t dd = std::max<std::uint32_t>(delta_density, 1);
  std::uint64_t c_len = (classical_length + dd * lg - 1) / (dd * lg);
  std::uint64_t per = 3 * c_len * dilution * dilution +
                      (2 + dir_set().size()) * std::uint64_t{dilution_prime} * dilution_prime;
  return per * dd * lg * lg * lg;
}

std::uint32_t network_extent(const Network& net, const ModelParams& params) {
  if (net.size() == 0) return 8;
  auto g = pivotal_grid(params);
  auto first = box_of(net.stations.front().pos, g);
  GridCoord lo = first, hi = first;
  for (const auto& s : net.stations) {
    auto c = box_of(s.pos, g);
    lo = {std::min(lo.i, c.i), std::min(lo.j, c.j)};
    hi = {std::max(hi.i, c.i), std::max(hi.j, c.j)};
  }
  auto side = std::max(hi.i - lo.i, hi.j - lo.j) + 1;
  return static_cast<std::uint32_t>(std::max<std::int64_t>(8, side));
}

BackboneStructure build_backbone(const Network& net, const GeometricSchedule& sel,
                                 const ModelParams& params, const BackboneOptions& opts) {
  params.validate();
  validate(net, params);
  for (const auto& s : net.stations) {
    if (s.id > sel.id_range()) {
      throw std::invalid_argument("station id " + std::to_string(s.id) +
                                  " exceeds the selector id range");
    }
  }
  BackboneStructure bb;
  bb.dilution_prime = opts.dilution_prime ? *opts.dilution_prime
                                          : dilution_constant(params, network_extent(net, params));
  bb.multi_round_len = (1 + 2 * dir_set().size()) * std::uint64_t{bb.dilution_prime} *
                       bb.dilution_prime;
  bb.selector_dilution = sel.delta();
  bb.selector_length = sel.length();

  auto election = local_leader_election(net, sel, params);
  bb.contest_sizes = election.contest_sizes;
  bb.rounds.leader_election = election.rounds;

  auto learned = local_learning(net, sel, election.leaders, params);
  bb.rounds.local_learning = learned.rounds;

  auto nl = neighborhood_learning(net, learned, params, bb.dilution_prime);
  bb.rounds.neighborhood_learning = nl.rounds;
  bb.boxes = std::move(nl.boxes);
  bb.states = std::move(nl.states);

  for (const auto& [c, rec] : bb.boxes) {
    bb.backbone.insert(rec.leader);
    for (const auto& [_, id] : rec.senders) bb.backbone.insert(id);
    for (const auto& [_, id] : rec.receivers) bb.backbone.insert(id);
    for (auto id : rec.roster) bb.assoc[id] = rec.leader;
  }

  auto d = sel.delta();
  std::uint32_t classical = d ? sel.length() / (d * d) : sel.length();
  bb.round_budget =
      backbone_round_budget(net.delta, net.id_range, classical, d, bb.dilution_prime);

  if (opts.check_properties) {
    auto chk = check_backbone(bb, net, params);
    if (!chk.ok()) throw ProtocolError("backbone properties violated: " + chk.diagnostic);
    if (bb.rounds.total() > bb.round_budget) {
      throw ProtocolError("backbone used " + std::to_string(bb.rounds.total()) +
                          " rounds, budget " + std::to_string(bb.round_budget));
    }
  }
  return bb;
}

BackboneStructure build_backbone(const Network& net, const ModelParams& params,
                                 const SelectorSpec& spec, std::uint64_t seed,
                                 const BackboneOptions& opts) {
  auto cert = build_certified_selector(spec, seed, params, opts.certify_trials);
  return build_backbone(net, cert.schedule, params, opts);
}

}  // namespace sinr
