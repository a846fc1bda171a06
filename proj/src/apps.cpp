#include "sinr/apps.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace sinr {

const char* to_string(ElectionStatus s) {
  switch (s) {
    case ElectionStatus::Forward: return "forward";
    case ElectionStatus::WaitBack: return "wait-back";
    case ElectionStatus::Back: return "back";
    case ElectionStatus::WaitConf: return "wait-conf";
    case ElectionStatus::Confirm: return "confirm";
    case ElectionStatus::Stop: return "stop";
  }
  return "?";
}

std::map<GridCoord, std::vector<GridCoord>> box_graph(const BackboneStructure& bb) {
  std::map<GridCoord, std::vector<GridCoord>> g;
  for (const auto& [c, _] : bb.boxes) g[c] = bb.box_neighbors(c);
  return g;
}

std::map<GridCoord, std::uint32_t> box_distances(const BackboneStructure& bb,
                                                 const GridCoord& root) {
  std::map<GridCoord, std::uint32_t> d;
  if (!bb.boxes.count(root)) return d;
  std::deque<GridCoord> q{root};
  d[root] = 0;
  while (!q.empty()) {
    auto c = q.front();
    q.pop_front();
    for (const auto& n : bb.box_neighbors(c)) {
      if (d.emplace(n, d[c] + 1).second) q.push_back(n);
    }
  }
  return d;
}

std::uint32_t election_phase_bound(ElectionMode mode, std::uint32_t ecc) {
  return 3 * ecc + (mode == ElectionMode::Eager ? 1 : 3);
}

namespace {

std::string coord_str(const GridCoord& c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

// Messages heard by each box's leader from other boxes.
std::map<GridCoord, std::vector<const Delivery*>> box_inbox(const BackboneStructure& bb,
                                                            const MultiRoundResult& res) {
  std::map<GridCoord, std::vector<const Delivery*>> in;
  for (const auto& [c, rec] : bb.boxes) {
    auto& list = in[c];
    auto it = res.delivered.find(rec.leader);
    if (it == res.delivered.end()) continue;
    for (const auto& d : it->second) {
      if (d.from != c) list.push_back(&d);
    }
  }
  return in;
}

std::int64_t pred_mask(const GridCoord& c, const std::set<GridCoord>& pred) {
  std::int64_t mask = 0;
  for (const auto& p : pred) mask |= std::int64_t{1} << dir_index(p - c);
  return mask;
}

void record_held(std::map<StationId, std::set<Rumor>>& held, const MultiRoundResult& res) {
  for (const auto& [id, list] : res.delivered) {
    for (const auto& d : list) {
      if (d.msg.rumor) held[id].insert(*d.msg.rumor);
    }
  }
}

std::string dump_election(const ElectionResult& r) {
  std::ostringstream os;
  for (const auto& snap : r.trace) {
    os << "\n  phase " << snap.phase << ":";
    for (const auto& [c, s] : snap.boxes) {
      os << ' ' << coord_str(c) << '=' << s.first << '/' << to_string(s.second);
    }
  }
  return os.str();
}

}  // namespace

ElectionResult global_leader_election(const MultiRoundRunner& mr, const ElectionOptions& opts) {
  const auto& bb = mr.backbone();
  ElectionResult out;
  if (bb.boxes.empty()) return out;
  const bool eager = opts.mode == ElectionMode::Eager;

  auto graph = box_graph(bb);
  std::map<GridCoord, std::set<GridCoord>> gamma;
  for (const auto& [c, nb] : graph) gamma[c] = {nb.begin(), nb.end()};

  auto& state = out.state;
  for (const auto& [c, rec] : bb.boxes) {
    BoxElection b;
    b.l0 = *std::min_element(rec.roster.begin(), rec.roster.end());
    b.ld = b.l0;
    state[c] = b;
    if (out.leader == 0 || b.l0 < out.leader) {
      out.leader = b.l0;
      out.leader_box = c;
    }
  }
  auto dist = box_distances(bb, out.leader_box);
  if (dist.size() != bb.boxes.size()) {
    throw std::invalid_argument("box graph is not connected");
  }
  for (const auto& [c, d] : dist) out.ecc = std::max(out.ecc, d);
  out.phase_bound = election_phase_bound(opts.mode, out.ecc);
  const auto cap = opts.phase_cap.value_or(out.phase_bound);

  auto snapshot = [&](std::uint32_t phase) {
    ElectionSnapshot s;
    s.phase = phase;
    for (const auto& [c, b] : state) s.boxes[c] = {b.ld, b.st};
    return s;
  };
  auto to_confirm = [&](BoxElection& b) {
    b.st = eager && b.succ.empty() ? ElectionStatus::Stop : ElectionStatus::Confirm;
  };
  auto try_release = [&](const GridCoord& c, BoxElection& b) {
    if (!std::includes(b.backs.begin(), b.backs.end(), b.succ.begin(), b.succ.end())) return;
    if (b.succ == gamma[c]) {
      to_confirm(b);
    } else {
      b.st = ElectionStatus::Back;
    }
  };
  auto all_in = [&](std::initializer_list<ElectionStatus> ok) {
    return std::all_of(state.begin(), state.end(), [&](const auto& kv) {
      return std::find(ok.begin(), ok.end(), kv.second.st) != ok.end();
    });
  };

  ElectionSnapshot prev = snapshot(0);
  if (opts.keep_trace) out.trace.push_back(prev);
  std::uint32_t phase = 0;
  while (!all_in({ElectionStatus::Stop})) {
    if (phase >= cap) {
      throw ProtocolError("election still running after " + std::to_string(cap) +
                          " phases (D=" + std::to_string(out.ecc) + ")" + dump_election(out));
    }
    ++phase;

    // multi-round 1: (st, ld) from boxes in forward, back or confirm
    std::map<GridCoord, Message> outbox;
    for (const auto& [c, b] : state) {
      if (b.st == ElectionStatus::Forward || b.st == ElectionStatus::Back ||
          b.st == ElectionStatus::Confirm) {
        outbox[c] = Message{{static_cast<std::int64_t>(b.st), b.ld}, std::nullopt};
      }
    }
    auto res1 = mr.run(outbox);
    auto in1 = box_inbox(bb, res1);
    for (auto& [c, b] : state) {
      const auto& msgs = in1[c];
      StationId l = b.ld;
      for (const auto* d : msgs) l = std::min<StationId>(l, StationId(d->msg.control[1]));
      if (l < b.ld) {
        b.st = ElectionStatus::Forward;
        b.ld = l;
        b.pred.clear();
        for (const auto* d : msgs) {
          if (StationId(d->msg.control[1]) == l) b.pred.insert(d->from);
        }
        b.backs.clear();
        b.confirms.clear();
        continue;
      }
      for (const auto* d : msgs) {
        if (StationId(d->msg.control[1]) != b.ld) continue;
        auto st = static_cast<ElectionStatus>(d->msg.control[0]);
        if (st == ElectionStatus::Back) b.backs.insert(d->from);
        if (st == ElectionStatus::Confirm) b.confirms.insert(d->from);
      }
      switch (b.st) {
        case ElectionStatus::Forward: b.st = ElectionStatus::WaitBack; break;
        case ElectionStatus::WaitBack: try_release(c, b); break;
        case ElectionStatus::Back: b.st = ElectionStatus::WaitConf; break;
        case ElectionStatus::WaitConf:
          if (std::includes(b.confirms.begin(), b.confirms.end(), b.pred.begin(), b.pred.end())) {
            to_confirm(b);
          }
          break;
        case ElectionStatus::Confirm: b.st = ElectionStatus::Stop; break;
        case ElectionStatus::Stop: break;
      }
    }

    // multi-round 2: every box announces pred, succ is rebuilt
    std::map<GridCoord, Message> outbox2;
    for (const auto& [c, b] : state) {
      outbox2[c] = Message{{pred_mask(c, b.pred)}, std::nullopt};
      if (eager) outbox2[c].control.push_back(b.ld);
    }
    auto res2 = mr.run(outbox2);
    auto in2 = box_inbox(bb, res2);
    for (auto& [c, b] : state) {
      b.succ.clear();
      for (const auto* d : in2[c]) {
        auto k = dir_index(c - d->from);
        if (k >= 0 && (d->msg.control[0] >> k) & 1) b.succ.insert(d->from);
      }
      if (!eager || b.st != ElectionStatus::WaitBack) continue;
      // a neighbor that just adopted a smaller leader will preempt us
      bool smaller = std::any_of(in2[c].begin(), in2[c].end(), [&](const Delivery* d) {
        return StationId(d->msg.control[1]) < b.ld;
      });
      if (!smaller) try_release(c, b);
    }
    out.multi_rounds += 2;

    for (const auto& [c, b] : state) {
      bool decided = b.st == ElectionStatus::Confirm || b.st == ElectionStatus::Stop;
      if (decided && b.ld != out.leader) {
        throw ProtocolError("box " + coord_str(c) + " decided on " + std::to_string(b.ld) +
                            " in phase " + std::to_string(phase) + dump_election(out));
      }
      const auto& was = prev.boxes.at(c);
      if (was.second == ElectionStatus::Stop && (was.first != b.ld || b.st != was.second)) {
        throw ProtocolError("box " + coord_str(c) + " left stop in phase " +
                            std::to_string(phase));
      }
    }
    prev = snapshot(phase);
    if (opts.keep_trace) out.trace.push_back(prev);
    if (out.decided_phase == 0 && all_in({ElectionStatus::Confirm, ElectionStatus::Stop})) {
      out.decided_phase = phase;
    }
  }
  out.phases = phase;
  out.physical_rounds = out.multi_rounds * bb.multi_round_len;
  return out;
}

ElectionResult global_leader_election(const BackboneStructure& bb, const Network& net,
                                      const ModelParams& params, const ElectionOptions& opts) {
  MultiRoundRunner mr(bb, net, params);
  return global_leader_election(mr, opts);
}

// ---------------------------------------------------------------------------

TreeResult build_tree(const MultiRoundRunner& mr, const ElectionResult& election) {
  const auto& bb = mr.backbone();
  TreeResult out;
  auto& st = out.state;
  if (bb.boxes.empty()) return out;
  st.root = election.leader_box;
  const auto& dirs = dir_set();

  std::map<GridCoord, Message> outbox;
  for (const auto& [c, b] : election.state) {
    auto& box = st.boxes[c];
    if (c == st.root) {
      outbox[c] = Message{{-1}, std::nullopt};
      continue;
    }
    if (b.pred.empty()) {
      throw ProtocolError("box " + coord_str(c) + " has no predecessor after the election");
    }
    auto best = *b.pred.begin();
    for (const auto& p : b.pred) {
      if (election.state.at(p).l0 < election.state.at(best).l0) best = p;
    }
    box.tree_pred = best;
    outbox[c] = Message{{dir_index(best - c)}, std::nullopt};
  }
  auto res = mr.run(outbox);
  out.multi_rounds = 1;
  for (const auto& [c, list] : box_inbox(bb, res)) {
    for (const auto* d : list) {
      auto k = d->msg.control[0];
      if (k >= 0 && d->from + dirs[k] == c) st.boxes[c].tree_succ.insert(d->from);
    }
  }

  // every box must reach the root along tree_pred, one level per step
  auto dist = box_distances(bb, st.root);
  for (auto& [c, box] : st.boxes) {
    auto cur = c;
    std::uint32_t steps = 0;
    while (cur != st.root) {
      const auto& p = st.boxes.at(cur).tree_pred;
      if (!p || ++steps > st.boxes.size()) {
        throw ProtocolError("tree walk from " + coord_str(c) + " does not reach the root");
      }
      if (dist.at(*p) + 1 != dist.at(cur)) {
        throw ProtocolError("tree edge " + coord_str(cur) + " -> " + coord_str(*p) +
                            " is not leveled");
      }
      if (!st.boxes.at(*p).tree_succ.count(cur)) {
        throw ProtocolError("box " + coord_str(*p) + " missed the choice of " + coord_str(cur));
      }
      cur = *p;
    }
    box.level = steps;
    st.depth = std::max(st.depth, steps);
  }
  return out;
}

CountResult count_messages(BroadcastState& state, const MultiRoundRunner& mr) {
  const auto& bb = mr.backbone();
  CountResult out;
  if (state.boxes.empty()) return out;
  std::map<GridCoord, std::uint64_t> k;
  std::map<GridCoord, std::set<GridCoord>> heard;
  std::set<GridCoord> sent;
  for (const auto& [c, b] : state.boxes) k[c] = b.k_local;
  auto complete = [&](const GridCoord& c) {
    return heard[c].size() == state.boxes.at(c).tree_succ.size();
  };
  while (!complete(state.root)) {
    if (out.multi_rounds > state.depth) {
      throw ProtocolError("message counting exceeds the tree depth");
    }
    std::map<GridCoord, Message> outbox;
    for (const auto& [c, b] : state.boxes) {
      if (c == state.root || sent.count(c) || !complete(c)) continue;
      outbox[c] = Message{{static_cast<std::int64_t>(k[c])}, std::nullopt};
      sent.insert(c);
    }
    auto res = mr.run(outbox);
    ++out.multi_rounds;
    for (const auto& [c, list] : box_inbox(bb, res)) {
      const auto& succ = state.boxes.at(c).tree_succ;
      for (const auto* d : list) {
        if (!succ.count(d->from) || !outbox.count(d->from)) continue;
        if (heard[c].insert(d->from).second) k[c] += std::uint64_t(d->msg.control[0]);
      }
    }
  }
  state.k_total = k[state.root];
  out.k_total = state.k_total;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Rumor> rumors_of(const PayloadPlacement& placement) {
  std::vector<Rumor> out;
  for (const auto& [id, n] : placement) {
    for (std::uint32_t s = 1; s <= n; ++s) out.push_back({id, s});
  }
  return out;
}

MultiBroadcastResult multi_broadcast(const MultiRoundRunner& mr, const PayloadPlacement& placement,
                                     const MultiBroadcastOptions& opts) {
  const auto& bb = mr.backbone();
  const auto& net = mr.network();
  const auto len = bb.multi_round_len;
  MultiBroadcastResult out;
  auto all = rumors_of(placement);
  out.k = all.size();
  for (const auto& [id, n] : placement) {
    if (!net.index_of(id)) {
      throw std::invalid_argument("payload placed at unknown station " + std::to_string(id));
    }
  }
  for (const auto& s : net.stations) out.held[s.id];
  for (const auto& r : all) out.held[r.origin].insert(r);
  if (bb.boxes.empty()) return out;

  out.election = global_leader_election(mr, opts.election);
  auto tree = build_tree(mr, out.election);
  out.state = std::move(tree.state);
  auto& st = out.state;
  out.tree = {tree.multi_rounds, tree.multi_rounds * len};

  // local stage: convergecast one rumor per station per pass, then the
  // leader rebroadcasts its box's rumors
  std::uint32_t passes = 0;
  for (const auto& [id, n] : placement) passes = std::max(passes, n);
  for (std::uint32_t p = 1; p <= passes; ++p) {
    std::map<StationId, Message> payloads;
    for (const auto& [id, n] : placement) {
      if (n >= p) payloads[id] = Message{{}, Rumor{id, p}};
    }
    auto cc = convergecast(bb, net, payloads, mr.params());
    out.local.physical_rounds += cc.rounds;
    for (const auto& [c, rec] : bb.boxes) {
      auto it = cc.collected.find(rec.leader);
      if (it == cc.collected.end()) continue;
      for (const auto& m : it->second) {
        st.boxes[c].pending.push_back(*m.rumor);
        out.held[rec.leader].insert(*m.rumor);
      }
    }
  }
  std::uint32_t k_max = 0;
  for (auto& [c, b] : st.boxes) {
    std::sort(b.pending.begin(), b.pending.end());
    b.k_local = std::uint32_t(b.pending.size());
    k_max = std::max(k_max, b.k_local);
  }
  for (std::uint32_t m = 0; m < k_max; ++m) {
    std::map<GridCoord, Message> leader_out;
    for (const auto& [c, b] : st.boxes) {
      if (m < b.pending.size()) leader_out[c] = Message{{}, b.pending[m]};
    }
    auto res = mr.run({}, &leader_out);
    record_held(out.held, res);
  }
  out.local.multi_rounds = k_max;
  out.local.physical_rounds += std::uint64_t{k_max} * len;

  auto cnt = count_messages(st, mr);
  out.counting = {cnt.multi_rounds, cnt.multi_rounds * len};
  if (cnt.k_total != out.k) {
    throw ProtocolError("root counted " + std::to_string(cnt.k_total) + " rumors, placed " +
                        std::to_string(out.k));
  }

  // gathering: greedy forwarding towards the root
  std::set<Rumor> at_root(st.boxes[st.root].pending.begin(), st.boxes[st.root].pending.end());
  std::uint64_t g_bound = out.k ? st.depth + out.k - 1 : 0;
  while (at_root.size() < out.k) {
    if (out.gathering.multi_rounds >= g_bound) {
      throw ProtocolError("gathering exceeds depth + k - 1 = " + std::to_string(g_bound) +
                          " multi-rounds");
    }
    std::map<GridCoord, Message> outbox;
    for (auto& [c, b] : st.boxes) {
      if (c == st.root || b.pending.empty()) continue;
      auto pick = opts.rule == ChoiceRule::MinTag
                      ? std::min_element(b.pending.begin(), b.pending.end())
                      : b.pending.end() - 1;
      Rumor r = *pick;
      b.pending.erase(pick);
      b.sent.insert(r);
      outbox[c] = Message{{}, r};
    }
    auto res = mr.run(outbox);
    ++out.gathering.multi_rounds;
    record_held(out.held, res);
    for (const auto& [c, list] : box_inbox(bb, res)) {
      auto& b = st.boxes.at(c);
      for (const auto* d : list) {
        if (!b.tree_succ.count(d->from) || !d->msg.rumor) continue;
        const auto& r = *d->msg.rumor;
        if (c == st.root) {
          at_root.insert(r);
        } else if (!b.sent.count(r) &&
                   std::find(b.pending.begin(), b.pending.end(), r) == b.pending.end()) {
          b.pending.push_back(r);
        }
      }
    }
  }
  out.gathering.physical_rounds = out.gathering.multi_rounds * len;

  // flooding: the root emits one rumor per multi-round, every box forwards
  // what it got from its tree parent one multi-round later
  std::vector<Rumor> order(at_root.begin(), at_root.end());
  std::map<GridCoord, std::deque<Rumor>> queue;
  std::map<GridCoord, std::uint64_t> got;
  for (std::size_t i = 0; i < order.size(); ++i) queue[st.root].push_back(order[i]);
  auto flooded = [&] {
    return std::all_of(st.boxes.begin(), st.boxes.end(), [&](const auto& kv) {
      return kv.first == st.root || got[kv.first] == out.k;
    });
  };
  while (out.k > 0 && !flooded()) {
    if (out.flooding.multi_rounds >= st.depth + out.k) {
      throw ProtocolError("flooding exceeds depth + k multi-rounds");
    }
    std::map<GridCoord, Message> outbox;
    for (auto& [c, q] : queue) {
      if (q.empty()) continue;
      outbox[c] = Message{{}, q.front()};
      q.pop_front();
    }
    auto res = mr.run(outbox);
    auto t = ++out.flooding.multi_rounds;
    record_held(out.held, res);
    for (const auto& [c, list] : box_inbox(bb, res)) {
      auto& b = st.boxes.at(c);
      for (const auto* d : list) {
        if (!b.tree_pred || d->from != *b.tree_pred || !d->msg.rumor) continue;
        ++got[c];
        auto& w = out.flood_window[c];
        if (w.first == 0) w.first = t;
        w.second = t;
        if (!b.tree_succ.empty()) queue[c].push_back(*d->msg.rumor);
      }
    }
  }
  out.flooding.physical_rounds = out.flooding.multi_rounds * len;
  for (const auto& [c, w] : out.flood_window) {
    auto j = st.boxes.at(c).level;
    if (w.first < j || w.second >= j + out.k) {
      throw ProtocolError("box " + coord_str(c) + " at level " + std::to_string(j) +
                          " received outside multi-rounds [j, j+k)");
    }
  }

  std::set<Rumor> full(all.begin(), all.end());
  for (const auto& [id, h] : out.held) {
    if (h != full) {
      std::vector<Rumor> miss;
      std::set_difference(full.begin(), full.end(), h.begin(), h.end(), std::back_inserter(miss));
      std::ostringstream os;
      os << "station " << id << " misses";
      for (const auto& r : miss) os << " (" << r.origin << "," << r.seq << ")";
      throw ProtocolError(os.str());
    }
  }

  out.total_physical_rounds = out.election.physical_rounds + out.tree.physical_rounds +
                              out.local.physical_rounds + out.counting.physical_rounds +
                              out.gathering.physical_rounds + out.flooding.physical_rounds;
  std::uint64_t dp2 = std::uint64_t{bb.dilution_prime} * bb.dilution_prime;
  out.round_budget = len * (2ull * out.election.phase_bound + 1 + k_max + st.depth +
                            g_bound + st.depth + out.k) +
                     std::uint64_t{passes} * net.delta * dp2;
  if (out.total_physical_rounds > out.round_budget) {
    throw ProtocolError("multi-broadcast used " + std::to_string(out.total_physical_rounds) +
                        " physical rounds, budget " + std::to_string(out.round_budget));
  }
  return out;
}

MultiBroadcastResult multi_broadcast(const BackboneStructure& bb, const Network& net,
                                     const PayloadPlacement& placement, const ModelParams& params,
                                     const MultiBroadcastOptions& opts) {
  MultiRoundRunner mr(bb, net, params);
  return multi_broadcast(mr, placement, opts);
}

}  // namespace sinr
