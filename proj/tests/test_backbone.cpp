#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "sinr/backbone.hpp"
#include "sinr/harness.hpp"

using namespace sinr;

namespace {

const ModelParams kParams{};

const GeometricSchedule& small_selector() {
  static const auto sel = [] {
    auto spec = make_selector_spec(16, 4, kParams);
    return build_certified_selector(spec, 1, kParams, 21).schedule;
  }();
  return sel;
}

// Station at relative position (fx, fy) inside box (i, j).
Station in_box(StationId id, int i, int j, double fx, double fy) {
  double c = oracle::cell(kParams);
  return {id, {(i + fx) * c, (j + fy) * c}};
}

Network make_net(std::vector<Station> st, std::uint32_t delta = 4) {
  Network n;
  n.id_range = 16;
  n.delta = delta;
  n.stations = std::move(st);
  validate(n, kParams);
  return n;
}

}  // namespace

TEST_SUITE("backbone") {
  TEST_CASE("message size accounting") {
    Message m{{1, 2, 3}, Rumor{4, 1}};
    CHECK_NOTHROW(check_message_size(m, 256));
    Message big;
    big.control.assign(40, 1LL << 40);
    CHECK_THROWS_AS(check_message_size(big, 256), ProtocolError);
  }

  TEST_CASE("local leader election") {
    auto& sel = small_selector();
    auto lone = make_net({in_box(1, 0, 0, .5, .5), in_box(2, 1, 0, .5, .5), in_box(3, 0, 1, .5, .5)});
    auto r1 = local_leader_election(lone, sel, kParams);
    CHECK(r1.leaders.size() == 3);
    CHECK(r1.contest_sizes.front() == 0);
    Network empty;
    empty.id_range = 16;
    CHECK(local_leader_election(empty, sel, kParams).leaders.empty());

    auto pair = make_net({in_box(5, 0, 0, .2, .3), in_box(9, 0, 0, .7, .6)});
    auto r2 = local_leader_election(pair, sel, kParams);
    REQUIRE(r2.leaders.size() == 1);
    auto l = r2.leaders.begin()->second;
    CHECK((l == 5 || l == 9));
    CHECK(r2.contest_sizes.front() == 2);
    CHECK(r2.contest_sizes.size() == 1 + log2_ceil(16));
    CHECK(r2.halving_holds());
    CHECK(r2.rounds == std::uint64_t{log2_ceil(16)} * sel.length());
  }

  TEST_CASE("local learning rosters") {
    auto& sel = small_selector();
    auto net = make_net({in_box(5, 0, 0, .2, .3), in_box(9, 0, 0, .7, .6), in_box(2, 1, 0, .5, .5)});
    auto le = local_leader_election(net, sel, kParams);
    auto ll = local_learning(net, sel, le.leaders, kParams);
    const auto& box = ll.boxes.at({0, 0});
    CHECK(std::set<StationId>(box.roster.begin(), box.roster.end()) == std::set<StationId>{5, 9});
    CHECK(box.roster.front() == box.leader);
    CHECK(ll.states.at(5).roster == box.roster);
    CHECK(ll.states.at(9).roster == box.roster);
    CHECK(ll.boxes.at({1, 0}).roster == std::vector<StationId>{2});
    CHECK(ll.rounds == 2ull * log2_ceil(16) * sel.length());
  }

  TEST_CASE("two neighboring boxes") {
    auto net = make_net({in_box(4, 0, 0, .8, .5), in_box(6, 1, 0, .2, .5)});
    auto bb = build_backbone(net, small_selector(), kParams);
    CHECK(bb.backbone == std::set<StationId>{4, 6});
    CHECK(bb.boxes.at({0, 0}).senders.at({1, 0}) == 4);
    CHECK(bb.boxes.at({1, 0}).receivers.at({-1, 0}) == 6);
    CHECK(bb.boxes.at({1, 0}).senders.at({-1, 0}) == 6);
    CHECK(check_backbone(bb, net, kParams).ok());
    auto dp = bb.dilution_prime;
    CHECK(bb.rounds.neighborhood_learning == (2ull * net.delta + 20) * dp * dp);
    CHECK(bb.multi_round_len == 41ull * dp * dp);
  }

  TEST_CASE("single box") {
    auto net = make_net({in_box(7, 2, 2, .3, .3), in_box(3, 2, 2, .6, .7)});
    auto bb = build_backbone(net, small_selector(), kParams);
    REQUIRE(bb.boxes.size() == 1);
    auto l = bb.boxes.begin()->second.leader;
    CHECK(bb.backbone == std::set<StationId>{l});
    CHECK(bb.assoc.at(3) == l);
    CHECK(bb.assoc.at(7) == l);
  }

  TEST_CASE("min-id sender") {
    // 3 and 7 share a box and both reach station 12 in box (1,0)
    auto net = make_net({in_box(7, 0, 0, .9, .5), in_box(3, 0, 0, .8, .4), in_box(12, 1, 0, .1, .5)});
    auto bb = build_backbone(net, small_selector(), kParams);
    CHECK(bb.boxes.at({0, 0}).senders.at({1, 0}) == 3);
    CHECK(bb.boxes.at({1, 0}).senders.at({-1, 0}) == 12);
    // the receiver is the smallest id neighbor of the sender in that box
    CHECK(bb.boxes.at({0, 0}).receivers.at({1, 0}) == 3);
  }

  TEST_CASE("multi-round along a box path") {
    auto net = gen_box_path(3, 2, kParams, 4, 16);
    auto bb = build_backbone(net, small_selector(), kParams);
    auto boxes = oracle::members(net, kParams);
    REQUIRE(boxes.size() == 3);
    std::vector<GridCoord> order;
    for (const auto& [b, _] : boxes) order.push_back({b.first, b.second});
    Message m{{42}, std::nullopt};
    auto hold = [&](const MultiRoundResult& res, const GridCoord& from, const GridCoord& box) {
      for (auto id : boxes.at({box.i, box.j})) {
        auto it = res.delivered.find(id);
        if (it == res.delivered.end()) return false;
        bool got = std::any_of(it->second.begin(), it->second.end(),
                               [&](const Delivery& d) { return d.from == from && d.msg == m; });
        if (!got) return false;
      }
      return true;
    };
    auto r1 = multi_round(bb, net, {{order[0], m}}, kParams);
    CHECK(hold(r1, order[0], order[0]));
    CHECK(hold(r1, order[0], order[1]));
    CHECK_FALSE(hold(r1, order[0], order[2]));
    auto r2 = multi_round(bb, net, {{order[1], m}}, kParams);
    CHECK(hold(r2, order[1], order[2]));
    CHECK(r1.rounds == 41ull * bb.dilution_prime * bb.dilution_prime);
    CHECK(r1.transmitters.size() == r1.rounds);
  }

  TEST_CASE("isolated box broadcast") {
    auto net = make_net({in_box(1, 0, 0, .3, .3), in_box(2, 0, 0, .6, .6), in_box(3, 6, 6, .5, .5)});
    auto bb = build_backbone(net, small_selector(), kParams,
                             BackboneOptions{std::nullopt, 40, false});
    Message m{{7}, std::nullopt};
    auto res = multi_round(bb, net, {{{0, 0}, m}}, kParams);
    std::set<StationId> got;
    for (const auto& [id, list] : res.delivered) {
      for (const auto& d : list) {
        if (d.msg == m) got.insert(id);
      }
    }
    CHECK(got == std::set<StationId>{1, 2});
  }

  TEST_CASE("convergecast") {
    auto net = make_net({in_box(5, 0, 0, .2, .3), in_box(9, 0, 0, .7, .6), in_box(2, 1, 0, .5, .5)});
    auto bb = build_backbone(net, small_selector(), kParams);
    std::map<StationId, Message> pay;
    for (StationId id : {5u, 9u, 2u}) pay[id] = Message{{}, Rumor{id, 1}};
    auto cc = convergecast(bb, net, pay, kParams);
    const auto& box = bb.boxes.at({0, 0});
    const auto& got = cc.collected.at(box.leader);
    REQUIRE(got.size() == 2);
    CHECK(got[0].rumor->origin == box.roster[0]);
    CHECK(got[1].rumor->origin == box.roster[1]);
    CHECK(cc.collected.at(2).size() == 1);
    CHECK(cc.rounds == std::uint64_t{net.delta} * bb.dilution_prime * bb.dilution_prime);

    auto wide = bb;
    wide.dilution_prime = 3;
    Network eight = net;
    eight.delta = 8;
    CHECK(convergecast(wide, eight, {}, kParams).rounds == 72);
  }

  TEST_CASE("random networks satisfy the backbone properties") {
    auto spec = make_selector_spec(64, 4, kParams);
    auto sel = build_certified_selector(spec, 1, kParams, 21).schedule;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto net = gen_random_network(40, 6, 4, kParams, seed, 64);
      auto bb = build_backbone(net, sel, kParams);
      auto chk = check_backbone(bb, net, kParams);
      CHECK(chk.ok());
      // oracle: domination and connectivity of H over the distance graph
      auto adj = oracle::graph(net, kParams);
      std::map<std::size_t, std::set<std::size_t>> h;
      for (std::size_t i = 0; i < net.size(); ++i) {
        auto id = net.stations[i].id;
        bool in_h = bb.backbone.count(id);
        bool dominated = in_h;
        for (auto u : adj[i]) dominated |= bb.backbone.count(net.stations[u].id) > 0;
        CHECK(dominated);
        if (!in_h) continue;
        h[i];
        for (auto u : adj[i]) {
          if (bb.backbone.count(net.stations[u].id)) h[i].insert(u);
        }
      }
      CHECK(oracle::bfs(h, h.begin()->first).size() == h.size());
      CHECK(bb.rounds.total() <= bb.round_budget);
    }
  }

  TEST_CASE("round budget arithmetic") {
    // (3 * 8 * 5^2 + 22 * 5^2) * 8 * 8^3
    CHECK(backbone_round_budget(8, 256, 8 * 8 * 8, 5, 5) == (3ull * 8 * 25 + 22 * 25) * 8 * 512);
  }
}
