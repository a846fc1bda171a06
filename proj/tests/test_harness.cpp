#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "sinr/harness.hpp"
#include "sinr/scenario.hpp"

using namespace sinr;

TEST_SUITE("harness") {
  TEST_CASE("random networks") {
    ModelParams p;
    auto one = gen_random_network(1, 4, 1, p, 3);
    CHECK(one.size() == 1);
    CHECK(one.id_range == 2);

    auto net = gen_random_network(50, 10, 4, p, 7);
    CHECK(net.size() == 50);
    CHECK(net.id_range == 64);
    auto boxes = oracle::members(net, p);
    for (const auto& [b, ids] : boxes) {
      CHECK(ids.size() <= 4);
      CHECK(b.first >= 0);
      CHECK(b.first < 10);
      CHECK(b.second >= 0);
      CHECK(b.second < 10);
    }
    std::set<StationId> ids;
    for (const auto& s : net.stations) {
      ids.insert(s.id);
      CHECK(s.id >= 1);
      CHECK(s.id <= 64);
    }
    CHECK(ids.size() == 50);
    CHECK(oracle::connected(oracle::graph(net, p)));

    auto again = gen_random_network(50, 10, 4, p, 7);
    REQUIRE(again.size() == net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
      CHECK(again.stations[i].id == net.stations[i].id);
      CHECK(again.stations[i].pos.x == net.stations[i].pos.x);
    }
    CHECK_THROWS(gen_random_network(20, 1, 1, p, 1, 32, true, 1000));
  }

  TEST_CASE("box path and block") {
    ModelParams p;
    auto path = gen_box_path(5, 3, p, 2);
    auto gb = oracle::box_graph(path, p);
    REQUIRE(gb.size() == 5);
    for (const auto& [b, nb] : gb) {
      CHECK(b.second == 0);
      std::set<oracle::Box> want;
      if (b.first > 0) want.insert({b.first - 1, 0});
      if (b.first < 4) want.insert({b.first + 1, 0});
      CHECK(nb == want);
    }
    auto block = gen_box_block(2, 3, 2, p, 5);
    auto m = oracle::members(block, p);
    CHECK(m.size() == 6);
    for (const auto& [b, ids] : m) CHECK(ids.size() == 2);
  }

  TEST_CASE("lower-bound instance") {
    ModelParams p;
    auto inst = gen_lower_bound_instance(4, p, 11);
    CHECK(inst.cols0.size() == 4);
    CHECK(inst.cols1.size() == 4);
    std::vector<std::uint32_t> shared;
    std::set_intersection(inst.cols0.begin(), inst.cols0.end(), inst.cols1.begin(),
                          inst.cols1.end(), std::back_inserter(shared));
    CHECK(shared == std::vector<std::uint32_t>{inst.bridge});
    std::set<std::uint32_t> all(inst.cols0.begin(), inst.cols0.end());
    all.insert(inst.cols1.begin(), inst.cols1.end());
    CHECK(all.size() == 7);
    CHECK(*all.rbegin() == 7);

    // two cliques joined by the single bridge edge
    const auto& net = inst.network;
    auto adj = oracle::graph(net, p);
    std::size_t cross = 0;
    for (std::size_t a = 0; a < net.size(); ++a) {
      for (std::size_t b = a + 1; b < net.size(); ++b) {
        bool same_row = (a < 4) == (b < 4);
        if (same_row) {
          CHECK(adj[a].count(b));
        } else if (adj[a].count(b)) {
          ++cross;
          CHECK(net.stations[a].id == inst.bridge);
          CHECK(net.stations[b].id == 8 + inst.bridge);
        }
      }
    }
    CHECK(cross == 1);
    CHECK(inst.row_ids(1).size() == 4);

    auto sb = lower_bound_spacing(4, p);
    CHECK(sb.chosen > 0);
    CHECK(sb.chosen <= 0.9 * sb.range_bound + 1e-15);
    CHECK(sb.range_bound == doctest::Approx(oracle::range(p) / 8));
    ModelParams q;
    q.eps = 0.728;
    CHECK(lower_bound_spacing(3, q).chosen > 0);
    CHECK_THROWS(lower_bound_spacing(1, p));
  }

  TEST_CASE("pattern properties") {
    ModelParams p;
    for (std::uint32_t d = 2; d <= 4; ++d) {
      auto inst = gen_lower_bound_instance(d, p, d);
      auto rep = check_p1_p2(inst, p);
      CHECK(rep.exhaustive);
      CHECK(rep.patterns == (1ull << (2 * d)));
      CHECK(rep.ok());
    }
    // squeezing the rows together breaks the second property
    auto inst = gen_lower_bound_instance(3, p, 1);
    for (auto& s : inst.network.stations) {
      if (s.pos.y > 0) s.pos.y = 0.05 * oracle::range(p);
    }
    CHECK_FALSE(check_p1_p2(inst, p).ok());
  }

  TEST_CASE("round-robin baselines") {
    ModelParams p;
    auto path = gen_box_path(4, 1, p, 3, 8);
    auto adj = oracle::graph(path, p);
    std::size_t min_i = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path.stations[i].id < path.stations[min_i].id) min_i = i;
    }
    std::map<std::size_t, std::set<std::size_t>> g;
    for (std::size_t i = 0; i < adj.size(); ++i) g[i] = adj[i];
    std::size_t ecc = 0;
    for (auto [v, d] : oracle::bfs(g, min_i)) ecc = std::max(ecc, d);
    auto el = round_robin_election(path, p);
    CHECK(el.rounds == ecc);
    CHECK(el.physical_rounds == el.rounds * path.id_range);

    auto one = gen_random_network(1, 2, 1, p, 1);
    CHECK(round_robin_election(one, p).rounds == 0);
    CHECK(round_robin_multibroadcast(one, p, {{one.stations[0].id, 3}}).rounds == 0);

    auto far = path.stations.back().id;
    auto mb = round_robin_multibroadcast(path, p, {{far, 2}});
    CHECK(mb.rounds == path.size() - 1 + 1);
  }
}
