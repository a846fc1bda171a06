#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sinr/geometry.hpp"
#include "sinr/phy.hpp"

using namespace sinr;

TEST_SUITE("geometry") {
  TEST_CASE("distance") {
    CHECK(dist({0, 0}, {3, 4}) == 5.0);
    CHECK(dist({2.5, -1}, {2.5, -1}) == 0.0);
    CHECK(dist({1, 1}, {-2, 5}) == doctest::Approx(std::sqrt(9.0 + 16.0)));
  }

  TEST_CASE("half-open boxes") {
    GridSpec g(1.0);
    CHECK(box_of({0, 0}, g) == GridCoord{0, 0});
    CHECK(box_of({1.0, 0.5}, g) == GridCoord{1, 0});
    CHECK(box_of({-0.5, -0.5}, g) == GridCoord{-1, -1});
    CHECK(box_of({0.999999, 0.0}, g) == GridCoord{0, 0});
    CHECK_THROWS(GridSpec(0.0));
  }

  TEST_CASE("pivotal grid side") {
    ModelParams p;
    p.alpha = 2;
    p.eps = 1;
    CHECK(range_of(p) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    CHECK(pivotal_gamma(p) == doctest::Approx(0.5).epsilon(1e-12));
    p.eps = 1e-9;
    CHECK(pivotal_gamma(p) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-8));
    p.alpha = 3;
    p.eps = 0.728;
    CHECK(range_of(p) == doctest::Approx(1 / 1.2).epsilon(1e-12));
    CHECK(pivotal_gamma(p) == doctest::Approx(1 / 1.2 / std::sqrt(2.0)).epsilon(1e-12));
    for (double a : {2.0, 2.5, 3.0, 4.0}) {
      for (double e : {0.25, 1.0}) {
        p.alpha = a;
        p.eps = e;
        CHECK(range_of(p) == doctest::Approx(oracle::range(p)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("neighbor offsets") {
    auto dirs = dir_set();
    CHECK(dirs.size() == 20);
    // oracle: offsets in [-2,2]^2 whose boxes have gap strictly below the
    // diagonal of one box
    std::set<GridCoord> expect;
    for (int i = -2; i <= 2; ++i) {
      for (int j = -2; j <= 2; ++j) {
        if (i == 0 && j == 0) continue;
        double gx = std::max(0, std::abs(i) - 1), gy = std::max(0, std::abs(j) - 1);
        if (gx * gx + gy * gy < 2.0) expect.insert({i, j});
      }
    }
    CHECK(std::set<GridCoord>(dirs.begin(), dirs.end()) == expect);
    CHECK(dir_index({1, 0}) >= 0);
    CHECK(dir_index({2, 2}) == -1);
    CHECK(dir_index({0, 0}) == -1);
    CHECK(box_gap({2, 2}, 1.0) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("dilution predicate") {
    std::vector<GridCoord> a{{0, 0}, {3, 6}}, b{{0, 0}, {3, 5}}, one{{7, -4}};
    CHECK(is_diluted(a, 3));
    CHECK_FALSE(is_diluted(b, 3));
    CHECK(is_diluted(one, 5));
    std::vector<GridCoord> neg{{-3, 0}, {3, -6}};
    CHECK(is_diluted(neg, 3));
    CHECK(floor_mod(-1, 3) == 2);
  }
}

TEST_SUITE("phy") {
  Station at(StationId id, double x, double y) { return {id, {x, y}}; }

  TEST_CASE("sinr values") {
    ModelParams p;
    p.alpha = 2;
    auto v = at(1, 0, 0), u = at(2, 0.5, 0);
    std::vector<Station> t{v};
    CHECK(sinr::sinr(v, u, t, p) == doctest::Approx(4.0));
    auto far = at(3, 1, 0);
    CHECK(sinr::sinr(v, far, t, p) == doctest::Approx(1.0));
    double d = 0.7;
    auto w = at(4, 2 * d, 0), mid = at(5, d, 0);
    std::vector<Station> two{v, w};
    double s = std::pow(d, -2.0);
    CHECK(sinr::sinr(v, mid, two, p) == doctest::Approx(s / (1 + s)));
    CHECK_THROWS_AS(sinr::sinr(v, at(6, 0, 0), t, p), ColocatedTransceiver);
  }

  TEST_CASE("reception at the range boundary") {
    ModelParams p;
    double r = oracle::range(p);
    auto v = at(1, 0, 0);
    std::vector<Station> t{v};
    CHECK(hears(v, at(2, r * (1 - 1e-6), 0), t, p));
    CHECK_FALSE(hears(v, at(2, r * (1 + 1e-6), 0), t, p));
    // equidistant interferer pulls SINR below 1
    auto w = at(3, 2 * 0.5 * r, 0), u = at(4, 0.5 * r, 0);
    std::vector<Station> two{v, w};
    CHECK_FALSE(hears(v, u, two, p));
  }

  TEST_CASE("round simulation") {
    ModelParams p;
    double r = oracle::range(p);
    Network net;
    net.id_range = 8;
    net.delta = 8;
    net.stations = {at(1, 0, 0), at(2, 0.3 * r, 0), at(3, 0, 0.4 * r), at(4, 0.2 * r, 0.2 * r)};
    Channel ch(net, p);
    CHECK(simulate_round<int>(ch, {}).received.empty());
    auto one = simulate_round<int>(ch, {{1, 7}});
    CHECK(one.received.size() == 3);
    for (StationId id : {2u, 3u, 4u}) {
      REQUIRE(one.received.count(id));
      CHECK(one.received.at(id).sender == 1);
      CHECK(one.received.at(id).payload == 7);
    }
    CHECK_FALSE(one.received.count(1));
    // two close transmitters, receiver at their midpoint
    Network pair;
    pair.id_range = 4;
    pair.delta = 4;
    pair.stations = {at(1, 0, 0), at(2, 0.2 * r, 0), at(3, 0.1 * r, 0)};
    auto both = simulate_round<int>(pair, {{1, 0}, {2, 0}}, p);
    CHECK_FALSE(both.received.count(3));
  }

  TEST_CASE("channel agrees with direct evaluation") {
    ModelParams p;
    p.alpha = 2.5;
    p.eps = 0.25;
    double r = oracle::range(p);
    Network net;
    net.id_range = 64;
    net.delta = 64;
    std::uint64_t x = 12345;
    auto next = [&] {
      x = x * 6364136223846793005ULL + 1442695040888963407ULL;
      return double(x >> 11) * 0x1.0p-53;
    };
    for (StationId id = 1; id <= 40; ++id) net.stations.push_back(at(id, 3 * r * next(), 3 * r * next()));
    Channel ch(net, p);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<std::size_t> tx;
      for (std::size_t i = 0; i < net.size(); ++i) {
        if (next() < 0.15) tx.push_back(i);
      }
      std::set<std::pair<std::size_t, std::size_t>> got;
      for (auto e : ch.receptions(tx)) got.insert(e);
      std::set<std::pair<std::size_t, std::size_t>> want;
      std::set<std::size_t> txs(tx.begin(), tx.end());
      for (std::size_t u = 0; u < net.size(); ++u) {
        if (txs.count(u)) continue;
        for (auto v : tx) {
          if (oracle::hears(net, v, u, tx, p)) want.insert({u, v});
        }
      }
      CHECK(got == want);
    }
  }

  TEST_CASE("communication graph") {
    ModelParams p;
    double r = oracle::range(p);
    Network net;
    net.id_range = 4;
    net.delta = 4;
    net.stations = {at(1, 0, 0), at(2, 0.9 * r, 0)};
    auto g = communication_graph(net, p);
    CHECK(g.edges == 1);
    net.stations[1].pos.x = 1.1 * r;
    CHECK(communication_graph(net, p).edges == 0);
    CHECK_FALSE(communication_graph(net, p).connected);
    net.stations.resize(1);
    auto single = communication_graph(net, p);
    CHECK(single.edges == 0);
    CHECK(single.diameter == 0);
  }

  TEST_CASE("network validation") {
    ModelParams p;
    Network net;
    net.id_range = 2;
    net.delta = 1;
    net.stations = {at(1, 0.1, 0.1), at(2, 0.2, 0.1)};
    CHECK_THROWS(validate(net, p));  // two in one box, delta 1
    net.delta = 2;
    CHECK_NOTHROW(validate(net, p));
    net.stations[1].id = 1;
    CHECK_THROWS(validate(net, p));
    net.stations[1].id = 3;
    CHECK_THROWS(validate(net, p));
    p.alpha = 1.5;
    CHECK_THROWS(p.validate());
  }
}
