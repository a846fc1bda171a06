#include "sinr/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sinr {

// ---------------------------------------------------------------------------
// Placement

PlacementBuilder::PlacementBuilder(const ModelParams& params, std::uint32_t delta)
    : params_(params), gamma_(params.gamma()), range_(params.range()), delta_(delta) {}

bool PlacementBuilder::clear_of_boundaries(const Point& p) const {
  for (double v : {p.x / gamma_, p.y / gamma_}) {
    double frac = v - std::floor(v);
    if (frac < kBoundaryMargin || frac > 1.0 - kBoundaryMargin) return false;
  }
  for (const auto& s : stations_) {
    double d = dist(s.pos, p);
    if (d == 0.0) return false;
    if (std::abs(d / range_ - 1.0) < kBoundaryMargin) return false;
  }
  return true;
}

bool PlacementBuilder::try_add(StationId id, const Point& p) {
  auto c = box_of(p, GridSpec(gamma_));
  if (box_count(c) >= delta_) return false;
  if (!clear_of_boundaries(p)) return false;
  stations_.push_back({id, p});
  ++counts_[c];
  return true;
}

bool PlacementBuilder::add_in_box(StationId id, const GridCoord& c, Rng& rng, int attempts) {
  for (int k = 0; k < attempts; ++k) {
    Point p{(static_cast<double>(c.i) + rng.uniform()) * gamma_,
            (static_cast<double>(c.j) + rng.uniform()) * gamma_};
    if (try_add(id, p)) return true;
  }
  return false;
}

std::size_t PlacementBuilder::box_count(const GridCoord& c) const {
  auto it = counts_.find(c);
  return it == counts_.end() ? 0 : it->second;
}

Network PlacementBuilder::network(std::uint32_t id_range) const {
  Network net;
  net.stations = stations_;
  net.id_range = id_range;
  net.delta = delta_;
  return net;
}

std::uint32_t default_id_range(std::size_t n) {
  return std::bit_ceil(static_cast<std::uint32_t>(std::max<std::size_t>(n, 2)));
}

namespace {

std::vector<StationId> draw_ids(std::size_t n, std::uint32_t id_range, Rng& rng) {
  if (n > id_range) throw std::invalid_argument("id range smaller than station count");
  return rng.sample(1, id_range, n);
}

}  // namespace

Network gen_random_network(std::size_t n, double extent, std::uint32_t delta,
                           const ModelParams& params, std::uint64_t seed, std::uint32_t id_range,
                           bool connected, std::size_t max_attempts) {
  if (n < 1) throw std::invalid_argument("need at least one station");
  if (!(extent > 0.0)) throw std::invalid_argument("extent must be positive");
  params.validate();
  if (id_range == 0) id_range = default_id_range(n);
  Rng rng(seed);
  auto ids = draw_ids(n, id_range, rng);
  PlacementBuilder builder(params, delta);
  const double side = extent * params.gamma();
  const double r = params.range();
  std::size_t attempts = 0;
  while (builder.stations().size() < n) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("gen_random_network: resample cap exceeded for n=" +
                               std::to_string(n) + ", extent=" + std::to_string(extent) +
                               ", delta=" + std::to_string(delta));
    }
    Point p{rng.uniform(0.0, side), rng.uniform(0.0, side)};
    if (connected && !builder.stations().empty()) {
      bool linked = std::any_of(builder.stations().begin(), builder.stations().end(),
                                [&](const Station& s) { return dist(s.pos, p) < r; });
      if (!linked) continue;
    }
    builder.try_add(ids[builder.stations().size()], p);
  }
  return builder.network(id_range);
}

Network gen_box_path(std::size_t boxes, std::uint32_t per_box, const ModelParams& params,
                     std::uint64_t seed, std::uint32_t id_range) {
  params.validate();
  auto n = boxes * per_box;
  if (id_range == 0) id_range = default_id_range(n);
  Rng rng(seed);
  auto ids = draw_ids(n, id_range, rng);
  PlacementBuilder builder(params, per_box);
  const double g = params.gamma();
  std::size_t next = 0;
  for (std::size_t k = 0; k < boxes; ++k) {
    // The box centers chain consecutive boxes; the others stay in the middle
    // half so that boxes two apart are out of range.
    Point center{(static_cast<double>(k) + 0.5) * g, 0.5 * g};
    if (!builder.try_add(ids[next], center)) throw std::runtime_error("gen_box_path: placement");
    ++next;
    for (std::uint32_t m = 1; m < per_box; ++m) {
      bool placed = false;
      for (int a = 0; a < 10000 && !placed; ++a) {
        Point p{(static_cast<double>(k) + rng.uniform(0.25, 0.75)) * g,
                rng.uniform(0.25, 0.75) * g};
        placed = builder.try_add(ids[next], p);
      }
      if (!placed) throw std::runtime_error("gen_box_path: placement");
      ++next;
    }
  }
  return builder.network(id_range);
}

Network gen_box_block(std::size_t rows, std::size_t cols, std::uint32_t per_box,
                      const ModelParams& params, std::uint64_t seed, std::uint32_t id_range,
                      std::size_t spacing) {
  params.validate();
  auto n = rows * cols * per_box;
  if (id_range == 0) id_range = default_id_range(n);
  Rng rng(seed);
  auto ids = draw_ids(n, id_range, rng);
  PlacementBuilder builder(params, per_box);
  std::size_t next = 0;
  for (std::size_t a = 0; a < cols; ++a) {
    for (std::size_t b = 0; b < rows; ++b) {
      GridCoord c{static_cast<std::int64_t>(a * spacing), static_cast<std::int64_t>(b * spacing)};
      for (std::uint32_t m = 0; m < per_box; ++m) {
        if (!builder.add_in_box(ids[next++], c, rng)) {
          throw std::runtime_error("gen_box_block: placement");
        }
      }
    }
  }
  return builder.network(id_range);
}

// ---------------------------------------------------------------------------
// Lower-bound family

std::vector<StationId> LowerBoundInstance::row_ids(int row) const {
  std::vector<StationId> out;
  for (auto c : row == 0 ? cols0 : cols1) out.push_back(row == 0 ? c : 2 * delta + c);
  return out;
}

namespace {

// Smallest nonzero |1/i^a - beta * sum_{j in J} 1/j^a| over receivers at
// column q and transmitter column sets of size 1..Delta-1 avoiding q, with i the
// distance (in columns) to the nearest transmitter and J the remaining ones.
double smallest_margin(std::uint32_t delta, const ModelParams& params) {
  const std::uint32_t cols = 2 * delta - 1;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](std::uint32_t q, std::uint32_t mask) {
    std::vector<std::uint32_t> dists;
    for (std::uint32_t c = 0; c < cols; ++c) {
      if (mask >> c & 1U) dists.push_back(c > q ? c - q : q - c);
    }
    std::sort(dists.begin(), dists.end());
    double value = std::pow(double(dists[0]), -params.alpha);
    for (std::size_t k = 1; k < dists.size(); ++k) {
      value -= params.beta * std::pow(double(dists[k]), -params.alpha);
    }
    // Exact ties (value 0) never receive; they are excluded from the margin.
    if (std::abs(value) > 1e-12) best = std::min(best, std::abs(value));
  };
  if (delta <= 10) {
    for (std::uint32_t q = 0; q < cols; ++q) {
      for (std::uint32_t mask = 1; mask < (1U << cols); ++mask) {
        if (mask >> q & 1U) continue;
        if (static_cast<std::uint32_t>(std::popcount(mask)) > delta - 1) continue;
        consider(q, mask);
      }
    }
  } else {
    Rng rng(0x5eed);
    for (int k = 0; k < 1'000'000; ++k) {
      auto q = static_cast<std::uint32_t>(rng.below(cols));
      std::uint32_t mask = 0;
      auto size = 1 + rng.below(delta - 1);
      for (auto c : rng.sample(0, cols - 1, size)) {
        if (c != q) mask |= 1U << c;
      }
      if (mask) consider(q, mask);
    }
  }
  return best;
}

}  // namespace

SpacingBounds lower_bound_spacing(std::uint32_t delta, const ModelParams& params) {
  if (delta < 2) throw std::invalid_argument("lower-bound family needs delta >= 2");
  if (delta > 16) throw std::invalid_argument("lower-bound family supports delta <= 16");
  SpacingBounds b;
  const double r = params.range();
  const double twice = 2.0 * delta;
  b.range_bound = r / twice;
  b.p2_bound = (std::pow(1.0 / params.eps, 1.0 / params.alpha) -
                std::pow(1.0 + params.eps, -1.0 / params.alpha)) /
               twice;
  double c1 = params.beta * params.noise * (1.0 + (1.0 + params.eps) * delta);
  double c2 = smallest_margin(delta, params);
  b.p1_bound = std::isfinite(c2) ? std::pow(c2 / (2.0 * c1), 1.0 / params.alpha)
                                 : std::numeric_limits<double>::infinity();
  b.chosen = 0.9 * std::min({b.range_bound, b.p2_bound, b.p1_bound});
  return b;
}

LowerBoundInstance gen_lower_bound_instance(std::uint32_t delta, const ModelParams& params,
                                            std::uint64_t seed) {
  params.validate();
  LowerBoundInstance inst;
  inst.delta = delta;
  inst.spacing = lower_bound_spacing(delta, params).chosen;
  const std::uint32_t cols = 2 * delta - 1;
  Rng rng(seed);
  inst.bridge = 1 + static_cast<std::uint32_t>(rng.below(cols));
  std::vector<std::uint32_t> others;
  for (std::uint32_t c = 1; c <= cols; ++c) {
    if (c != inst.bridge) others.push_back(c);
  }
  rng.shuffle(others);
  // X1 takes the bridge and every column X0 leaves free.
  inst.cols0.assign(others.begin(), others.begin() + (delta - 1));
  inst.cols0.push_back(inst.bridge);
  inst.cols1.assign(others.begin() + (delta - 1), others.end());
  inst.cols1.push_back(inst.bridge);
  std::sort(inst.cols0.begin(), inst.cols0.end());
  std::sort(inst.cols1.begin(), inst.cols1.end());

  // The upper row sits just inside range so the bridge edge is not decided
  // by rounding.
  const double upper = params.range() * (1.0 - kBoundaryMargin);
  inst.network.id_range = 4 * delta - 1;
  inst.network.delta = delta;
  for (auto c : inst.cols0) {
    inst.network.stations.push_back({c, {(c - 1) * inst.spacing, 0.0}});
  }
  for (auto c : inst.cols1) {
    inst.network.stations.push_back({2 * delta + c, {(c - 1) * inst.spacing, upper}});
  }
  return inst;
}

P1P2Report check_p1_p2(const LowerBoundInstance& inst, const ModelParams& params,
                       std::uint64_t budget, std::uint64_t seed) {
  const auto& net = inst.network;
  Channel ch(net, params);
  const std::uint32_t k = inst.delta;
  // Station indices of each row; rows are stored X0 first, then X1.
  std::vector<std::size_t> row0, row1;
  for (std::size_t i = 0; i < net.size(); ++i) (i < k ? row0 : row1).push_back(i);

  auto members = [](const std::vector<std::size_t>& row, std::uint64_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < row.size(); ++b) {
      if (mask >> b & 1U) out.push_back(row[b]);
    }
    return out;
  };
  auto outcome = [&](const std::vector<std::size_t>& tx) {
    std::vector<long> heard(net.size(), -1);
    for (auto [u, v] : ch.receptions(tx)) heard[u] = static_cast<long>(v);
    return heard;
  };
  auto ids_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<StationId> out;
    for (auto i : idx) out.push_back(net.stations[i].id);
    return out;
  };

  P1P2Report report;
  const std::uint64_t per_row = std::uint64_t{1} << k;
  const std::uint64_t total = per_row * per_row;
  report.exhaustive = total <= std::max<std::uint64_t>(budget, 1024);
  std::vector<std::vector<long>> alone0(per_row), alone1(per_row);
  for (std::uint64_t m = 0; m < per_row; ++m) {
    alone0[m] = outcome(members(row0, m));
    alone1[m] = outcome(members(row1, m));
  }

  Rng rng(seed);
  auto check = [&](std::uint64_t m0, std::uint64_t m1) {
    auto t0 = members(row0, m0);
    auto t1 = members(row1, m1);
    auto tx = t0;
    tx.insert(tx.end(), t1.begin(), t1.end());
    auto full = outcome(tx);
    ++report.patterns;
    auto p1 = [&](const std::vector<std::size_t>& row, const std::vector<std::size_t>& own,
                  const std::vector<long>& alone) {
      if (own.empty()) return;
      ++report.p1_checked;
      for (auto x : row) {
        if (full[x] != alone[x]) {
          report.violations.push_back({ids_of(t0), ids_of(t1), "P1",
                                       "station " + std::to_string(net.stations[x].id) +
                                           " changes outcome under cross-row traffic"});
        }
      }
    };
    p1(row0, t0, alone0[m0]);
    p1(row1, t1, alone1[m1]);
    auto p2 = [&](const std::vector<std::size_t>& senders, const std::vector<std::size_t>& far) {
      if (senders.size() < 2) return;
      ++report.p2_checked;
      for (auto x : far) {
        if (full[x] >= 0 &&
            std::find(senders.begin(), senders.end(), static_cast<std::size_t>(full[x])) !=
                senders.end()) {
          report.violations.push_back({ids_of(t0), ids_of(t1), "P2",
                                       "station " + std::to_string(net.stations[x].id) +
                                           " hears a multi-transmitter row"});
        }
      }
    };
    p2(t0, row1);
    p2(t1, row0);
  };

  if (report.exhaustive) {
    for (std::uint64_t m0 = 0; m0 < per_row; ++m0) {
      for (std::uint64_t m1 = 0; m1 < per_row; ++m1) check(m0, m1);
    }
  } else {
    for (std::uint64_t s = 0; s < budget; ++s) check(rng.below(per_row), rng.below(per_row));
  }
  return report;
}

}  // namespace sinr
