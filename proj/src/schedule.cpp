#include "sinr/schedule.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace sinr {

// ---------------------------------------------------------------------------
// ClassicalSchedule

ClassicalSchedule::ClassicalSchedule(std::uint32_t id_range, std::uint32_t length)
    : id_range_(id_range), length_(length), words_per_row_((length + 63) / 64) {
  if (static_cast<std::uint64_t>(id_range) * length > kMaxScheduleCells) {
    throw std::length_error("classical schedule exceeds the size guard");
  }
  bits_.assign(static_cast<std::size_t>(id_range) * words_per_row_, 0);
}

std::size_t ClassicalSchedule::word_index(StationId id, std::uint32_t t) const {
  if (id < 1 || id > id_range_) throw std::out_of_range("schedule id out of range");
  if (t < 1 || t > length_) throw std::out_of_range("schedule round out of range");
  return static_cast<std::size_t>(id - 1) * words_per_row_ + (t - 1) / 64;
}

bool ClassicalSchedule::bit(StationId id, std::uint32_t t) const {
  return (bits_[word_index(id, t)] >> ((t - 1) % 64)) & 1U;
}

void ClassicalSchedule::set(StationId id, std::uint32_t t, bool value) {
  auto& w = bits_[word_index(id, t)];
  auto mask = std::uint64_t{1} << ((t - 1) % 64);
  w = value ? (w | mask) : (w & ~mask);
}

std::size_t ClassicalSchedule::popcount(StationId id) const {
  if (id < 1 || id > id_range_) throw std::out_of_range("schedule id out of range");
  std::size_t n = 0;
  auto first = static_cast<std::size_t>(id - 1) * words_per_row_;
  for (std::size_t k = 0; k < words_per_row_; ++k) n += std::popcount(bits_[first + k]);
  return n;
}

// ---------------------------------------------------------------------------
// GeometricSchedule

GeometricSchedule::GeometricSchedule(std::uint32_t id_range, std::uint32_t delta,
                                     std::uint32_t length)
    : id_range_(id_range), delta_(delta), length_(length) {
  if (delta < 1) throw std::invalid_argument("dilution parameter must be >= 1");
  auto rows = static_cast<std::uint64_t>(id_range) * delta * delta;
  if (rows * length > kMaxScheduleCells * 64) {
    throw std::length_error("geometric schedule exceeds the size guard");
  }
  rows_.resize(static_cast<std::size_t>(rows));
}

std::size_t GeometricSchedule::row_index(StationId id, std::uint32_t a, std::uint32_t b) const {
  if (id < 1 || id > id_range_) throw std::out_of_range("schedule id out of range");
  if (a >= delta_ || b >= delta_) throw std::out_of_range("residue class out of range");
  return (static_cast<std::size_t>(id - 1) * delta_ + a) * delta_ + b;
}

bool GeometricSchedule::bit(StationId id, std::uint32_t a, std::uint32_t b,
                            std::uint32_t t) const {
  if (t < 1 || t > length_) throw std::out_of_range("schedule round out of range");
  const auto& row = rows_[row_index(id, a, b)];
  return std::binary_search(row.begin(), row.end(), t - 1);
}

void GeometricSchedule::set(StationId id, std::uint32_t a, std::uint32_t b, std::uint32_t t) {
  if (t < 1 || t > length_) throw std::out_of_range("schedule round out of range");
  auto& row = rows_[row_index(id, a, b)];
  auto it = std::lower_bound(row.begin(), row.end(), t - 1);
  if (it == row.end() || *it != t - 1) row.insert(it, t - 1);
  base_.clear();
}

const std::vector<std::uint32_t>& GeometricSchedule::ones(StationId id, std::uint32_t a,
                                                          std::uint32_t b) const {
  return rows_[row_index(id, a, b)];
}

std::size_t GeometricSchedule::popcount(StationId id) const {
  std::size_t n = 0;
  for (std::uint32_t a = 0; a < delta_; ++a) {
    for (std::uint32_t b = 0; b < delta_; ++b) n += ones(id, a, b).size();
  }
  return n;
}

GeometricSchedule dilute(const ClassicalSchedule& s, std::uint32_t delta, const GridSpec&) {
  if (delta < 1) throw std::invalid_argument("dilution parameter must be >= 1");
  auto block = static_cast<std::uint64_t>(delta) * delta;
  if (block * s.length() > UINT32_MAX) throw std::length_error("diluted schedule too long");
  GeometricSchedule out(s.id_range(), delta, static_cast<std::uint32_t>(block * s.length()));
  for (StationId v = 1; v <= s.id_range(); ++v) {
    for (std::uint32_t t = 1; t <= s.length(); ++t) {
      if (!s.bit(v, t)) continue;
      auto first = static_cast<std::uint32_t>((t - 1) * block);
      for (std::uint32_t a = 0; a < delta; ++a) {
        for (std::uint32_t b = 0; b < delta; ++b) {
          out.rows_[out.row_index(v, a, b)].push_back(first + a * delta + b);
        }
      }
    }
  }
  out.base_.push_back(s);
  return out;
}

namespace {

std::pair<std::uint32_t, std::uint32_t> residue(const Point& p, const GridSpec& g,
                                                std::uint32_t delta) {
  auto c = box_of(p, g);
  return {static_cast<std::uint32_t>(floor_mod(c.i, delta)),
          static_cast<std::uint32_t>(floor_mod(c.j, delta))};
}

}  // namespace

std::vector<StationId> transmitters_at(const GeometricSchedule& s, const Network& net,
                                       const GridSpec& g, std::uint32_t t) {
  if (t < 1 || t > s.length()) throw std::out_of_range("schedule round out of range");
  std::vector<StationId> out;
  for (const auto& st : net.stations) {
    if (st.id > s.id_range()) continue;
    auto [a, b] = residue(st.pos, g, s.delta());
    if (s.bit(st.id, a, b, t)) out.push_back(st.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> round_buckets(const GeometricSchedule& s,
                                                    const Network& net, const GridSpec& g) {
  std::vector<std::vector<std::size_t>> buckets(s.length());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& st = net.stations[i];
    if (st.id > s.id_range()) continue;
    auto [a, b] = residue(st.pos, g, s.delta());
    for (auto p : s.ones(st.id, a, b)) buckets[p].push_back(i);
  }
  return buckets;
}

std::vector<RoundOutcome<std::int64_t>> run_schedule(
    const GeometricSchedule& s, const Network& net, const ActivePredicate& active,
    const std::map<StationId, std::int64_t>& payload, const ModelParams& params) {
  Channel ch(net, params);
  auto buckets = round_buckets(s, net, pivotal_grid(params));
  std::vector<RoundOutcome<std::int64_t>> trace(s.length());
  std::vector<std::size_t> tx;
  for (std::uint32_t t = 1; t <= s.length(); ++t) {
    tx.clear();
    for (auto i : buckets[t - 1]) {
      if (!active || active(net.stations[i], t)) tx.push_back(i);
    }
    for (auto [u, v] : ch.receptions(tx)) {
      auto sender = net.stations[v].id;
      auto it = payload.find(sender);
      trace[t - 1].received.emplace(
          net.stations[u].id,
          Reception<std::int64_t>{sender, it == payload.end() ? std::int64_t{sender} : it->second});
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Dilution calibration

DilutionCheck check_dilution(const ModelParams& params, std::uint32_t delta,
                             std::uint32_t extent) {
  const double r = params.range();
  const double c = params.gamma();
  const double margin = 1e-6 * c;
  const double sensitivity = (1.0 + params.eps) * params.beta * params.noise;
  const auto center = static_cast<std::int64_t>(extent / 2);

  // Transmitter positions sampled over the central box, receivers on the
  // boundary of its range in 32 directions.
  std::vector<double> fractions{1e-6, 0.25, 0.5, 0.75, 1.0 - 1e-6};
  const double home_x = static_cast<double>(center * delta) * c;
  const double home_y = home_x;
  constexpr int kDirections = 32;

  DilutionCheck result{true, std::numeric_limits<double>::infinity()};
  for (double fx : fractions) {
    for (double fy : fractions) {
      Point v{home_x + fx * c, home_y + fy * c};
      for (int k = 0; k < kDirections; ++k) {
        double theta = 2.0 * std::numbers::pi * k / kDirections;
        double reach = r * (1.0 - 1e-6);
        Point u{v.x + reach * std::cos(theta), v.y + reach * std::sin(theta)};
        double signal = received_power(v, u, params);
        double interference = 0.0;
        bool colocated = false;
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(extent) && !colocated; ++a) {
          for (std::int64_t b = 0; b < static_cast<std::int64_t>(extent); ++b) {
            if (a == center && b == center) continue;
            double x0 = static_cast<double>(a * delta) * c;
            double y0 = static_cast<double>(b * delta) * c;
            Point w{std::clamp(u.x, x0 + margin, x0 + c - margin),
                    std::clamp(u.y, y0 + margin, y0 + c - margin)};
            if (u.x >= x0 && u.x < x0 + c && u.y >= y0 && u.y < y0 + c) {
              colocated = true;
              break;
            }
            interference += received_power(w, u, params);
          }
        }
        double value = colocated ? 0.0 : signal / (params.noise + interference);
        result.worst_sinr = std::min(result.worst_sinr, value);
        if (colocated || value < params.beta || signal < sensitivity) result.ok = false;
      }
    }
  }
  return result;
}

namespace {

std::uint32_t search_ceiling(const ModelParams& params, std::uint32_t extent) {
  if (params.alpha > 2.0) return 32;
  return 32 + 8 * static_cast<std::uint32_t>(std::ceil(std::log2(std::max(2U, extent))));
}

std::uint32_t minimal_delta(const ModelParams& params, std::uint32_t extent) {
  auto ceiling = search_ceiling(params, extent);
  for (std::uint32_t d = 1; d <= ceiling; ++d) {
    if (check_dilution(params, d, extent).ok) return d;
  }
  throw std::runtime_error("no dilution parameter up to " + std::to_string(ceiling) +
                           " makes diluted transmission successful");
}

}  // namespace

DilutionCalibration calibrate_dilution(const ModelParams& params,
                                       std::vector<std::uint32_t> extents) {
  params.validate();
  using Key = std::tuple<double, double, double, double, double, std::vector<std::uint32_t>>;
  static std::mutex mutex;
  static std::map<Key, DilutionCalibration> cache;
  Key key{params.alpha, params.beta, params.noise, params.eps, params.power, extents};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  DilutionCalibration cal;
  for (auto k : extents) {
    auto d = minimal_delta(params, k);
    cal.per_extent[k] = d;
    cal.d = std::max(cal.d, d);
  }
  cal.stable = std::all_of(cal.per_extent.begin(), cal.per_extent.end(),
                           [&](const auto& kv) { return kv.second == cal.d; });
  std::lock_guard lock(mutex);
  cache.emplace(key, cal);
  return cal;
}

std::uint32_t dilution_constant(const ModelParams& params, std::uint32_t network_extent) {
  if (params.alpha > 2.0) return calibrate_dilution(params).d;
  return calibrate_dilution(params, {std::max(8U, network_extent)}).d;
}

}  // namespace sinr
