#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sinr {

struct ModelParams;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Coordinates (i, j) of the grid box with bottom-left corner (c*i, c*j).
struct GridCoord {
  std::int64_t i = 0;
  std::int64_t j = 0;
  friend auto operator<=>(const GridCoord&, const GridCoord&) = default;
  GridCoord operator+(const GridCoord& o) const { return {i + o.i, j + o.j}; }
  GridCoord operator-(const GridCoord& o) const { return {i - o.i, j - o.j}; }
  GridCoord operator-() const { return {-i, -j}; }
};

struct GridCoordHash {
  std::size_t operator()(const GridCoord& c) const noexcept {
    auto h = static_cast<std::uint64_t>(c.i) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(c.j) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Axis-aligned partition of the plane into half-open cell x cell boxes.
class GridSpec {
 public:
  explicit GridSpec(double cell);
  double cell() const { return cell_; }

 private:
  double cell_;
};

double dist(const Point& p, const Point& q);

/// Box containing p. A box includes its left and bottom sides only.
GridCoord box_of(const Point& p, const GridSpec& g);

/// Range r = (P / ((1+eps) beta N))^(1/alpha) of a lone transmitter.
double range_of(const ModelParams& params);

/// Side of the pivotal grid, r / sqrt(2).
double pivotal_gamma(const ModelParams& params);

GridSpec pivotal_grid(const ModelParams& params);

/// Infimum Euclidean distance between the boxes C(0,0) and C(d1,d2) of a
/// grid with the given cell size.
double box_gap(const GridCoord& offset, double cell);

/// Offsets (d1,d2) in [-2,2]^2 \ {(0,0)} at which two pivotal-grid boxes can
/// hold stations within range of each other. Derived geometrically: an offset
/// qualifies iff the inter-box gap is strictly below r = cell * sqrt(2).
std::vector<GridCoord> dir_set();

/// Index of an offset in dir_set(), or -1.
int dir_index(const GridCoord& offset);

bool is_diluted(std::span<const GridCoord> coords, std::int64_t delta);

/// Nonnegative residue of v modulo m (m > 0).
inline std::int64_t floor_mod(std::int64_t v, std::int64_t m) {
  auto r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace sinr
