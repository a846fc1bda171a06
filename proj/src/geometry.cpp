#include "sinr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sinr/phy.hpp"

namespace sinr {

GridSpec::GridSpec(double cell) : cell_(cell) {
  if (!(cell > 0.0) || !std::isfinite(cell)) {
    throw std::invalid_argument("grid cell must be a positive finite length");
  }
}

double dist(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

GridCoord box_of(const Point& p, const GridSpec& g) {
  return {static_cast<std::int64_t>(std::floor(p.x / g.cell())),
          static_cast<std::int64_t>(std::floor(p.y / g.cell()))};
}

double range_of(const ModelParams& params) {
  return std::pow(params.power / ((1.0 + params.eps) * params.beta * params.noise),
                  1.0 / params.alpha);
}

double pivotal_gamma(const ModelParams& params) { return range_of(params) / std::sqrt(2.0); }

GridSpec pivotal_grid(const ModelParams& params) { return GridSpec(pivotal_gamma(params)); }

double box_gap(const GridCoord& offset, double cell) {
  auto gx = std::max<std::int64_t>(0, std::abs(offset.i) - 1);
  auto gy = std::max<std::int64_t>(0, std::abs(offset.j) - 1);
  return cell * std::hypot(static_cast<double>(gx), static_cast<double>(gy));
}

namespace {

std::vector<GridCoord> compute_dir() {
  // In units of the cell side the range is sqrt(2), so the test
  // gap^2 < 2 is exact in integers. A gap equal to the range is never
  // attained because boxes exclude their right and top sides.
  std::vector<GridCoord> out;
  for (std::int64_t d1 = -2; d1 <= 2; ++d1) {
    for (std::int64_t d2 = -2; d2 <= 2; ++d2) {
      if (d1 == 0 && d2 == 0) continue;
      auto gx = std::max<std::int64_t>(0, std::abs(d1) - 1);
      auto gy = std::max<std::int64_t>(0, std::abs(d2) - 1);
      if (gx * gx + gy * gy < 2) out.push_back({d1, d2});
    }
  }
  return out;
}

}  // namespace

std::vector<GridCoord> dir_set() {
  static const std::vector<GridCoord> dir = compute_dir();
  return dir;
}

int dir_index(const GridCoord& offset) {
  static const std::vector<GridCoord> dir = compute_dir();
  auto it = std::find(dir.begin(), dir.end(), offset);
  return it == dir.end() ? -1 : static_cast<int>(it - dir.begin());
}

bool is_diluted(std::span<const GridCoord> coords, std::int64_t delta) {
  if (delta < 1) throw std::invalid_argument("dilution parameter must be >= 1");
  if (coords.empty()) return true;
  const auto& ref = coords.front();
  // Pairwise congruence is equivalent to congruence with one reference.
  return std::all_of(coords.begin(), coords.end(), [&](const GridCoord& c) {
    return floor_mod(c.i - ref.i, delta) == 0 && floor_mod(c.j - ref.j, delta) == 0;
  });
}

}  // namespace sinr
