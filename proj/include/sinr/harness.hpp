#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sinr/phy.hpp"
#include "sinr/rng.hpp"
#include "sinr/selector.hpp"

namespace sinr {

/// Relative distance every generated station keeps from decision boundaries
/// (grid lines and range circles of other stations).
inline constexpr double kBoundaryMargin = 1e-6;

/// Incremental placement that enforces the per-box bound and the boundary
/// margins.
class PlacementBuilder {
 public:
  PlacementBuilder(const ModelParams& params, std::uint32_t delta);

  /// Adds a station at p if it respects the margins and the box has room.
  bool try_add(StationId id, const Point& p);
  /// Uniform point in box c, resampled until it can be added.
  bool add_in_box(StationId id, const GridCoord& c, Rng& rng, int attempts = 1000);

  std::size_t box_count(const GridCoord& c) const;
  const std::vector<Station>& stations() const { return stations_; }
  Network network(std::uint32_t id_range) const;

 private:
  bool clear_of_boundaries(const Point& p) const;

  ModelParams params_;
  double gamma_;
  double range_;
  std::uint32_t delta_;
  std::vector<Station> stations_;
  std::map<GridCoord, std::size_t> counts_;
};

/// Smallest power of two that is at least max(n, 2).
std::uint32_t default_id_range(std::size_t n);

/// n stations placed uniformly in [0, extent*gamma)^2 with at most delta per
/// pivotal box and distinct random ids from [1, id_range]. With `connected`,
/// each station after the first is accepted only within range of an earlier
/// one, so the communication graph is connected. Throws std::runtime_error
/// when the resample cap is exceeded.
Network gen_random_network(std::size_t n, double extent, std::uint32_t delta,
                           const ModelParams& params, std::uint64_t seed,
                           std::uint32_t id_range = 0, bool connected = true,
                           std::size_t max_attempts = 2'000'000);

/// `boxes` consecutive pivotal boxes along the x axis, `per_box` stations in
/// each; consecutive boxes are neighbors, boxes two apart are not.
Network gen_box_path(std::size_t boxes, std::uint32_t per_box, const ModelParams& params,
                     std::uint64_t seed, std::uint32_t id_range = 0);

/// rows x cols block of boxes, `per_box` stations in each.
Network gen_box_block(std::size_t rows, std::size_t cols, std::uint32_t per_box,
                      const ModelParams& params, std::uint64_t seed, std::uint32_t id_range = 0,
                      std::size_t spacing = 1);

// ---------------------------------------------------------------------------
// Lower-bound family: two rows of 2*Delta-1 candidate points, Delta chosen in
// each row, exactly one shared column.

struct LowerBoundInstance {
  std::uint32_t delta = 0;
  double spacing = 0.0;               // d
  std::vector<std::uint32_t> cols0;   // p(X0), ascending, 1-based columns
  std::vector<std::uint32_t> cols1;   // p(X1)
  std::uint32_t bridge = 0;           // the shared column
  Network network;

  /// Station ids of row i in column order.
  std::vector<StationId> row_ids(int row) const;
};

struct SpacingBounds {
  double range_bound = 0.0;   // r / (2 Delta)
  double p2_bound = 0.0;      // ((1/eps)^(1/alpha) - (1+eps)^(-1/alpha)) / (2 Delta)
  double p1_bound = 0.0;      // (c2 / (2 c1))^(1/alpha)
  double chosen = 0.0;        // 0.9 * min of the three
};

SpacingBounds lower_bound_spacing(std::uint32_t delta, const ModelParams& params);

LowerBoundInstance gen_lower_bound_instance(std::uint32_t delta, const ModelParams& params,
                                            std::uint64_t seed);

struct PatternViolation {
  std::vector<StationId> t0;
  std::vector<StationId> t1;
  std::string property;  // "P1" or "P2"
  std::string detail;
};

struct P1P2Report {
  bool exhaustive = false;
  std::uint64_t patterns = 0;
  std::uint64_t p1_checked = 0;
  std::uint64_t p2_checked = 0;
  std::vector<PatternViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// (P1): with T_i nonempty, every X_i station's round result is the same as
/// with T_{1-i} empty. (P2): with |T_i| >= 2 no X_{1-i} station receives from
/// X_i. Exhaustive when 2^(2 Delta) <= budget, sampled otherwise.
P1P2Report check_p1_p2(const LowerBoundInstance& inst, const ModelParams& params,
                       std::uint64_t budget = 10'000, std::uint64_t seed = 1);

}  // namespace sinr
