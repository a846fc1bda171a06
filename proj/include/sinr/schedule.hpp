#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "sinr/geometry.hpp"
#include "sinr/phy.hpp"

namespace sinr {

/// Mapping from [N] to bit rows of length T. Rounds are 1-indexed.
class ClassicalSchedule {
 public:
  ClassicalSchedule(std::uint32_t id_range, std::uint32_t length);

  std::uint32_t id_range() const { return id_range_; }
  std::uint32_t length() const { return length_; }

  bool bit(StationId id, std::uint32_t t) const;
  void set(StationId id, std::uint32_t t, bool value = true);
  std::size_t popcount(StationId id) const;

  friend bool operator==(const ClassicalSchedule&, const ClassicalSchedule&) = default;

 private:
  std::size_t word_index(StationId id, std::uint32_t t) const;

  std::uint32_t id_range_;
  std::uint32_t length_;
  std::size_t words_per_row_;
  std::vector<std::uint64_t> bits_;
};

/// Mapping from [N] x [0,delta-1]^2 to bit rows of length T. Rows are kept
/// as sorted lists of set (0-based) positions since selector rows are sparse.
class GeometricSchedule {
 public:
  GeometricSchedule(std::uint32_t id_range, std::uint32_t delta, std::uint32_t length);

  std::uint32_t id_range() const { return id_range_; }
  std::uint32_t delta() const { return delta_; }
  std::uint32_t length() const { return length_; }

  bool bit(StationId id, std::uint32_t a, std::uint32_t b, std::uint32_t t) const;
  void set(StationId id, std::uint32_t a, std::uint32_t b, std::uint32_t t);
  /// 0-based positions of the set bits of row (id, a, b), ascending.
  const std::vector<std::uint32_t>& ones(StationId id, std::uint32_t a, std::uint32_t b) const;
  std::size_t popcount(StationId id) const;

  /// Set when this schedule was produced by dilute(); lets serialization
  /// store the compact classical form.
  const ClassicalSchedule* base() const { return base_.empty() ? nullptr : &base_.front(); }

  friend bool operator==(const GeometricSchedule& a, const GeometricSchedule& b) {
    return a.id_range_ == b.id_range_ && a.delta_ == b.delta_ && a.length_ == b.length_ &&
           a.rows_ == b.rows_;
  }

 private:
  friend GeometricSchedule dilute(const ClassicalSchedule&, std::uint32_t, const GridSpec&);
  std::size_t row_index(StationId id, std::uint32_t a, std::uint32_t b) const;

  std::uint32_t id_range_;
  std::uint32_t delta_;
  std::uint32_t length_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<ClassicalSchedule> base_;  // zero or one element
};

/// Largest schedule (in id-rows times length) accepted by the constructors.
inline constexpr std::uint64_t kMaxScheduleCells = std::uint64_t{1} << 34;

/// delta-dilution: bit (t-1) delta^2 + a delta + b of row (v,a,b) equals bit
/// t of the classical row of v; every other bit is 0. The grid only fixes the
/// residue classes a station follows at run time.
GeometricSchedule dilute(const ClassicalSchedule& s, std::uint32_t delta, const GridSpec& g);

/// Ids (ascending) of stations transmitting in round t (1-indexed).
std::vector<StationId> transmitters_at(const GeometricSchedule& s, const Network& net,
                                       const GridSpec& g, std::uint32_t t);

/// Per-round transmitter lists (station indices, ascending), index 0 holding
/// round 1.
std::vector<std::vector<std::size_t>> round_buckets(const GeometricSchedule& s,
                                                    const Network& net, const GridSpec& g);

using ActivePredicate = std::function<bool(const Station&, std::uint32_t round)>;

/// Executes every round of s, letting a scheduled station transmit only while
/// `active` holds for it. Payloads default to the sender id.
std::vector<RoundOutcome<std::int64_t>> run_schedule(const GeometricSchedule& s,
                                                     const Network& net,
                                                     const ActivePredicate& active,
                                                     const std::map<StationId, std::int64_t>& payload,
                                                     const ModelParams& params);

struct DilutionCheck {
  bool ok = false;
  double worst_sinr = 0.0;  // over all probes
};

/// Worst-case test of one dilution parameter: a K x K lattice of boxes at
/// spacing delta, one transmitter per box, every interferer pushed to the point
/// of its box nearest the probed receiver of the central transmitter.
DilutionCheck check_dilution(const ModelParams& params, std::uint32_t delta, std::uint32_t extent);

struct DilutionCalibration {
  std::uint32_t d = 0;                                  // max over extents
  std::map<std::uint32_t, std::uint32_t> per_extent;    // extent -> minimal passing delta
  bool stable = false;                                  // identical across extents
};

/// Minimal dilution parameter for which simultaneous transmission of a
/// diluted, one-per-box set is successful, searched over delta = 1..ceiling
/// and the given lattice extents. Results are cached per parameter set.
DilutionCalibration calibrate_dilution(const ModelParams& params,
                                       std::vector<std::uint32_t> extents = {8, 16, 32, 64});

/// Calibrated constant used as delta' by the backbone protocols. For
/// alpha = 2 the constant grows with the network extent (in boxes).
std::uint32_t dilution_constant(const ModelParams& params, std::uint32_t network_extent = 64);

}  // namespace sinr
