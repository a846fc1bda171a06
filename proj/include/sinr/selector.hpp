#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sinr/phy.hpp"
#include "sinr/schedule.hpp"

namespace sinr {

enum class AlphaRegime { Steep, Square };  // alpha > 2, alpha = 2

/// Parameters of an (N, delta, Delta, eps_fraction)-SINR-selector candidate.
struct SelectorSpec {
  std::uint32_t id_range = 256;     // N
  std::uint32_t delta_density = 8;  // Delta, stations per pivotal box
  double eps_fraction = 0.5;        // required success fraction
  AlphaRegime regime = AlphaRegime::Steep;
  std::uint32_t dilution = 1;       // delta
  std::uint32_t length = 0;         // classical length T
  std::uint32_t c_len = 8;
  double c_d = 4.0;
  std::uint32_t retry_cap = 16;

  void validate() const;
};

/// ceil(log2 N), at least 1.
std::uint32_t log2_ceil(std::uint32_t n);

/// Fills regime, classical length C_len * Delta * ceil(log2 N) and the dilution
/// max(d_const, ceil((C_d ln N)^(1/alpha))) (exponent 2/alpha when alpha = 2).
SelectorSpec make_selector_spec(std::uint32_t id_range, std::uint32_t delta_density,
                                const ModelParams& params, std::uint32_t c_len = 8,
                                double c_d = 4.0, std::uint32_t network_extent = 64);

/// Classical schedule whose bits are independent Bernoulli(1/Delta) draws.
ClassicalSchedule sample_candidate(const SelectorSpec& spec, std::uint64_t seed);

/// dilute(sample_candidate(spec, seed), spec.dilution).
GeometricSchedule build_selector(const SelectorSpec& spec, std::uint64_t seed,
                                 const ModelParams& params);

struct SelectorReport {
  std::string placement;
  std::size_t size_a = 0;
  std::size_t successes_a = 0;
  std::size_t size_b = 0;
  std::size_t successes_b = 0;
  bool pass_a = false;
  bool pass_b = false;
  /// (round, station id) of every successful transmission, in round order.
  std::vector<std::pair<std::uint32_t, StationId>> successes;

  double fraction_a() const { return size_a ? double(successes_a) / double(size_a) : 1.0; }
  double fraction_b() const { return size_b ? double(successes_b) / double(size_b) : 1.0; }
};

/// Runs s with exactly the stations of `active_set` participating. A station
/// succeeds if in some round it transmits and every communication-graph
/// neighbor hears it.
SelectorReport verify_selector(const GeometricSchedule& s, const Network& net,
                               const std::set<StationId>& active_set, const SelectorSpec& spec,
                               const ModelParams& params);

struct CertifyExhibit {
  std::string family;
  Network network;
  std::set<StationId> active_set;
  SelectorReport report;
};

struct CertifyReport {
  bool pass = true;
  std::size_t trials = 0;
  double min_fraction_a = 1.0;
  double min_fraction_b = 1.0;
  std::vector<SelectorReport> reports;
  std::optional<CertifyExhibit> counterexample;  // first failing trial
};

/// Trial battery over random and adversarial placements; see
/// certification_placement() for the families.
CertifyReport certify(const GeometricSchedule& s, const SelectorSpec& spec, std::uint64_t seed,
                      const ModelParams& params, std::size_t trials);

/// Builds the selector for `seed` and certifies it.
CertifyReport certify(const SelectorSpec& spec, std::uint64_t seed, const ModelParams& params,
                      std::size_t trials);

struct CertifiedSelector {
  GeometricSchedule schedule;
  std::uint64_t seed = 0;  // seed that passed
  std::uint32_t resamples = 0;
  CertifyReport report;
};

/// Samples with seed, seed+1, ... until certification passes or the retry cap
/// is hit (then throws std::runtime_error).
CertifiedSelector build_certified_selector(const SelectorSpec& spec, std::uint64_t seed,
                                           const ModelParams& params, std::size_t trials);

/// Placement and active set of certification trial number `trial`.
struct TrialPlacement {
  std::string family;
  Network network;
  std::set<StationId> active_set;
};
TrialPlacement certification_placement(const SelectorSpec& spec, const ModelParams& params,
                                       std::uint64_t seed, std::size_t trial);

}  // namespace sinr
