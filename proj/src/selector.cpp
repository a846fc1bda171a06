#include "sinr/selector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "sinr/harness.hpp"
#include "sinr/rng.hpp"

namespace sinr {

void SelectorSpec::validate() const {
  if (id_range < 1) throw std::invalid_argument("selector id range must be >= 1");
  if (delta_density < 1) throw std::invalid_argument("selector density bound must be >= 1");
  if (!(eps_fraction > 0.0 && eps_fraction <= 1.0)) {
    throw std::invalid_argument("eps_fraction must lie in (0, 1]");
  }
  if (dilution < 1) throw std::invalid_argument("selector dilution must be >= 1");
}

std::uint32_t log2_ceil(std::uint32_t n) {
  if (n <= 2) return 1;
  return static_cast<std::uint32_t>(std::bit_width(n - 1));
}

SelectorSpec make_selector_spec(std::uint32_t id_range, std::uint32_t delta_density,
                                const ModelParams& params, std::uint32_t c_len, double c_d,
                                std::uint32_t network_extent) {
  params.validate();
  SelectorSpec spec;
  spec.id_range = id_range;
  spec.delta_density = delta_density;
  spec.c_len = c_len;
  spec.c_d = c_d;
  spec.regime = params.alpha > 2.0 ? AlphaRegime::Steep : AlphaRegime::Square;
  spec.length = c_len * delta_density * log2_ceil(id_range);
  double exponent = spec.regime == AlphaRegime::Steep ? 1.0 / params.alpha : 2.0 / params.alpha;
  double log_n = std::log(std::max<double>(id_range, 2.0));
  auto from_n = static_cast<std::uint32_t>(std::ceil(std::pow(c_d * log_n, exponent)));
  spec.dilution = std::max(dilution_constant(params, network_extent), from_n);
  spec.validate();
  return spec;
}

ClassicalSchedule sample_candidate(const SelectorSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.length == 0) throw std::invalid_argument("selector length is zero");
  ClassicalSchedule s(spec.id_range, spec.length);
  Rng rng(seed);
  const double p = 1.0 / spec.delta_density;
  for (StationId v = 1; v <= spec.id_range; ++v) {
    for (std::uint32_t t = 1; t <= spec.length; ++t) {
      if (rng.bernoulli(p)) s.set(v, t);
    }
  }
  return s;
}

GeometricSchedule build_selector(const SelectorSpec& spec, std::uint64_t seed,
                                 const ModelParams& params) {
  return dilute(sample_candidate(spec, seed), spec.dilution, pivotal_grid(params));
}

SelectorReport verify_selector(const GeometricSchedule& s, const Network& net,
                               const std::set<StationId>& active_set, const SelectorSpec& spec,
                               const ModelParams& params) {
  Channel ch(net, params);
  auto grid = pivotal_grid(params);
  std::vector<char> active(net.size(), 0);
  std::map<GridCoord, std::size_t> per_box;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (active_set.count(net.stations[i].id)) {
      active[i] = 1;
      ++per_box[box_of(net.stations[i].pos, grid)];
    }
  }

  SelectorReport rep;
  std::vector<char> in_b(net.size(), 0), succeeded(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!active[i]) continue;
    ++rep.size_a;
    if (per_box[box_of(net.stations[i].pos, grid)] >= 2) {
      in_b[i] = 1;
      ++rep.size_b;
    }
  }

  auto buckets = round_buckets(s, net, grid);
  std::vector<std::size_t> tx;
  for (std::uint32_t t = 1; t <= s.length(); ++t) {
    tx.clear();
    for (auto i : buckets[t - 1]) {
      if (active[i]) tx.push_back(i);
    }
    for (auto v : tx) {
      const auto& nbrs = ch.neighbors(v);
      bool ok = std::all_of(nbrs.begin(), nbrs.end(), [&](std::size_t u) {
        return std::find(tx.begin(), tx.end(), u) == tx.end() && ch.hears(v, u, tx);
      });
      if (!ok) continue;
      rep.successes.emplace_back(t, net.stations[v].id);
      if (!succeeded[v]) {
        succeeded[v] = 1;
        ++rep.successes_a;
        if (in_b[v]) ++rep.successes_b;
      }
    }
  }
  rep.pass_a = double(rep.successes_a) >= spec.eps_fraction * double(rep.size_a);
  rep.pass_b = double(rep.successes_b) >= spec.eps_fraction * double(rep.size_b);
  return rep;
}

namespace {

constexpr std::size_t kFamilies = 7;

std::set<StationId> all_ids(const Network& net) {
  std::set<StationId> out;
  for (const auto& s : net.stations) out.insert(s.id);
  return out;
}

std::size_t side_for(std::size_t stations, double per_box) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(
                                      std::ceil(std::sqrt(double(stations) / per_box))));
}

}  // namespace

TrialPlacement certification_placement(const SelectorSpec& spec, const ModelParams& params,
                                       std::uint64_t seed, std::size_t trial) {
  const std::uint32_t n_ids = spec.id_range;
  const std::uint32_t dd = spec.delta_density;
  const std::uint64_t s = seed * 1'000'003ULL + trial;
  Rng rng(s ^ 0xC0FFEEULL);
  TrialPlacement out;
  // Station budgets stay within the id range.
  const std::size_t half = std::max<std::size_t>(1, n_ids / 2);
  const std::uint32_t per_box = std::min(dd, n_ids);
  switch (trial % kFamilies) {
    case 0: {  // uniform density-bounded placement, every station active
      out.family = "random";
      auto n = 1 + rng.below(half);
      double extent = double(side_for(n, std::max(1.0, dd / 2.0)));
      out.network = gen_random_network(n, extent, dd, params, s, n_ids, false);
      out.active_set = all_ids(out.network);
      break;
    }
    case 1: {  // uniform placement, random half active
      out.family = "random-half";
      auto n = 2 + rng.below(half);
      n = std::min<std::size_t>(n, n_ids);
      double extent = double(side_for(n, std::max(1.0, dd / 2.0)));
      out.network = gen_random_network(n, extent, dd, params, s, n_ids, false);
      std::vector<StationId> ids;
      for (const auto& st : out.network.stations) ids.push_back(st.id);
      rng.shuffle(ids);
      ids.resize(std::max<std::size_t>(1, ids.size() / 2));
      out.active_set.insert(ids.begin(), ids.end());
      break;
    }
    case 2: {  // block of saturated boxes
      out.family = "saturated";
      auto side = std::max<std::size_t>(1, static_cast<std::size_t>(
                                               std::floor(std::sqrt(double(n_ids) / dd))));
      side = std::min<std::size_t>(side, 6);
      out.network = gen_box_block(side, side, per_box, params, s, n_ids);
      out.active_set = all_ids(out.network);
      break;
    }
    case 3: {  // single row of saturated boxes
      out.family = "corridor";
      auto len = std::clamp<std::size_t>(n_ids / dd, 1, 24);
      out.network = gen_box_block(1, len, per_box, params, s, n_ids);
      out.active_set = all_ids(out.network);
      break;
    }
    case 4: {  // one station per box on a lattice
      out.family = "diluted-lattice";
      auto spacing = 1 + rng.below(3);
      auto side = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::floor(std::sqrt(double(std::min<std::uint32_t>(n_ids, 144))))),
          1, 12);
      out.network = gen_box_block(side, side, 1, params, s, n_ids, spacing);
      out.network.delta = dd;
      out.active_set = all_ids(out.network);
      break;
    }
    case 5: {  // co-boxed clusters: every active station shares its box
      out.family = "co-boxed";
      PlacementBuilder builder(params, dd);
      auto side = std::min<std::size_t>(side_for(half, std::max(2.0, dd * 0.75)), 6);
      std::size_t budget = n_ids;
      auto ids = rng.sample(1, n_ids, n_ids);
      std::size_t next = 0;
      for (std::size_t a = 0; a < side; ++a) {
        for (std::size_t b = 0; b < side; ++b) {
          if (dd < 2) break;
          auto k = 2 + rng.below(dd - 1);
          if (next + k > budget) break;
          for (std::uint64_t m = 0; m < k; ++m) {
            if (!builder.add_in_box(ids[next], {std::int64_t(a), std::int64_t(b)}, rng)) {
              throw std::runtime_error("co-boxed placement failed");
            }
            ++next;
          }
        }
      }
      if (next == 0) builder.add_in_box(ids[next++], {0, 0}, rng);
      out.network = builder.network(n_ids);
      out.active_set = all_ids(out.network);
      break;
    }
    default: {  // few active stations inside a dense listener population
      out.family = "sparse-active";
      auto n = std::min<std::size_t>(n_ids, std::max<std::size_t>(2, half));
      double extent = double(side_for(n, std::max(1.0, dd / 2.0)));
      out.network = gen_random_network(n, extent, dd, params, s, n_ids, false);
      std::vector<StationId> ids;
      for (const auto& st : out.network.stations) ids.push_back(st.id);
      rng.shuffle(ids);
      ids.resize(std::min<std::size_t>(ids.size(), 1 + rng.below(2 * dd)));
      out.active_set.insert(ids.begin(), ids.end());
      break;
    }
  }
  return out;
}

CertifyReport certify(const GeometricSchedule& s, const SelectorSpec& spec, std::uint64_t seed,
                      const ModelParams& params, std::size_t trials) {
  if (trials < 1) throw std::invalid_argument("certify needs at least one trial");
  CertifyReport out;
  out.trials = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    auto placement = certification_placement(spec, params, seed, k);
    auto rep = verify_selector(s, placement.network, placement.active_set, spec, params);
    rep.placement = placement.family + "#" + std::to_string(k);
    out.min_fraction_a = std::min(out.min_fraction_a, rep.fraction_a());
    out.min_fraction_b = std::min(out.min_fraction_b, rep.fraction_b());
    bool ok = rep.pass_a && rep.pass_b;
    if (!ok && out.pass) {
      out.pass = false;
      out.counterexample =
          CertifyExhibit{placement.family, placement.network, placement.active_set, rep};
    }
    rep.successes.clear();  // keep aggregate reports small
    out.reports.push_back(std::move(rep));
  }
  return out;
}

CertifyReport certify(const SelectorSpec& spec, std::uint64_t seed, const ModelParams& params,
                      std::size_t trials) {
  return certify(build_selector(spec, seed, params), spec, seed, params, trials);
}

CertifiedSelector build_certified_selector(const SelectorSpec& spec, std::uint64_t seed,
                                           const ModelParams& params, std::size_t trials) {
  for (std::uint32_t k = 0; k <= spec.retry_cap; ++k) {
    auto schedule = build_selector(spec, seed + k, params);
    auto report = certify(schedule, spec, seed + k, params, trials);
    if (report.pass) return {std::move(schedule), seed + k, k, std::move(report)};
  }
  throw std::runtime_error("no certified selector within " + std::to_string(spec.retry_cap) +
                           " resamples");
}

}  // namespace sinr
