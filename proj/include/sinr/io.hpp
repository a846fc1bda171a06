#pragma once

#include <string>
#include <vector>

#include "sinr/apps.hpp"
#include "sinr/backbone.hpp"
#include "sinr/harness.hpp"
#include "sinr/phy.hpp"
#include "sinr/schedule.hpp"
#include "sinr/selector.hpp"

namespace sinr {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Joins name onto the directory named by SINRNET_OUT_DIR when that variable
/// is set and name is relative.
std::string output_path(const std::string& name);

// Network: {"id_range", "delta", "params": {...}, "stations": [{"id","x","y"}]}
std::string network_to_json(const Network& net, const ModelParams& params);

struct LoadedNetwork {
  Network net;
  ModelParams params;
};
LoadedNetwork network_from_json(const std::string& text);

/// Row bits t = 1..T packed four per hex digit, bit t-1 of the row at the
/// high end of digit (t-1)/4.
std::string bits_to_hex(const std::vector<std::uint32_t>& ones, std::uint32_t length);
std::vector<std::uint32_t> hex_to_bits(const std::string& hex, std::uint32_t length);

std::string schedule_to_json(const ClassicalSchedule& s);
/// Diluted schedules keep their classical base under "dilution_of" and an
/// empty "rows" object; others list their nonzero rows keyed "id:a:b".
std::string schedule_to_json(const GeometricSchedule& s);

ClassicalSchedule classical_from_json(const std::string& text);
GeometricSchedule geometric_from_json(const std::string& text);

/// Selector file: the geometric schedule plus its spec, seed and
/// certification summary.
std::string selector_to_json(const CertifiedSelector& sel, const SelectorSpec& spec);
SelectorSpec selector_spec_from_json(const std::string& text);

std::string selector_report_to_json(const SelectorReport& rep);
std::string certify_report_to_json(const CertifyReport& rep);

std::string backbone_to_json(const BackboneStructure& bb, const Network& net,
                             const ModelParams& params);
struct LoadedBackbone {
  Network net;
  ModelParams params;
  BackboneStructure bb;
};
LoadedBackbone backbone_from_json(const std::string& text);

/// One JSON line per construction phase.
std::string backbone_trace_jsonl(const BackboneStructure& bb);

std::string election_to_json(const ElectionResult& r, ElectionMode mode);
/// One JSON line per phase with every box's (ld, st).
std::string election_trace_jsonl(const ElectionResult& r);

/// {"payloads": [{"station": id, "count": c}, ...]}
PayloadPlacement payloads_from_json(const std::string& text);
std::string payloads_to_json(const PayloadPlacement& p);

std::string multibroadcast_to_json(const MultiBroadcastResult& r);

std::string lower_bound_to_json(const LowerBoundInstance& inst, const ModelParams& params,
                                const P1P2Report* report);

std::set<StationId> id_set_from_json(const std::string& text);

/// Communication graph in DOT; with a backbone, H stations are filled, box
/// leaders drawn as double circles and edges inside H drawn bold.
std::string to_dot(const Network& net, const ModelParams& params,
                   const BackboneStructure* bb = nullptr);

}  // namespace sinr
