#include "sinr/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sinr {

using json = nlohmann::json;

namespace {

json coord_json(const GridCoord& c) { return json::array({c.i, c.j}); }

GridCoord coord_from(const json& j) { return {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()}; }

json params_json(const ModelParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"noise", p.noise}, {"eps", p.eps}, {"power", p.power}};
}

ModelParams params_from(const json& j) {
  ModelParams p;
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.noise = j.value("noise", p.noise);
  p.eps = j.value("eps", p.eps);
  p.power = j.value("power", p.power);
  p.validate();
  return p;
}

json network_json(const Network& net, const ModelParams& params) {
  json st = json::array();
  for (const auto& s : net.stations) st.push_back({{"id", s.id}, {"x", s.pos.x}, {"y", s.pos.y}});
  return {{"id_range", net.id_range}, {"delta", net.delta}, {"params", params_json(params)},
          {"stations", st}};
}

LoadedNetwork network_from(const json& j) {
  LoadedNetwork out;
  out.net.id_range = j.at("id_range").get<std::uint32_t>();
  out.net.delta = j.at("delta").get<std::uint32_t>();
  out.params = params_from(j.at("params"));
  for (const auto& s : j.at("stations")) {
    out.net.stations.push_back(
        {s.at("id").get<StationId>(), {s.at("x").get<double>(), s.at("y").get<double>()}});
  }
  validate(out.net, out.params);
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

const char* role_name(StationRole r) {
  switch (r) {
    case StationRole::Active: return "active";
    case StationRole::Passive: return "passive";
    case StationRole::Leader: return "leader";
  }
  return "?";
}

StationRole role_from(const std::string& s) {
  if (s == "active") return StationRole::Active;
  if (s == "passive") return StationRole::Passive;
  if (s == "leader") return StationRole::Leader;
  throw FormatError("unknown station role " + s);
}

json rounds_json(const StageRounds& s) {
  return {{"multi_rounds", s.multi_rounds}, {"physical_rounds", s.physical_rounds}};
}

json report_json(const SelectorReport& rep) {
  json succ = json::array();
  for (auto [t, id] : rep.successes) succ.push_back(json::array({t, id}));
  return {{"placement", rep.placement},   {"size_a", rep.size_a},
          {"successes_a", rep.successes_a}, {"size_b", rep.size_b},
          {"successes_b", rep.successes_b}, {"fraction_a", rep.fraction_a()},
          {"fraction_b", rep.fraction_b()}, {"pass_a", rep.pass_a},
          {"pass_b", rep.pass_b},           {"successes", succ}};
}

json spec_json(const SelectorSpec& s) {
  return {{"id_range", s.id_range},
          {"delta_density", s.delta_density},
          {"eps_fraction", s.eps_fraction},
          {"regime", s.regime == AlphaRegime::Steep ? "steep" : "square"},
          {"dilution", s.dilution},
          {"length", s.length},
          {"c_len", s.c_len},
          {"c_d", s.c_d},
          {"retry_cap", s.retry_cap}};
}

SelectorSpec spec_from(const json& j) {
  SelectorSpec s;
  s.id_range = j.at("id_range").get<std::uint32_t>();
  s.delta_density = j.at("delta_density").get<std::uint32_t>();
  s.eps_fraction = j.value("eps_fraction", s.eps_fraction);
  s.regime = j.value("regime", std::string("steep")) == "square" ? AlphaRegime::Square
                                                                   : AlphaRegime::Steep;
  s.dilution = j.at("dilution").get<std::uint32_t>();
  s.length = j.at("length").get<std::uint32_t>();
  s.c_len = j.value("c_len", s.c_len);
  s.c_d = j.value("c_d", s.c_d);
  s.retry_cap = j.value("retry_cap", s.retry_cap);
  s.validate();
  return s;
}

json classical_json(const ClassicalSchedule& s) {
  json rows = json::object();
  for (StationId v = 1; v <= s.id_range(); ++v) {
    if (s.popcount(v) == 0) continue;
    std::vector<std::uint32_t> ones;
    for (std::uint32_t t = 1; t <= s.length(); ++t) {
      if (s.bit(v, t)) ones.push_back(t - 1);
    }
    rows[std::to_string(v)] = bits_to_hex(ones, s.length());
  }
  return {{"kind", "classical"}, {"id_range", s.id_range()}, {"length", s.length()}, {"rows", rows}};
}

ClassicalSchedule classical_from(const json& j) {
  if (j.at("kind") != "classical") throw FormatError("expected a classical schedule");
  ClassicalSchedule s(j.at("id_range").get<std::uint32_t>(), j.at("length").get<std::uint32_t>());
  for (const auto& [key, hex] : j.at("rows").items()) {
    auto v = static_cast<StationId>(std::stoul(key));
    if (v < 1 || v > s.id_range()) throw FormatError("row id out of range: " + key);
    for (auto t : hex_to_bits(hex.get<std::string>(), s.length())) s.set(v, t + 1);
  }
  return s;
}

json geometric_json(const GeometricSchedule& s) {
  json out = {{"kind", "geometric"},
              {"id_range", s.id_range()},
              {"delta", s.delta()},
              {"length", s.length()},
              {"rows", json::object()}};
  if (const auto* base = s.base()) {
    out["dilution_of"] = classical_json(*base);
    return out;
  }
  auto& rows = out["rows"];
  for (StationId v = 1; v <= s.id_range(); ++v) {
    for (std::uint32_t a = 0; a < s.delta(); ++a) {
      for (std::uint32_t b = 0; b < s.delta(); ++b) {
        const auto& ones = s.ones(v, a, b);
        if (ones.empty()) continue;
        rows[std::to_string(v) + ":" + std::to_string(a) + ":" + std::to_string(b)] =
            bits_to_hex(ones, s.length());
      }
    }
  }
  return out;
}

GeometricSchedule geometric_from(const json& j) {
  if (j.at("kind") != "geometric") throw FormatError("expected a geometric schedule");
  auto delta = j.at("delta").get<std::uint32_t>();
  if (j.contains("dilution_of")) {
    auto base = classical_from(j.at("dilution_of"));
    auto s = dilute(base, delta, GridSpec(1.0));
    if (s.length() != j.at("length").get<std::uint32_t>()) {
      throw FormatError("diluted length does not match the stored length");
    }
    return s;
  }
  GeometricSchedule s(j.at("id_range").get<std::uint32_t>(), delta,
                      j.at("length").get<std::uint32_t>());
  for (const auto& [key, hex] : j.at("rows").items()) {
    std::istringstream in(key);
    std::string part;
    std::vector<std::uint32_t> f;
    while (std::getline(in, part, ':')) f.push_back(static_cast<std::uint32_t>(std::stoul(part)));
    if (f.size() != 3 || f[0] < 1 || f[0] > s.id_range() || f[1] >= delta || f[2] >= delta) {
      throw FormatError("bad geometric row key: " + key);
    }
    for (auto t : hex_to_bits(hex.get<std::string>(), s.length())) s.set(f[0], f[1], f[2], t + 1);
  }
  return s;
}

json box_json(const BoxRecord& b) {
  auto dirmap = [](const std::map<GridCoord, StationId>& m) {
    json a = json::array();
    for (const auto& [d, id] : m) a.push_back({{"dir", coord_json(d)}, {"id", id}});
    return a;
  };
  return {{"box", coord_json(b.coord)},
          {"leader", b.leader},
          {"roster", b.roster},
          {"senders", dirmap(b.senders)},
          {"receivers", dirmap(b.receivers)}};
}

BoxRecord box_from(const json& j) {
  BoxRecord b;
  b.coord = coord_from(j.at("box"));
  b.leader = j.at("leader").get<StationId>();
  b.roster = j.at("roster").get<std::vector<StationId>>();
  for (const auto& e : j.at("senders")) b.senders[coord_from(e.at("dir"))] = e.at("id").get<StationId>();
  for (const auto& e : j.at("receivers")) {
    b.receivers[coord_from(e.at("dir"))] = e.at("id").get<StationId>();
  }
  return b;
}

json election_boxes_json(const std::map<GridCoord, std::pair<StationId, ElectionStatus>>& m) {
  json a = json::array();
  for (const auto& [c, v] : m) {
    a.push_back({{"box", coord_json(c)}, {"ld", v.first}, {"st", to_string(v.second)}});
  }
  return a;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string output_path(const std::string& name) {
  const char* dir = std::getenv("SINRNET_OUT_DIR");
  if (!dir || !*dir || std::filesystem::path(name).is_absolute()) return name;
  return (std::filesystem::path(dir) / name).string();
}

std::string network_to_json(const Network& net, const ModelParams& params) {
  return network_json(net, params).dump(1);
}

LoadedNetwork network_from_json(const std::string& text) {
  return guarded("network", [&] { return network_from(parse(text)); });
}

std::string bits_to_hex(const std::vector<std::uint32_t>& ones, std::uint32_t length) {
  std::string hex((length + 3) / 4, '0');
  std::vector<unsigned> nib(hex.size(), 0);
  for (auto p : ones) {
    if (p >= length) throw std::out_of_range("bit position beyond row length");
    nib[p / 4] |= 8u >> (p % 4);
  }
  static const char digits[] = "0123456789abcdef";
  for (std::size_t i = 0; i < nib.size(); ++i) hex[i] = digits[nib[i]];
  return hex;
}

std::vector<std::uint32_t> hex_to_bits(const std::string& hex, std::uint32_t length) {
  if (hex.size() != (length + 3) / 4) throw FormatError("hex row has the wrong length");
  std::vector<std::uint32_t> ones;
  for (std::size_t i = 0; i < hex.size(); ++i) {
    char c = hex[i];
    unsigned v;
    if (c >= '0' && c <= '9') v = unsigned(c - '0');
    else if (c >= 'a' && c <= 'f') v = unsigned(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = unsigned(c - 'A' + 10);
    else throw FormatError(std::string("bad hex digit ") + c);
    for (unsigned k = 0; k < 4; ++k) {
      if (!(v & (8u >> k))) continue;
      auto p = static_cast<std::uint32_t>(4 * i + k);
      if (p >= length) throw FormatError("padding bit set in hex row");
      ones.push_back(p);
    }
  }
  return ones;
}

std::string schedule_to_json(const ClassicalSchedule& s) { return classical_json(s).dump(1); }
std::string schedule_to_json(const GeometricSchedule& s) { return geometric_json(s).dump(1); }

ClassicalSchedule classical_from_json(const std::string& text) {
  return guarded("schedule", [&] { return classical_from(parse(text)); });
}

GeometricSchedule geometric_from_json(const std::string& text) {
  return guarded("schedule", [&] {
    auto j = parse(text);
    return geometric_from(j.contains("schedule") ? j.at("schedule") : j);
  });
}

std::string selector_to_json(const CertifiedSelector& sel, const SelectorSpec& spec) {
  json j = {{"spec", spec_json(spec)},
            {"seed", sel.seed},
            {"resamples", sel.resamples},
            {"certification",
             {{"pass", sel.report.pass},
              {"trials", sel.report.trials},
              {"min_fraction_a", sel.report.min_fraction_a},
              {"min_fraction_b", sel.report.min_fraction_b}}},
            {"schedule", geometric_json(sel.schedule)}};
  return j.dump(1);
}

SelectorSpec selector_spec_from_json(const std::string& text) {
  return guarded("selector", [&] { return spec_from(parse(text).at("spec")); });
}

std::string selector_report_to_json(const SelectorReport& rep) { return report_json(rep).dump(1); }

std::string certify_report_to_json(const CertifyReport& rep) {
  json reports = json::array();
  for (const auto& r : rep.reports) {
    auto j = report_json(r);
    j.erase("successes");
    reports.push_back(j);
  }
  json j = {{"pass", rep.pass},
            {"trials", rep.trials},
            {"min_fraction_a", rep.min_fraction_a},
            {"min_fraction_b", rep.min_fraction_b},
            {"reports", reports}};
  if (rep.counterexample) {
    const auto& ex = *rep.counterexample;
    j["counterexample"] = {{"family", ex.family},
                           {"network", network_json(ex.network, ModelParams{})},
                           {"active_set", ex.active_set},
                           {"report", report_json(ex.report)}};
  }
  return j.dump(1);
}

std::string backbone_to_json(const BackboneStructure& bb, const Network& net,
                             const ModelParams& params) {
  json boxes = json::array();
  for (const auto& [c, b] : bb.boxes) boxes.push_back(box_json(b));
  json assoc = json::array();
  for (auto [v, l] : bb.assoc) assoc.push_back(json::array({v, l}));
  json states = json::array();
  for (const auto& [id, s] : bb.states) {
    json twin = json::array();
    for (auto [k, t] : s.twin) twin.push_back(json::array({k, t}));
    states.push_back({{"id", id},
                      {"role", role_name(s.st)},
                      {"roster", s.roster},
                      {"neighbors", s.neighbors},
                      {"dir_flags", s.dir_flags},
                      {"twin", twin}});
  }
  json j = {{"network", network_json(net, params)},
            {"dilution_prime", bb.dilution_prime},
            {"multi_round_len", bb.multi_round_len},
            {"selector_dilution", bb.selector_dilution},
            {"selector_length", bb.selector_length},
            {"round_budget", bb.round_budget},
            {"rounds",
             {{"leader_election", bb.rounds.leader_election},
              {"local_learning", bb.rounds.local_learning},
              {"neighborhood_learning", bb.rounds.neighborhood_learning},
              {"total", bb.rounds.total()}}},
            {"contest_sizes", bb.contest_sizes},
            {"backbone", bb.backbone},
            {"boxes", boxes},
            {"assoc", assoc},
            {"states", states}};
  return j.dump(1);
}

LoadedBackbone backbone_from_json(const std::string& text) {
  return guarded("backbone", [&] {
    auto j = parse(text);
    auto ln = network_from(j.at("network"));
    LoadedBackbone out{std::move(ln.net), ln.params, {}};
    auto& bb = out.bb;
    bb.dilution_prime = j.at("dilution_prime").get<std::uint32_t>();
    bb.multi_round_len = j.at("multi_round_len").get<std::uint64_t>();
    bb.selector_dilution = j.value("selector_dilution", 0u);
    bb.selector_length = j.value("selector_length", 0u);
    bb.round_budget = j.value("round_budget", std::uint64_t{0});
    const auto& r = j.at("rounds");
    bb.rounds.leader_election = r.at("leader_election").get<std::uint64_t>();
    bb.rounds.local_learning = r.at("local_learning").get<std::uint64_t>();
    bb.rounds.neighborhood_learning = r.at("neighborhood_learning").get<std::uint64_t>();
    bb.contest_sizes = j.at("contest_sizes").get<std::vector<std::size_t>>();
    bb.backbone = j.at("backbone").get<std::set<StationId>>();
    for (const auto& b : j.at("boxes")) {
      auto rec = box_from(b);
      bb.boxes[rec.coord] = std::move(rec);
    }
    for (const auto& a : j.at("assoc")) bb.assoc[a.at(0).get<StationId>()] = a.at(1).get<StationId>();
    for (const auto& s : j.value("states", json::array())) {
      StationState st;
      st.st = role_from(s.at("role").get<std::string>());
      st.roster = s.at("roster").get<std::vector<StationId>>();
      st.neighbors = s.at("neighbors").get<std::set<StationId>>();
      st.dir_flags = s.at("dir_flags").get<std::uint32_t>();
      for (const auto& t : s.at("twin")) st.twin[t.at(0).get<int>()] = t.at(1).get<StationId>();
      bb.states[s.at("id").get<StationId>()] = std::move(st);
    }
    for (const auto& [c, b] : bb.boxes) {
      if (!out.net.index_of(b.leader)) throw FormatError("box leader not in the network");
    }
    return out;
  });
}

std::string backbone_trace_jsonl(const BackboneStructure& bb) {
  std::string out;
  std::size_t leaders = bb.boxes.size();
  std::size_t senders = 0, receivers = 0;
  for (const auto& [c, b] : bb.boxes) {
    senders += b.senders.size();
    receivers += b.receivers.size();
  }
  out += json({{"phase", "leader_election"},
               {"rounds", bb.rounds.leader_election},
               {"contest_sizes", bb.contest_sizes},
               {"leaders", leaders}})
             .dump() +
         "\n";
  out += json({{"phase", "local_learning"},
               {"rounds", bb.rounds.local_learning},
               {"rosters", leaders}})
             .dump() +
         "\n";
  out += json({{"phase", "neighborhood_learning"},
               {"rounds", bb.rounds.neighborhood_learning},
               {"senders", senders},
               {"receivers", receivers},
               {"backbone_size", bb.backbone.size()}})
             .dump() +
         "\n";
  return out;
}

std::string election_to_json(const ElectionResult& r, ElectionMode mode) {
  json boxes = json::array();
  for (const auto& [c, b] : r.state) {
    json pred = json::array(), succ = json::array();
    for (const auto& p : b.pred) pred.push_back(coord_json(p));
    for (const auto& s : b.succ) succ.push_back(coord_json(s));
    boxes.push_back({{"box", coord_json(c)},
                     {"ld", b.ld},
                     {"st", to_string(b.st)},
                     {"l0", b.l0},
                     {"pred", pred},
                     {"succ", succ}});
  }
  json j = {{"mode", mode == ElectionMode::Eager ? "eager" : "literal"},
            {"leader", r.leader},
            {"leader_box", coord_json(r.leader_box)},
            {"phases", r.phases},
            {"decided_phase", r.decided_phase},
            {"ecc", r.ecc},
            {"phase_bound", r.phase_bound},
            {"multi_rounds", r.multi_rounds},
            {"physical_rounds", r.physical_rounds},
            {"boxes", boxes}};
  return j.dump(1);
}

std::string election_trace_jsonl(const ElectionResult& r) {
  std::string out;
  for (const auto& snap : r.trace) {
    out += json({{"phase", snap.phase}, {"boxes", election_boxes_json(snap.boxes)}}).dump() + "\n";
  }
  return out;
}

PayloadPlacement payloads_from_json(const std::string& text) {
  return guarded("payloads", [&] {
    PayloadPlacement p;
    auto j = parse(text);
    for (const auto& e : j.at("payloads")) {
      auto id = e.at("station").get<StationId>();
      auto c = e.value("count", 1u);
      if (c == 0) continue;
      if (!p.emplace(id, c).second) throw FormatError("station listed twice in payloads");
    }
    return p;
  });
}

std::string payloads_to_json(const PayloadPlacement& p) {
  json a = json::array();
  for (auto [id, c] : p) a.push_back({{"station", id}, {"count", c}});
  return json({{"payloads", a}}).dump(1);
}

std::string multibroadcast_to_json(const MultiBroadcastResult& r) {
  json boxes = json::array();
  for (const auto& [c, b] : r.state.boxes) {
    json e = {{"box", coord_json(c)}, {"level", b.level}, {"k_local", b.k_local}};
    e["tree_pred"] = b.tree_pred ? coord_json(*b.tree_pred) : json(nullptr);
    auto w = r.flood_window.find(c);
    if (w != r.flood_window.end()) e["flood_window"] = json::array({w->second.first, w->second.second});
    boxes.push_back(e);
  }
  std::size_t complete = 0;
  for (const auto& [id, held] : r.held) complete += held.size() == r.k;
  json j = {{"leader", r.election.leader},
            {"root", coord_json(r.state.root)},
            {"k", r.k},
            {"depth", r.state.depth},
            {"election",
             {{"phases", r.election.phases},
              {"phase_bound", r.election.phase_bound},
              {"ecc", r.election.ecc},
              {"multi_rounds", r.election.multi_rounds},
              {"physical_rounds", r.election.physical_rounds}}},
            {"tree", rounds_json(r.tree)},
            {"local", rounds_json(r.local)},
            {"counting", rounds_json(r.counting)},
            {"gathering", rounds_json(r.gathering)},
            {"flooding", rounds_json(r.flooding)},
            {"total_physical_rounds", r.total_physical_rounds},
            {"round_budget", r.round_budget},
            {"stations", r.held.size()},
            {"complete_stations", complete},
            {"boxes", boxes}};
  return j.dump(1);
}

std::string lower_bound_to_json(const LowerBoundInstance& inst, const ModelParams& params,
                                const P1P2Report* report) {
  json j = {{"delta", inst.delta},
            {"spacing", inst.spacing},
            {"cols0", inst.cols0},
            {"cols1", inst.cols1},
            {"bridge", inst.bridge},
            {"network", network_json(inst.network, params)}};
  if (report) {
    json v = json::array();
    for (const auto& x : report->violations) {
      v.push_back({{"t0", x.t0}, {"t1", x.t1}, {"property", x.property}, {"detail", x.detail}});
    }
    j["check"] = {{"exhaustive", report->exhaustive},
                  {"patterns", report->patterns},
                  {"p1_checked", report->p1_checked},
                  {"p2_checked", report->p2_checked},
                  {"ok", report->ok()},
                  {"violations", v}};
  }
  return j.dump(1);
}

std::set<StationId> id_set_from_json(const std::string& text) {
  return guarded("id set", [&] {
    auto j = parse(text);
    if (j.is_object()) j = j.at("set");
    return j.get<std::set<StationId>>();
  });
}

std::string to_dot(const Network& net, const ModelParams& params, const BackboneStructure* bb) {
  auto g = communication_graph(net, params);
  std::set<StationId> leaders;
  if (bb) {
    for (const auto& [c, b] : bb->boxes) leaders.insert(b.leader);
  }
  auto in_h = [&](StationId id) { return bb && bb->backbone.count(id) > 0; };
  std::ostringstream out;
  out << "graph sinr {\n  node [shape=circle, fontsize=8];\n";
  for (const auto& s : net.stations) {
    out << "  " << s.id << " [pos=\"" << s.pos.x << "," << s.pos.y << "!\"";
    if (leaders.count(s.id)) out << ", shape=doublecircle";
    if (in_h(s.id)) out << ", style=filled, fillcolor=lightblue";
    out << "];\n";
  }
  for (std::size_t v = 0; v < g.adjacency.size(); ++v) {
    for (auto u : g.adjacency[v]) {
      if (u <= v) continue;
      auto a = net.stations[v].id, b = net.stations[u].id;
      out << "  " << a << " -- " << b;
      if (in_h(a) && in_h(b)) out << " [penwidth=2.5]";
      else out << " [color=gray70]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sinr
