#include "sinr/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sinr/harness.hpp"
#include "sinr/io.hpp"
#include "sinr/rng.hpp"

namespace sinr {

using json = nlohmann::json;

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

void require_file(const std::string& path, const char* what) {
  if (!path.empty() && !std::filesystem::exists(path)) {
    throw std::invalid_argument(std::string(what) + " not found: " + path);
  }
}

ElectionMode mode_from(const std::string& s) {
  if (s == "eager") return ElectionMode::Eager;
  if (s == "literal") return ElectionMode::Literal;
  throw std::invalid_argument("unknown election mode " + s);
}

ChoiceRule rule_from(const std::string& s) {
  if (s == "min_tag") return ChoiceRule::MinTag;
  if (s == "lifo") return ChoiceRule::Lifo;
  throw std::invalid_argument("unknown choice rule " + s);
}

ScenarioConfig config_from(const json& j, const std::string& base_dir) {
  ScenarioConfig c;
  c.label = j.value("label", c.label);
  if (c.label.find_first_of(",\"\n/") != std::string::npos) {
    throw std::invalid_argument("label may not contain commas, quotes, slashes or newlines");
  }
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    auto& o = c.generator;
    o.kind = g.value("kind", o.kind);
    o.n = g.value("n", o.n);
    o.extent = g.value("extent", o.extent);
    o.delta = g.value("delta", o.delta);
    o.id_range = g.value("id_range", o.id_range);
    o.connected = g.value("connected", o.connected);
    o.boxes = g.value("boxes", o.boxes);
    o.rows = g.value("rows", o.rows);
    o.cols = g.value("cols", o.cols);
    o.spacing = g.value("spacing", o.spacing);
    o.per_box = g.value("per_box", o.per_box);
    o.file = resolve(g.value("file", std::string()), base_dir);
    if (o.kind == "file" && o.file.empty()) throw std::invalid_argument("file generator needs a file");
    require_file(o.file, "network file");
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    c.params.alpha = p.value("alpha", c.params.alpha);
    c.params.beta = p.value("beta", c.params.beta);
    c.params.noise = p.value("noise", c.params.noise);
    c.params.eps = p.value("eps", c.params.eps);
    c.params.power = p.value("power", c.params.power);
  }
  c.params.validate();
  if (j.contains("selector")) {
    const auto& s = j.at("selector");
    c.c_len = s.value("c_len", c.c_len);
    c.c_d = s.value("c_d", c.c_d);
    c.certify_trials = s.value("certify_trials", c.certify_trials);
    c.selector_file = resolve(s.value("file", std::string()), base_dir);
    require_file(c.selector_file, "selector file");
  }
  if (!j.contains("seeds")) throw std::invalid_argument("scenario needs explicit seeds");
  const auto& seeds = j.at("seeds");
  c.network_seed = seeds.at("network").get<std::uint64_t>();
  c.selector_seed = seeds.at("selector").get<std::uint64_t>();
  c.payload_seed = seeds.value("payloads", c.payload_seed);
  if (j.contains("stages")) {
    c.stages.clear();
    for (const auto& s : j.at("stages")) {
      auto name = s.get<std::string>();
      static const std::set<std::string> known = {"backbone", "election", "multibroadcast",
                                                  "baseline"};
      if (!known.count(name)) throw std::invalid_argument("unknown stage " + name);
      c.stages.insert(name);
    }
  }
  c.election_mode = mode_from(j.value("election_mode", std::string("eager")));
  c.rule = rule_from(j.value("choice_rule", std::string("min_tag")));
  if (j.contains("payloads")) {
    const auto& p = j.at("payloads");
    c.payloads.mode = p.value("mode", c.payloads.mode);
    c.payloads.k = p.value("k", c.payloads.k);
    c.payloads.count = p.value("count", c.payloads.count);
    if (p.contains("payloads")) {
      c.payloads.mode = "list";
      c.payloads.list = payloads_from_json(p.dump());
    }
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    c.dot_dir = o.value("dot_dir", std::string());
    c.trace_dir = o.value("trace_dir", std::string());
  }
  return c;
}

std::vector<std::vector<std::size_t>> graph_of(const Network& net, const ModelParams& params) {
  return communication_graph(net, params).adjacency;
}

// Slot order: ascending id, one lone transmitter per slot.
std::vector<std::size_t> slot_order(const Network& net) {
  std::vector<std::size_t> order(net.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return net.stations[a].id < net.stations[b].id; });
  return order;
}

void write_artifact(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  write_file(output_path((std::filesystem::path(dir) / name).string()), text);
}

}  // namespace

ScenarioPlan load_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  ScenarioPlan plan;
  try {
    if (j.contains("outputs")) plan.metrics_path = j["outputs"].value("metrics", std::string());
    plan.threads = j.value("threads", 0u);
    json base = j;
    base.erase("sweep");
    if (!j.contains("sweep")) {
      plan.runs.push_back(config_from(base, base_dir));
      return plan;
    }
    std::size_t i = 0;
    for (const auto& patch : j.at("sweep")) {
      json cfg = base;
      cfg.merge_patch(patch);
      if (!patch.contains("label")) cfg["label"] = base.value("label", std::string("run")) + "-" + std::to_string(i);
      plan.runs.push_back(config_from(cfg, base_dir));
      ++i;
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  return plan;
}

Network generate_network(const GeneratorConfig& g, const ModelParams& params, std::uint64_t seed) {
  if (g.kind == "random") {
    return gen_random_network(g.n, g.extent, g.delta, params, seed, g.id_range, g.connected);
  }
  if (g.kind == "path") return gen_box_path(g.boxes, g.per_box, params, seed, g.id_range);
  if (g.kind == "block") {
    return gen_box_block(g.rows, g.cols, g.per_box, params, seed, g.id_range, g.spacing);
  }
  if (g.kind == "file") {
    auto loaded = network_from_json(read_file(g.file));
    if (!(loaded.params == params)) throw std::invalid_argument("network file params differ from the scenario");
    return loaded.net;
  }
  throw std::invalid_argument("unknown generator kind " + g.kind);
}

PayloadPlacement make_payloads(const PayloadConfig& p, const Network& net, std::uint64_t seed) {
  PayloadPlacement out;
  if (net.size() == 0) return out;
  if (p.mode == "all") {
    if (p.count == 0) return out;
    for (const auto& s : net.stations) out[s.id] = p.count;
  } else if (p.mode == "random") {
    Rng rng(seed);
    for (std::uint32_t i = 0; i < p.k; ++i) ++out[net.stations[rng.below(net.size())].id];
  } else if (p.mode == "list") {
    for (auto [id, c] : p.list) {
      if (!net.index_of(id)) throw std::invalid_argument("payload station not in the network");
      out[id] = c;
    }
  } else {
    throw std::invalid_argument("unknown payload mode " + p.mode);
  }
  return out;
}

BaselineResult round_robin_election(const Network& net, const ModelParams& params) {
  BaselineResult r;
  if (net.size() == 0) return r;
  auto adj = graph_of(net, params);
  auto order = slot_order(net);
  StationId target = net.stations[order.front()].id;
  std::vector<StationId> known(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) known[i] = net.stations[i].id;
  auto done = [&] { return std::all_of(known.begin(), known.end(), [&](auto v) { return v == target; }); };
  while (!done()) {
    bool changed = false;
    auto start = known;
    for (auto v : order) {
      for (auto u : adj[v]) {
        if (start[v] < known[u]) {
          known[u] = start[v];
          changed = true;
        }
      }
    }
    ++r.rounds;
    if (!changed) break;
  }
  r.physical_rounds = r.rounds * net.id_range;
  return r;
}

BaselineResult round_robin_multibroadcast(const Network& net, const ModelParams& params,
                                          const PayloadPlacement& placement) {
  BaselineResult r;
  auto all = rumors_of(placement);
  if (net.size() == 0 || all.empty()) return r;
  auto adj = graph_of(net, params);
  auto order = slot_order(net);
  std::vector<std::set<Rumor>> held(net.size()), sent(net.size());
  for (const auto& m : all) held[*net.index_of(m.origin)].insert(m);
  auto done = [&] {
    return std::all_of(held.begin(), held.end(), [&](const auto& h) { return h.size() == all.size(); });
  };
  while (!done()) {
    bool any = false;
    auto start = held;
    for (auto v : order) {
      auto it = std::find_if(start[v].begin(), start[v].end(), [&](const Rumor& m) { return !sent[v].count(m); });
      if (it == start[v].end()) continue;
      auto m = *it;
      sent[v].insert(m);
      for (auto u : adj[v]) held[u].insert(m);
      any = true;
    }
    ++r.rounds;
    if (!any) break;
  }
  r.physical_rounds = r.rounds * net.id_range;
  return r;
}

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  ScenarioRun run;
  auto& m = run.metrics;
  m.label = cfg.label;
  std::string stage = "generate";
  if (!cfg.trace_dir.empty()) {
    run.trace_path = output_path((std::filesystem::path(cfg.trace_dir) / cfg.label).string());
  }
  try {
    auto net = generate_network(cfg.generator, cfg.params, cfg.network_seed);
    validate(net, cfg.params);
    m.n = net.size();
    m.id_range = net.id_range;
    m.delta = net.delta;
    auto g = communication_graph(net, cfg.params);
    m.graph_diameter = g.diameter;
    if (cfg.generator.connected && !g.connected) throw std::runtime_error("generated network is disconnected");

    bool need_bb = cfg.stages.count("backbone") || cfg.stages.count("election") ||
                   cfg.stages.count("multibroadcast");
    PayloadPlacement placement;
    if (cfg.stages.count("multibroadcast") || cfg.stages.count("baseline")) {
      placement = make_payloads(cfg.payloads, net, cfg.payload_seed);
    }
    if (need_bb) {
      stage = "backbone";
      BackboneOptions bo;
      bo.certify_trials = cfg.certify_trials;
      BackboneStructure bb;
      if (!cfg.selector_file.empty()) {
        auto sel = geometric_from_json(read_file(cfg.selector_file));
        bb = build_backbone(net, sel, cfg.params, bo);
      } else {
        auto spec = make_selector_spec(net.id_range, net.delta, cfg.params, cfg.c_len, cfg.c_d,
                                       network_extent(net, cfg.params));
        bb = build_backbone(net, cfg.params, spec, cfg.selector_seed, bo);
      }
      write_artifact(cfg.trace_dir, cfg.label + ".backbone.jsonl", backbone_trace_jsonl(bb));
      write_artifact(cfg.dot_dir, cfg.label + ".dot", to_dot(net, cfg.params, &bb));
      m.boxes = bb.boxes.size();
      m.backbone_size = bb.backbone.size();
      m.dilution = bb.selector_dilution;
      m.dilution_prime = bb.dilution_prime;
      m.multi_round_len = bb.multi_round_len;
      m.backbone_rounds = bb.rounds.total();

      MultiRoundRunner mr(bb, net, cfg.params);
      ElectionOptions eo;
      eo.mode = cfg.election_mode;
      if (cfg.stages.count("election")) {
        stage = "election";
        auto el = global_leader_election(mr, eo);
        write_artifact(cfg.trace_dir, cfg.label + ".election.jsonl", election_trace_jsonl(el));
        m.box_ecc = el.ecc;
        m.election_phases = el.phases;
        m.election_multi_rounds = el.multi_rounds;
        m.election_rounds = el.physical_rounds;
      }
      if (cfg.stages.count("multibroadcast")) {
        stage = "multibroadcast";
        MultiBroadcastOptions mo;
        mo.rule = cfg.rule;
        mo.election = eo;
        auto res = multi_broadcast(mr, placement, mo);
        m.box_ecc = res.election.ecc;
        m.election_phases = res.election.phases;
        m.election_multi_rounds = res.election.multi_rounds;
        m.election_rounds = res.election.physical_rounds;
        m.k = res.k;
        m.tree_depth = res.state.depth;
        m.gathering_multi_rounds = res.gathering.multi_rounds;
        m.flooding_multi_rounds = res.flooding.multi_rounds;
        m.multibroadcast_rounds = res.total_physical_rounds;
      }
      m.transmissions = mr.transmissions();
    } else {
      write_artifact(cfg.dot_dir, cfg.label + ".dot", to_dot(net, cfg.params));
    }
    if (cfg.stages.count("baseline")) {
      stage = "baseline";
      m.baseline_election_rounds = round_robin_election(net, cfg.params).physical_rounds;
      m.baseline_multibroadcast_rounds =
          round_robin_multibroadcast(net, cfg.params, placement).physical_rounds;
    }
    run.ok = m.ok = true;
  } catch (const std::exception& e) {
    run.ok = m.ok = false;
    run.failed_stage = stage;
    run.error = e.what();
  }
  return run;
}

std::vector<ScenarioRun> run_plan(const ScenarioPlan& plan) {
  std::vector<ScenarioRun> out(plan.runs.size());
  unsigned workers = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, out.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) out[i] = run_scenario(plan.runs[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "label",          "n",
      "N",              "Delta",
      "boxes",          "H",
      "D",              "graph_diameter",
      "dilution",       "dilution_prime",
      "multi_round_len", "backbone_rounds",
      "election_phases", "election_multi_rounds",
      "election_rounds", "k",
      "tree_depth",     "gathering_multi_rounds",
      "flooding_multi_rounds", "multibroadcast_rounds",
      "transmissions",  "baseline_election_rounds",
      "baseline_multibroadcast_rounds", "ok"};
  return cols;
}

std::string metrics_csv(const std::vector<ScenarioRun>& runs) {
  std::ostringstream out;
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    out << m.label << ',' << m.n << ',' << m.id_range << ',' << m.delta << ',' << m.boxes << ','
        << m.backbone_size << ',' << m.box_ecc << ',' << m.graph_diameter << ',' << m.dilution
        << ',' << m.dilution_prime << ',' << m.multi_round_len << ',' << m.backbone_rounds << ','
        << m.election_phases << ',' << m.election_multi_rounds << ',' << m.election_rounds << ','
        << m.k << ',' << m.tree_depth << ',' << m.gathering_multi_rounds << ','
        << m.flooding_multi_rounds << ',' << m.multibroadcast_rounds << ',' << m.transmissions
        << ',' << m.baseline_election_rounds << ',' << m.baseline_multibroadcast_rounds << ','
        << (m.ok ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace sinr
