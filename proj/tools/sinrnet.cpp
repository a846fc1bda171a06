#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "sinr/apps.hpp"
#include "sinr/backbone.hpp"
#include "sinr/harness.hpp"
#include "sinr/io.hpp"
#include "sinr/scenario.hpp"
#include "sinr/selector.hpp"

using namespace sinr;

namespace {

void add_params(CLI::App* cmd, ModelParams& p) {
  cmd->add_option("--alpha", p.alpha, "path-loss exponent")->capture_default_str();
  cmd->add_option("--beta", p.beta, "SINR threshold")->capture_default_str();
  cmd->add_option("--noise", p.noise, "ambient noise")->capture_default_str();
  cmd->add_option("--eps", p.eps, "sensitivity margin")->capture_default_str();
  cmd->add_option("--power", p.power, "transmission power")->capture_default_str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  write_file(output_path(path), text);
}

ElectionMode parse_mode(const std::string& s) {
  return s == "literal" ? ElectionMode::Literal : ElectionMode::Eager;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sinrnet: distributed protocols on SINR networks"};
  app.require_subcommand(1);

  // gen-network
  ModelParams gp;
  std::string g_kind = "random", g_out;
  std::size_t g_n = 50, g_boxes = 8, g_rows = 2, g_cols = 2;
  double g_extent = 10.0;
  std::uint32_t g_delta = 4, g_id_range = 0, g_per_box = 2;
  std::uint64_t g_seed = 1;
  auto* gen = app.add_subcommand("gen-network", "generate a density-bounded network");
  gen->add_option("--kind", g_kind, "random | path | block")
      ->check(CLI::IsMember({"random", "path", "block"}))
      ->capture_default_str();
  gen->add_option("--n", g_n, "stations (random)")->capture_default_str();
  gen->add_option("--extent", g_extent, "square side in pivotal boxes (random)")->capture_default_str();
  gen->add_option("--delta", g_delta, "max stations per box (random)")->capture_default_str();
  gen->add_option("--id-range", g_id_range, "N; 0 picks the next power of two");
  gen->add_option("--boxes", g_boxes, "boxes in the path")->capture_default_str();
  gen->add_option("--rows", g_rows, "block rows")->capture_default_str();
  gen->add_option("--cols", g_cols, "block columns")->capture_default_str();
  gen->add_option("--per-box", g_per_box, "stations per box (path, block)")->capture_default_str();
  gen->add_option("--seed", g_seed, "placement seed")->capture_default_str();
  gen->add_option("--out", g_out, "network JSON (stdout if omitted)");
  add_params(gen, gp);

  // gen-lower-bound
  ModelParams lp;
  std::uint32_t l_delta = 4;
  std::uint64_t l_seed = 1, l_budget = 10'000;
  bool l_check = false;
  std::string l_out;
  auto* glb = app.add_subcommand("gen-lower-bound", "two-row lower-bound instance");
  glb->add_option("--delta", l_delta, "Delta >= 2")->capture_default_str();
  glb->add_option("--seed", l_seed, "selection seed")->capture_default_str();
  glb->add_flag("--check", l_check, "enumerate transmit patterns and report P1/P2");
  glb->add_option("--budget", l_budget, "pattern budget before sampling")->capture_default_str();
  glb->add_option("--out", l_out, "instance JSON");
  add_params(glb, lp);

  // build-selector
  ModelParams bp;
  std::uint32_t b_id_range = 256, b_delta = 8, b_c_len = 8, b_extent = 64;
  double b_c_d = 4.0;
  std::uint64_t b_seed = 1;
  std::size_t b_trials = 40;
  std::string b_out, b_report;
  auto* bsel = app.add_subcommand("build-selector", "sample and certify an SINR selector");
  bsel->add_option("--id-range", b_id_range, "N")->capture_default_str();
  bsel->add_option("--delta", b_delta, "Delta")->capture_default_str();
  bsel->add_option("--seed", b_seed, "first sampling seed")->capture_default_str();
  bsel->add_option("--trials", b_trials, "certification trials")->capture_default_str();
  bsel->add_option("--c-len", b_c_len, "length constant")->capture_default_str();
  bsel->add_option("--c-d", b_c_d, "dilution constant")->capture_default_str();
  bsel->add_option("--extent", b_extent, "network extent in boxes")->capture_default_str();
  bsel->add_option("--out", b_out, "selector JSON")->required();
  bsel->add_option("--report", b_report, "certification report JSON");
  add_params(bsel, bp);

  // verify-selector
  std::string v_sel, v_net, v_set, v_out;
  auto* vsel = app.add_subcommand("verify-selector", "run a selector on one network and active set");
  vsel->add_option("--selector", v_sel, "selector JSON")->required()->check(CLI::ExistingFile);
  vsel->add_option("--network", v_net, "network JSON")->required()->check(CLI::ExistingFile);
  vsel->add_option("--set", v_set, "active ids: JSON array or {\"set\": [...]}; default all");
  vsel->add_option("--out", v_out, "report JSON");

  // run-backbone
  std::string rb_net, rb_sel, rb_out, rb_trace, rb_dot;
  std::uint32_t rb_dp = 0;
  auto* rbb = app.add_subcommand("run-backbone", "construct the backbone");
  rbb->add_option("--network", rb_net, "network JSON")->required()->check(CLI::ExistingFile);
  rbb->add_option("--selector", rb_sel, "selector JSON")->required()->check(CLI::ExistingFile);
  rbb->add_option("--out", rb_out, "backbone JSON")->required();
  rbb->add_option("--trace", rb_trace, "per-phase JSONL trace");
  rbb->add_option("--dot", rb_dot, "DOT drawing of H");
  rbb->add_option("--dilution-prime", rb_dp, "override the calibrated constant");

  // run-leader
  std::string rl_bb, rl_out, rl_trace, rl_mode = "eager";
  auto* rld = app.add_subcommand("run-leader", "global leader election on the backbone");
  rld->add_option("--backbone", rl_bb, "backbone JSON")->required()->check(CLI::ExistingFile);
  rld->add_option("--out", rl_out, "election JSON")->required();
  rld->add_option("--trace", rl_trace, "per-phase JSONL trace");
  rld->add_option("--mode", rl_mode, "eager | literal")
      ->check(CLI::IsMember({"eager", "literal"}))
      ->capture_default_str();

  // run-multibroadcast
  std::string rm_bb, rm_pay, rm_out, rm_trace, rm_mode = "eager", rm_rule = "min_tag";
  auto* rmb = app.add_subcommand("run-multibroadcast", "disseminate every rumor to every station");
  rmb->add_option("--backbone", rm_bb, "backbone JSON")->required()->check(CLI::ExistingFile);
  rmb->add_option("--payloads", rm_pay, "payload JSON")->required()->check(CLI::ExistingFile);
  rmb->add_option("--out", rm_out, "result JSON")->required();
  rmb->add_option("--trace", rm_trace, "election JSONL trace");
  rmb->add_option("--mode", rm_mode, "eager | literal")
      ->check(CLI::IsMember({"eager", "literal"}))
      ->capture_default_str();
  rmb->add_option("--rule", rm_rule, "min_tag | lifo")
      ->check(CLI::IsMember({"min_tag", "lifo"}))
      ->capture_default_str();

  // run-scenario
  std::string rs_cfg, rs_metrics;
  unsigned rs_threads = 0;
  auto* rsc = app.add_subcommand("run-scenario", "run a configured pipeline or sweep");
  rsc->add_option("--config", rs_cfg, "scenario JSON")->required()->check(CLI::ExistingFile);
  rsc->add_option("--metrics", rs_metrics, "metrics CSV (overrides the config)");
  rsc->add_option("--threads", rs_threads, "worker threads (overrides the config)");

  // export-dot
  std::string ed_net, ed_bb, ed_out;
  auto* edot = app.add_subcommand("export-dot", "communication graph, optionally with H");
  edot->add_option("--network", ed_net, "network JSON")->check(CLI::ExistingFile);
  edot->add_option("--backbone", ed_bb, "backbone JSON")->check(CLI::ExistingFile);
  edot->add_option("--out", ed_out, "DOT file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gp.validate();
      Network net;
      if (g_kind == "random") net = gen_random_network(g_n, g_extent, g_delta, gp, g_seed, g_id_range);
      else if (g_kind == "path") net = gen_box_path(g_boxes, g_per_box, gp, g_seed, g_id_range);
      else net = gen_box_block(g_rows, g_cols, g_per_box, gp, g_seed, g_id_range);
      emit(g_out, network_to_json(net, gp));
    } else if (*glb) {
      lp.validate();
      auto inst = gen_lower_bound_instance(l_delta, lp, l_seed);
      std::optional<P1P2Report> rep;
      if (l_check) rep = check_p1_p2(inst, lp, l_budget, l_seed);
      emit(l_out, lower_bound_to_json(inst, lp, rep ? &*rep : nullptr));
      if (rep && !rep->ok()) {
        std::cerr << rep->violations.size() << " P1/P2 violations\n";
        return 1;
      }
    } else if (*bsel) {
      bp.validate();
      auto spec = make_selector_spec(b_id_range, b_delta, bp, b_c_len, b_c_d, b_extent);
      auto sel = build_certified_selector(spec, b_seed, bp, b_trials);
      emit(b_out, selector_to_json(sel, spec));
      if (!b_report.empty()) emit(b_report, certify_report_to_json(sel.report));
      std::cerr << "selector: length " << sel.schedule.length() << ", dilution " << spec.dilution
                << ", seed " << sel.seed << ", resamples " << sel.resamples << "\n";
    } else if (*vsel) {
      auto text = read_file(v_sel);
      auto spec = selector_spec_from_json(text);
      auto sched = geometric_from_json(text);
      auto ln = network_from_json(read_file(v_net));
      std::set<StationId> active;
      if (v_set.empty()) {
        for (const auto& s : ln.net.stations) active.insert(s.id);
      } else {
        active = id_set_from_json(read_file(v_set));
      }
      auto rep = verify_selector(sched, ln.net, active, spec, ln.params);
      emit(v_out, selector_report_to_json(rep));
      return rep.pass_a && rep.pass_b ? 0 : 1;
    } else if (*rbb) {
      auto ln = network_from_json(read_file(rb_net));
      auto sched = geometric_from_json(read_file(rb_sel));
      BackboneOptions opts;
      if (rb_dp) opts.dilution_prime = rb_dp;
      auto bb = build_backbone(ln.net, sched, ln.params, opts);
      emit(rb_out, backbone_to_json(bb, ln.net, ln.params));
      if (!rb_trace.empty()) emit(rb_trace, backbone_trace_jsonl(bb));
      if (!rb_dot.empty()) emit(rb_dot, to_dot(ln.net, ln.params, &bb));
      std::cerr << "backbone: " << bb.boxes.size() << " boxes, |H| = " << bb.backbone.size()
                << ", " << bb.rounds.total() << " rounds (budget " << bb.round_budget << ")\n";
    } else if (*rld) {
      auto lb = backbone_from_json(read_file(rl_bb));
      ElectionOptions opts;
      opts.mode = parse_mode(rl_mode);
      auto r = global_leader_election(lb.bb, lb.net, lb.params, opts);
      emit(rl_out, election_to_json(r, opts.mode));
      if (!rl_trace.empty()) emit(rl_trace, election_trace_jsonl(r));
      std::cerr << "leader " << r.leader << " after " << r.phases << " phases (bound "
                << r.phase_bound << ")\n";
    } else if (*rmb) {
      auto lb = backbone_from_json(read_file(rm_bb));
      auto placement = payloads_from_json(read_file(rm_pay));
      MultiBroadcastOptions opts;
      opts.election.mode = parse_mode(rm_mode);
      opts.rule = rm_rule == "lifo" ? ChoiceRule::Lifo : ChoiceRule::MinTag;
      auto r = multi_broadcast(lb.bb, lb.net, placement, lb.params, opts);
      emit(rm_out, multibroadcast_to_json(r));
      if (!rm_trace.empty()) emit(rm_trace, election_trace_jsonl(r.election));
      std::cerr << "k = " << r.k << ", " << r.total_physical_rounds << " rounds (budget "
                << r.round_budget << ")\n";
    } else if (*rsc) {
      auto dir = std::filesystem::path(rs_cfg).parent_path().string();
      auto plan = load_scenario(read_file(rs_cfg), dir.empty() ? "." : dir);
      if (!rs_metrics.empty()) plan.metrics_path = rs_metrics;
      if (rs_threads) plan.threads = rs_threads;
      auto runs = run_plan(plan);
      emit(plan.metrics_path, metrics_csv(runs));
      bool ok = true;
      for (const auto& r : runs) {
        if (r.ok) continue;
        ok = false;
        std::cerr << r.metrics.label << ": stage " << r.failed_stage << " failed: " << r.error;
        if (!r.trace_path.empty()) std::cerr << " (traces under " << r.trace_path << ".*)";
        std::cerr << "\n";
      }
      return ok ? 0 : 1;
    } else if (*edot) {
      if (!ed_bb.empty()) {
        auto lb = backbone_from_json(read_file(ed_bb));
        emit(ed_out, to_dot(lb.net, lb.params, &lb.bb));
      } else if (!ed_net.empty()) {
        auto ln = network_from_json(read_file(ed_net));
        emit(ed_out, to_dot(ln.net, ln.params));
      } else {
        std::cerr << "export-dot needs --network or --backbone\n";
        return 2;
      }
    }
  } catch (const ProtocolError& e) {
    std::cerr << "protocol failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
