#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <set>
#include <string>

#include "sinr/apps.hpp"
#include "sinr/harness.hpp"
#include "sinr/io.hpp"
#include "sinr/scenario.hpp"

namespace py = pybind11;
using namespace sinr;

namespace {

ModelParams make_params(double alpha, double beta, double noise, double eps, double power) {
  ModelParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.noise = noise;
  p.eps = eps;
  p.power = power;
  p.validate();
  return p;
}

ElectionMode mode_of(const std::string& s) {
  if (s == "eager") return ElectionMode::Eager;
  if (s == "literal") return ElectionMode::Literal;
  throw std::invalid_argument("mode must be eager or literal");
}

ChoiceRule rule_of(const std::string& s) {
  if (s == "min_tag") return ChoiceRule::MinTag;
  if (s == "lifo") return ChoiceRule::Lifo;
  throw std::invalid_argument("rule must be min_tag or lifo");
}

#define SINR_PARAMS                                                              \
  py::arg("alpha") = 3.0, py::arg("beta") = 1.0, py::arg("noise") = 1.0,         \
      py::arg("eps") = 1.0, py::arg("power") = 1.0

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SINR network protocols: generators, selectors, backbone, election and multi-broadcast";

  py::register_exception<ProtocolError>(m, "ProtocolError");
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def(
      "range_of",
      [](double alpha, double beta, double noise, double eps, double power) {
        return make_params(alpha, beta, noise, eps, power).range();
      },
      SINR_PARAMS);

  m.def(
      "gen_network",
      [](const std::string& kind, std::size_t n, double extent, std::uint32_t delta,
         std::uint32_t id_range, std::size_t boxes, std::size_t rows, std::size_t cols,
         std::uint32_t per_box, std::uint64_t seed, double alpha, double beta, double noise,
         double eps, double power) {
        auto p = make_params(alpha, beta, noise, eps, power);
        GeneratorConfig g;
        g.kind = kind;
        g.n = n;
        g.extent = extent;
        g.delta = delta;
        g.id_range = id_range;
        g.boxes = boxes;
        g.rows = rows;
        g.cols = cols;
        g.per_box = per_box;
        py::gil_scoped_release release;
        return network_to_json(generate_network(g, p, seed), p);
      },
      py::arg("kind") = "random", py::arg("n") = 50, py::arg("extent") = 10.0,
      py::arg("delta") = 4, py::arg("id_range") = 0, py::arg("boxes") = 8, py::arg("rows") = 2,
      py::arg("cols") = 2, py::arg("per_box") = 2, py::arg("seed") = 1, SINR_PARAMS);

  m.def(
      "gen_lower_bound",
      [](std::uint32_t delta, std::uint64_t seed, bool check, std::uint64_t budget, double alpha,
         double beta, double noise, double eps, double power) {
        auto p = make_params(alpha, beta, noise, eps, power);
        py::gil_scoped_release release;
        auto inst = gen_lower_bound_instance(delta, p, seed);
        std::optional<P1P2Report> rep;
        if (check) rep = check_p1_p2(inst, p, budget, seed);
        return lower_bound_to_json(inst, p, rep ? &*rep : nullptr);
      },
      py::arg("delta") = 4, py::arg("seed") = 1, py::arg("check") = false,
      py::arg("budget") = 10'000, SINR_PARAMS);

  m.def(
      "build_selector",
      [](std::uint32_t id_range, std::uint32_t delta, std::uint64_t seed, std::size_t trials,
         std::uint32_t c_len, double c_d, std::uint32_t extent, double alpha, double beta,
         double noise, double eps, double power) {
        auto p = make_params(alpha, beta, noise, eps, power);
        py::gil_scoped_release release;
        auto spec = make_selector_spec(id_range, delta, p, c_len, c_d, extent);
        return selector_to_json(build_certified_selector(spec, seed, p, trials), spec);
      },
      py::arg("id_range") = 256, py::arg("delta") = 8, py::arg("seed") = 1,
      py::arg("trials") = 40, py::arg("c_len") = 8, py::arg("c_d") = 4.0, py::arg("extent") = 64,
      SINR_PARAMS);

  m.def(
      "verify_selector",
      [](const std::string& selector, const std::string& network,
         std::optional<std::set<StationId>> active) {
        auto spec = selector_spec_from_json(selector);
        auto sched = geometric_from_json(selector);
        auto ln = network_from_json(network);
        std::set<StationId> set;
        if (active) {
          set = *active;
        } else {
          for (const auto& s : ln.net.stations) set.insert(s.id);
        }
        py::gil_scoped_release release;
        return selector_report_to_json(verify_selector(sched, ln.net, set, spec, ln.params));
      },
      py::arg("selector"), py::arg("network"), py::arg("active") = py::none());

  m.def(
      "run_backbone",
      [](const std::string& network, const std::string& selector, std::uint32_t dilution_prime) {
        auto ln = network_from_json(network);
        auto sched = geometric_from_json(selector);
        BackboneOptions opts;
        if (dilution_prime) opts.dilution_prime = dilution_prime;
        py::gil_scoped_release release;
        auto bb = build_backbone(ln.net, sched, ln.params, opts);
        return backbone_to_json(bb, ln.net, ln.params);
      },
      py::arg("network"), py::arg("selector"), py::arg("dilution_prime") = 0);

  m.def(
      "run_leader",
      [](const std::string& backbone, const std::string& mode) {
        auto lb = backbone_from_json(backbone);
        ElectionOptions opts;
        opts.mode = mode_of(mode);
        std::string result, trace;
        {
          py::gil_scoped_release release;
          auto r = global_leader_election(lb.bb, lb.net, lb.params, opts);
          result = election_to_json(r, opts.mode);
          trace = election_trace_jsonl(r);
        }
        return py::make_tuple(result, trace);
      },
      py::arg("backbone"), py::arg("mode") = "eager");

  m.def(
      "run_multibroadcast",
      [](const std::string& backbone, const std::map<StationId, std::uint32_t>& payloads,
         const std::string& mode, const std::string& rule) {
        auto lb = backbone_from_json(backbone);
        MultiBroadcastOptions opts;
        opts.election.mode = mode_of(mode);
        opts.rule = rule_of(rule);
        py::gil_scoped_release release;
        return multibroadcast_to_json(multi_broadcast(lb.bb, lb.net, payloads, lb.params, opts));
      },
      py::arg("backbone"), py::arg("payloads"), py::arg("mode") = "eager",
      py::arg("rule") = "min_tag");

  m.def(
      "run_scenario",
      [](const std::string& config, const std::string& base_dir, unsigned threads) {
        auto plan = load_scenario(config, base_dir);
        if (threads) plan.threads = threads;
        py::gil_scoped_release release;
        return metrics_csv(run_plan(plan));
      },
      py::arg("config"), py::arg("base_dir") = ".", py::arg("threads") = 0);

  m.def(
      "export_dot",
      [](const std::string& text) {
        if (text.find("\"boxes\"") != std::string::npos) {
          auto lb = backbone_from_json(text);
          return to_dot(lb.net, lb.params, &lb.bb);
        }
        auto ln = network_from_json(text);
        return to_dot(ln.net, ln.params);
      },
      py::arg("network_or_backbone"));

  m.def("metrics_columns", &metrics_columns);
}
