// Python bindings for the core operations: parsing and minimizing thread
// specs, extraction, composition, equivalence checking, exploration and the
// latency simulator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "isplab/check.hpp"
#include "isplab/composition.hpp"
#include "isplab/equivalence.hpp"
#include "isplab/extraction.hpp"
#include "isplab/simulation.hpp"

namespace py = pybind11;
using namespace isplab;

namespace {

ThreadSpec parse_or_throw(const std::string& text) {
    ParseResult r = parse_spec(text);
    if (!r.ok()) {
        std::string msg;
        for (const ParseError& e : r.errors) {
            if (!msg.empty()) msg += "; ";
            msg += e.str();
        }
        throw std::invalid_argument(msg);
    }
    return std::move(*r.spec);
}

CompositionConfig composition_config(int maxlen, int capacity_msg, int capacity_reply,
                                     const std::string& mode, const std::string& strategy,
                                     int state_bound) {
    CompositionConfig cfg;
    cfg.maxlen = maxlen;
    cfg.capacity_msg = capacity_msg;
    cfg.capacity_reply = capacity_reply;
    if (mode == "safe")
        cfg.mode = GenMode::Safe;
    else if (mode == "strict")
        cfg.mode = GenMode::StrictPaper;
    else
        throw std::invalid_argument("mode must be safe or strict");
    cfg.strategy = parse_strategy(strategy);
    cfg.state_bound = state_bound;
    return cfg;
}

std::vector<LabelKind> abstraction_list(const std::vector<std::string>& names) {
    std::vector<LabelKind> kinds;
    for (const std::string& n : names) {
        if (n == "stp")
            kinds.push_back(LabelKind::Stp);
        else if (n == "jact")
            kinds.push_back(LabelKind::JAct);
        else if (n == "iact")
            kinds.push_back(LabelKind::IAct);
        else if (n == "sndf")
            kinds.push_back(LabelKind::SndF);
        else if (n == "rcvf")
            kinds.push_back(LabelKind::RcvF);
        else
            throw std::invalid_argument("unknown label kind " + n);
    }
    return kinds;
}

}  // namespace

PYBIND11_MODULE(_isplab, m) {
    m.doc() =
        "Verification and simulation laboratory for remote instruction stream "
        "processing: reference behaviour extraction, protocol composition, "
        "branching bisimilarity checking and latency simulation.";

    py::class_<ThreadSpec>(m, "ThreadSpec")
        .def_static("parse", &parse_or_throw, py::arg("text"))
        .def("__str__", [](const ThreadSpec& s) { return print_spec(s); })
        .def_property_readonly("start", &ThreadSpec::start)
        .def_property_readonly("size", &ThreadSpec::size)
        .def("minimized", [](const ThreadSpec& s) { return minimize(s).spec; })
        .def("state_map", [](const ThreadSpec& s) { return minimize(s).state_map; });

    m.def(
        "validate",
        [](const std::string& text) {
            std::vector<std::string> errors;
            ParseResult r = parse_spec(text);
            for (const ParseError& e : r.errors) errors.push_back(e.str());
            return errors;
        },
        py::arg("text"), "Parse errors of a spec text; empty when well-formed.");

    m.def(
        "extract_json",
        [](const ThreadSpec& spec) { return extract_lts(spec.start_handle()).to_json(); },
        py::arg("spec"), "Reference behaviour of the spec's start thread as LTS JSON.");

    m.def(
        "compose_json",
        [](const ThreadSpec& spec, int maxlen, int capacity_msg, int capacity_reply,
           const std::string& mode, const std::string& strategy, int state_bound) {
            return compose(spec.start_handle(),
                           composition_config(maxlen, capacity_msg, capacity_reply, mode,
                                              strategy, state_bound))
                .to_json();
        },
        py::arg("spec"), py::arg("maxlen") = 1, py::arg("capacity_msg") = 1,
        py::arg("capacity_reply") = 1, py::arg("mode") = "safe",
        py::arg("strategy") = "breadth", py::arg("state_bound") = 1000000,
        "Composed protocol behaviour as LTS JSON (j hidden).");

    m.def(
        "check",
        [](const ThreadSpec& spec, int maxlen, int capacity_msg, int capacity_reply,
           const std::string& mode, const std::string& strategy,
           const std::vector<std::string>& lhs_abstract,
           const std::vector<std::string>& rhs_abstract, bool rooted,
           bool divergence_sensitive, int state_bound) {
            EquivConfig ecfg;
            ecfg.lhs_abstraction = abstraction_list(lhs_abstract);
            ecfg.rhs_abstraction = abstraction_list(rhs_abstract);
            ecfg.rooted = rooted;
            ecfg.divergence_sensitive = divergence_sensitive;
            CheckOutcome out = check_thread(
                spec.start_handle(),
                composition_config(maxlen, capacity_msg, capacity_reply, mode, strategy,
                                   state_bound),
                ecfg);
            py::dict d;
            d["equivalent"] = out.verdict.equivalent;
            if (out.verdict.counterexample) {
                py::list trace;
                for (const Label& l : out.verdict.counterexample->trace)
                    trace.append(l.str());
                d["counterexample"] = trace;
                d["obligation"] = out.verdict.counterexample->obligation;
            }
            d["reference_states"] = out.lhs.states;
            d["protocol_states"] = out.rhs.states;
            d["invariant_violations"] = out.report.violations;
            return d;
        },
        py::arg("spec"), py::arg("maxlen") = 1, py::arg("capacity_msg") = 1,
        py::arg("capacity_reply") = 1, py::arg("mode") = "safe",
        py::arg("strategy") = "breadth",
        py::arg("lhs_abstract") = std::vector<std::string>{"stp"},
        py::arg("rhs_abstract") = std::vector<std::string>{"jact", "stp"},
        py::arg("rooted") = true, py::arg("divergence_sensitive") = false,
        py::arg("state_bound") = 1000000,
        "Decide the reference/protocol equivalence for one thread spec.");

    m.def(
        "explore",
        [](const ThreadSpec& spec, int maxlen, int capacity_msg, int capacity_reply,
           const std::string& mode, const std::string& strategy, bool normalize,
           int state_bound) {
            ExplorationReport report;
            Lts lts = compose(spec.start_handle(),
                              composition_config(maxlen, capacity_msg, capacity_reply, mode,
                                                 strategy, state_bound),
                              &report);
            if (normalize) lts = normalize_termination(lts);
            LtsStats st = explore_stats(lts);
            py::dict d;
            d["states"] = st.states;
            d["transitions"] = st.transitions;
            d["terminating"] = st.terminating_states;
            d["deadlocks"] = st.deadlock_states;
            d["protocol_deadlocks"] = lts.protocol_deadlock_states().size();
            d["invariant_violations"] = report.violations;
            d["range_notes"] = report.range_notes;
            d["discarded_messages"] = report.discarded_messages;
            return d;
        },
        py::arg("spec"), py::arg("maxlen") = 1, py::arg("capacity_msg") = 1,
        py::arg("capacity_reply") = 1, py::arg("mode") = "safe",
        py::arg("strategy") = "breadth", py::arg("normalize") = true,
        py::arg("state_bound") = 1000000, "Exploration statistics of the composed system.");

    m.def(
        "simulate",
        [](const ThreadSpec& spec, int maxlen, const std::string& strategy, int latency_msg,
           int latency_reply, int exec_time, const std::string& env, std::uint64_t seed,
           long horizon) {
            SimConfig cfg;
            cfg.maxlen = maxlen;
            cfg.strategy = parse_strategy(strategy);
            cfg.latency_msg = latency_msg;
            cfg.latency_reply = latency_reply;
            cfg.exec_time = exec_time;
            cfg.env = Environment::parse(env);
            cfg.env.seed = seed;
            cfg.horizon = horizon;
            SimResult r = simulate(spec.start_handle(), cfg);
            py::dict d;
            d["busy"] = r.metrics.busy;
            d["idle"] = r.metrics.idle;
            d["total"] = r.metrics.total;
            d["utilization"] = r.metrics.utilization;
            d["messages_sent"] = r.metrics.messages_sent;
            d["replies_sent"] = r.metrics.replies_sent;
            d["discarded"] = r.metrics.discarded;
            d["terminated"] = r.metrics.terminated;
            d["dead"] = r.metrics.dead;
            d["degenerate"] = r.metrics.degenerate;
            d["events"] = r.events;
            return d;
        },
        py::arg("spec"), py::arg("maxlen") = 1, py::arg("strategy") = "breadth",
        py::arg("latency_msg") = 4, py::arg("latency_reply") = 4, py::arg("exec_time") = 1,
        py::arg("env") = "all-true", py::arg("seed") = 0, py::arg("horizon") = 100000,
        "One deterministic simulation run with metrics and event log.");

    m.def(
        "sweep_csv",
        [](const ThreadSpec& spec, const std::string& name, const std::vector<int>& maxlens,
           const std::vector<std::string>& strategies, int latency_msg, int latency_reply,
           int exec_time, const std::string& env, std::uint64_t seed) {
            SimConfig base;
            base.latency_msg = latency_msg;
            base.latency_reply = latency_reply;
            base.exec_time = exec_time;
            base.env = Environment::parse(env);
            base.env.seed = seed;
            std::vector<SelectionStrategy> strats;
            for (const std::string& s : strategies) strats.push_back(parse_strategy(s));
            return sweep_csv(spec.start_handle(), name, base, maxlens, strats);
        },
        py::arg("spec"), py::arg("name"), py::arg("maxlens"), py::arg("strategies"),
        py::arg("latency_msg") = 4, py::arg("latency_reply") = 4, py::arg("exec_time") = 1,
        py::arg("env") = "all-true", py::arg("seed") = 0,
        "Metrics table over maxlens and strategies, deterministic CSV.");
}
