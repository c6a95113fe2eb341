// Command-line front end: validate, extract, compose, check, explore,
// simulate.  Exit codes: 0 success, 1 negative verdict, 2 usage/IO errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isplab/check.hpp"
#include "isplab/composition.hpp"
#include "isplab/equivalence.hpp"
#include "isplab/extraction.hpp"
#include "isplab/simulation.hpp"

#include <set>

namespace {

using namespace isplab;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << data;
}

ThreadSpec load_spec(const std::string& path) {
    ParseResult r = parse_spec(slurp(path));
    if (!r.ok()) {
        for (const ParseError& e : r.errors) std::cerr << "error: " << e.str() << "\n";
        throw UsageError("invalid specification " + path);
    }
    return std::move(*r.spec);
}

std::vector<LabelKind> parse_abstraction(const std::string& list) {
    std::vector<LabelKind> kinds;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok == "none") continue;
        if (tok == "stp")
            kinds.push_back(LabelKind::Stp);
        else if (tok == "jact")
            kinds.push_back(LabelKind::JAct);
        else if (tok == "iact")
            kinds.push_back(LabelKind::IAct);
        else if (tok == "sndf")
            kinds.push_back(LabelKind::SndF);
        else if (tok == "rcvf")
            kinds.push_back(LabelKind::RcvF);
        else
            throw UsageError("unknown label kind '" + tok + "' (use stp,jact,iact,sndf,rcvf,none)");
    }
    return kinds;
}

GenMode parse_mode(const std::string& mode) {
    if (mode == "safe") return GenMode::Safe;
    if (mode == "strict") return GenMode::StrictPaper;
    throw UsageError("unknown mode '" + mode + "' (use safe|strict)");
}

// Replays a counterexample trace on the composed system and prints one step
// per line with the component-state summary it reaches.
void print_trace_replay(const Lts& rhs, const std::vector<Label>& trace) {
    auto closure = [&](std::set<int> states) {
        std::vector<int> stack(states.begin(), states.end());
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            for (const Transition& t : rhs.out(s))
                if (rhs.label(t.label).is_tau() && states.insert(t.to).second)
                    stack.push_back(t.to);
        }
        return states;
    };
    std::set<int> states = closure({rhs.initial()});
    std::cout << "protocol-side replay:\n";
    std::cout << "  (initial) : " << rhs.state_desc(rhs.initial()) << "\n";
    for (const Label& l : trace) {
        std::set<int> next;
        for (int s : states)
            for (const Transition& t : rhs.out(s))
                if (rhs.label(t.label) == l) next.insert(t.to);
        if (next.empty()) {
            std::cout << "  " << l.str() << " : (no protocol-side step)\n";
            return;
        }
        states = closure(next);
        std::cout << "  " << l.str() << " : " << rhs.state_desc(*states.begin()) << "\n";
    }
}

struct CommonOpts {
    std::string input;
    int maxlen = 1;
    int capacity_msg = 1;
    int capacity_reply = 1;
    std::string mode = "safe";
    std::string strategy = "breadth";
    int state_bound = 1'000'000;

    CompositionConfig composition() const {
        CompositionConfig cfg;
        cfg.maxlen = maxlen;
        cfg.capacity_msg = capacity_msg;
        cfg.capacity_reply = capacity_reply;
        cfg.mode = parse_mode(mode);
        cfg.strategy = parse_strategy(strategy);
        cfg.state_bound = state_bound;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("input", o.input, "thread specification (.bta)")->required();
    cmd->add_option("--maxlen", o.maxlen, "run-ahead bound")->check(CLI::NonNegativeNumber);
    cmd->add_option("--capacity-msg", o.capacity_msg, "message channel capacity")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--capacity-reply", o.capacity_reply, "reply channel capacity")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "generator receive-enabling: safe|strict");
    cmd->add_option("--strategy", o.strategy, "breadth|prob50|prob95, optional +wildcard");
    cmd->add_option("--state-bound", o.state_bound, "exploration state limit")
        ->check(CLI::PositiveNumber);
}

int run(int argc, char** argv) {
    CLI::App app{"instruction stream processing laboratory"};
    app.require_subcommand(1);

    // validate
    std::string val_input;
    CLI::App* validate = app.add_subcommand("validate", "parse and check a thread spec");
    validate->add_option("input", val_input, "thread specification (.bta)")->required();

    // extract
    CommonOpts ex_opts;
    std::string ex_out;
    CLI::App* extract = app.add_subcommand("extract", "emit the reference LTS as JSON");
    extract->add_option("input", ex_opts.input, "thread specification (.bta)")->required();
    extract->add_option("--out", ex_out, "output path (default stdout)");

    // compose
    CommonOpts co_opts;
    std::string co_out;
    std::string co_abstract = "jact";
    CLI::App* compose_cmd = app.add_subcommand("compose", "emit the protocol LTS as JSON");
    add_common(compose_cmd, co_opts);
    compose_cmd->add_option("--out", co_out, "output path (default stdout)");
    compose_cmd->add_option("--abstract", co_abstract, "labels hidden in the composition");

    // check
    CommonOpts ch_opts;
    std::string ch_lhs = "stp";
    std::string ch_rhs = "jact,stp";
    bool ch_no_root = false;
    bool ch_divergence = false;
    bool ch_json = false;
    CLI::App* check = app.add_subcommand("check", "decide the reference/protocol equivalence");
    add_common(check, ch_opts);
    check->add_option("--lhs-abstract", ch_lhs, "labels hidden on the reference side");
    check->add_option("--rhs-abstract", ch_rhs, "labels hidden on the protocol side");
    check->add_flag("--no-root", ch_no_root, "strict root condition on the given roots");
    check->add_flag("--divergence-sensitive", ch_divergence, "distinguish silent cycles");
    check->add_flag("--json", ch_json, "machine-readable verdict");

    // explore
    CommonOpts xp_opts;
    bool xp_raw = false;
    bool xp_fail_deadlock = false;
    CLI::App* explore = app.add_subcommand("explore", "exploration statistics and deadlocks");
    add_common(explore, xp_opts);
    explore->add_flag("--raw", xp_raw, "skip termination normalization");
    explore->add_flag("--fail-on-deadlock", xp_fail_deadlock, "exit 1 when deadlocks exist");

    // simulate
    CommonOpts si_opts;
    std::string si_env = "random";
    std::uint64_t si_seed = 0;
    int si_latency_msg = 4, si_latency_reply = 4, si_exec = 1;
    long si_horizon = 100000;
    std::string si_csv, si_events, si_sweep, si_strategies;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "latency/utilization simulation");
    add_common(simulate_cmd, si_opts);
    simulate_cmd->add_option("--env", si_env, "all-true|all-false|fixed:TF...|random|prob");
    simulate_cmd->add_option("--seed", si_seed, "seed for random/prob environments");
    simulate_cmd->add_option("--latency-msg", si_latency_msg, "message latency")
        ->check(CLI::NonNegativeNumber);
    simulate_cmd->add_option("--latency-reply", si_latency_reply, "reply latency")
        ->check(CLI::NonNegativeNumber);
    simulate_cmd->add_option("--exec-time", si_exec, "execution time per basic action")
        ->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--horizon", si_horizon, "event limit")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--csv", si_csv, "CSV output path (default stdout)");
    simulate_cmd->add_option("--events", si_events, "event log output path");
    simulate_cmd->add_option("--sweep", si_sweep, "comma list of maxlens to sweep");
    simulate_cmd->add_option("--strategies", si_strategies, "comma list of strategies to sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (validate->parsed()) {
        ParseResult r = parse_spec(slurp(val_input));
        if (!r.ok()) {
            for (const ParseError& e : r.errors) std::cerr << "error: " << e.str() << "\n";
            return 2;
        }
        std::cout << "ok: " << r.spec->size() << " equations, start " << r.spec->start()
                  << "\n";
        return 0;
    }

    if (extract->parsed()) {
        ThreadSpec spec = load_spec(ex_opts.input);
        spill(ex_out, extract_lts(spec.start_handle()).to_json());
        return 0;
    }

    if (compose_cmd->parsed()) {
        ThreadSpec spec = load_spec(co_opts.input);
        CompositionConfig cfg = co_opts.composition();
        cfg.abstraction = parse_abstraction(co_abstract);
        spill(co_out, compose(spec.start_handle(), cfg).to_json());
        return 0;
    }

    if (check->parsed()) {
        ThreadSpec spec = load_spec(ch_opts.input);
        EquivConfig ecfg;
        ecfg.lhs_abstraction = parse_abstraction(ch_lhs);
        ecfg.rhs_abstraction = parse_abstraction(ch_rhs);
        ecfg.rooted = !ch_no_root;
        ecfg.divergence_sensitive = ch_divergence;
        CheckOutcome out = check_thread(spec.start_handle(), ch_opts.composition(), ecfg);
        if (ch_json) {
            nlohmann::json j;
            j["equivalent"] = out.verdict.equivalent;
            if (out.verdict.counterexample) {
                j["counterexample"] = nlohmann::json::array();
                for (const Label& l : out.verdict.counterexample->trace)
                    j["counterexample"].push_back(l.str());
                j["obligation"] = out.verdict.counterexample->obligation;
            }
            std::cout << j.dump(2) << "\n";
        } else if (out.verdict.equivalent) {
            std::cout << "equivalent (reference " << out.lhs.states << " states, protocol "
                      << out.rhs.states << " states)\n";
        } else {
            std::cout << "not equivalent\n" << out.verdict.counterexample->str() << "\n";
            if (out.verdict.counterexample->replayable)
                print_trace_replay(out.protocol.abstracted(ecfg.rhs_abstraction),
                                   out.verdict.counterexample->trace);
        }
        return out.verdict.equivalent ? 0 : 1;
    }

    if (explore->parsed()) {
        ThreadSpec spec = load_spec(xp_opts.input);
        ExplorationReport report;
        Lts lts = compose(spec.start_handle(), xp_opts.composition(), &report);
        if (!xp_raw) lts = normalize_termination(lts);
        LtsStats st = explore_stats(lts);
        std::vector<int> wedged = lts.protocol_deadlock_states();
        std::cout << "states: " << st.states << "\n"
                  << "transitions: " << st.transitions << "\n"
                  << "terminating: " << st.terminating_states << "\n"
                  << "deadlocks: " << st.deadlock_states << "\n"
                  << "protocol deadlocks: " << wedged.size() << "\n";
        for (int s : wedged)
            std::cout << "deadlock state: " << lts.state_desc(s) << "\n";
        if (!report.violations.empty()) {
            std::cout << "invariant violations: " << report.violations.size() << "\n";
            for (const std::string& v : report.violations) std::cout << "  " << v << "\n";
        }
        for (const std::string& v : report.range_notes) std::cout << "range note: " << v << "\n";
        if (report.discarded_messages > 0)
            std::cout << "stale messages discarded: " << report.discarded_messages << "\n";
        return xp_fail_deadlock && !wedged.empty() ? 1 : 0;
    }

    if (simulate_cmd->parsed()) {
        ThreadSpec spec = load_spec(si_opts.input);
        SimConfig cfg;
        cfg.maxlen = si_opts.maxlen;
        cfg.strategy = parse_strategy(si_opts.strategy);
        cfg.latency_msg = si_latency_msg;
        cfg.latency_reply = si_latency_reply;
        cfg.exec_time = si_exec;
        cfg.env = Environment::parse(si_env);
        cfg.env.seed = si_seed;
        cfg.horizon = si_horizon;

        std::string stem = si_opts.input;
        if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
            stem.erase(0, slash + 1);
        if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem.erase(dot);

        std::vector<int> maxlens{cfg.maxlen};
        if (!si_sweep.empty()) {
            maxlens.clear();
            std::stringstream ss(si_sweep);
            std::string tok;
            while (std::getline(ss, tok, ',')) maxlens.push_back(std::stoi(tok));
        }
        std::vector<SelectionStrategy> strategies{cfg.strategy};
        if (!si_strategies.empty()) {
            strategies.clear();
            std::stringstream ss(si_strategies);
            std::string tok;
            while (std::getline(ss, tok, ',')) strategies.push_back(parse_strategy(tok));
        }

        spill(si_csv, sweep_csv(spec.start_handle(), stem, cfg, maxlens, strategies));
        if (!si_events.empty()) {
            SimResult r = simulate(spec.start_handle(), cfg);
            std::string log;
            for (const std::string& line : r.events) log += line + "\n";
            spill(si_events, log);
        }
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
