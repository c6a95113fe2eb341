// Shared fixtures: hand-built LTSs, random specs/LTSs, trace enumeration and
// the naive thread-bisimulation oracle the minimization tests check against.

#ifndef ISPLAB_TESTS_HELPERS_HPP
#define ISPLAB_TESTS_HELPERS_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/lts.hpp"

namespace isplab::testing {

inline ThreadSpec spec_of(const std::string& text) {
    ParseResult r = parse_spec(text);
    if (!r.ok()) {
        std::string msg = "bad test spec:";
        for (const ParseError& e : r.errors) msg += " " + e.str();
        throw std::runtime_error(msg);
    }
    return std::move(*r.spec);
}

// Tiny builder for hand-written LTSs: states named on demand, labels by
// visible name ("a", "b", ...) or "tau".
class LtsBuilder {
public:
    LtsBuilder& edge(const std::string& from, const std::string& label, const std::string& to) {
        Label l = label == "tau" ? Label::tau() : Label::snd_f(label, label);
        lts_.add_transition(state(from), l, state(to));
        return *this;
    }
    LtsBuilder& terminating(const std::string& name) {
        lts_.set_terminating(state(name), true);
        return *this;
    }
    Lts build(const std::string& initial) {
        lts_.set_initial(state(initial));
        return lts_;
    }

private:
    int state(const std::string& name) {
        auto it = ids_.find(name);
        if (it != ids_.end()) return it->second;
        int id = lts_.add_state(name);
        ids_.emplace(name, id);
        return id;
    }
    Lts lts_;
    std::map<std::string, int> ids_;
};

// All maximal visible traces (tau elided), each path visiting a state at most
// `revisit` times so loops terminate.
inline std::set<std::vector<std::string>> visible_traces(const Lts& lts, int revisit = 2,
                                                         int max_len = 12) {
    std::set<std::vector<std::string>> res;
    struct Frame {
        int state;
        std::vector<std::string> trace;
        std::map<int, int> visits;
    };
    std::vector<Frame> stack{{lts.initial(), {}, {}}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (++f.visits[f.state] > revisit || static_cast<int>(f.trace.size()) > max_len) {
            res.insert(f.trace);
            continue;
        }
        auto out = lts.out(f.state);
        if (out.empty()) {
            res.insert(f.trace);
            continue;
        }
        for (const Transition& t : out) {
            Frame next = f;
            next.state = t.to;
            if (!lts.label(t.label).is_tau()) next.trace.push_back(lts.label(t.label).str());
            stack.push_back(std::move(next));
        }
    }
    return res;
}

// Random guarded specs over a two-action alphabet.
inline ThreadSpec random_spec(std::mt19937_64& rng, int max_equations = 5) {
    std::uniform_int_distribution<int> count(1, max_equations);
    int n = count(rng);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i));
    std::vector<Equation> eqs;
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> target(0, n - 1);
    for (int i = 0; i < n; ++i) {
        Equation eq;
        eq.name = names[static_cast<size_t>(i)];
        switch (kind(rng)) {
            case 0: eq.kind = RhsKind::Terminate; break;
            case 1: eq.kind = RhsKind::Deadlock; break;
            default:
                eq.kind = RhsKind::Postcond;
                eq.action = kind(rng) % 2 ? BasicAction{"f", "m"} : BasicAction{"g", "n"};
                eq.on_true = names[static_cast<size_t>(target(rng))];
                eq.on_false = names[static_cast<size_t>(target(rng))];
        }
        eqs.push_back(std::move(eq));
    }
    return ThreadSpec(std::move(eqs), names.front());
}

// Random small LTSs over alphabet {a, b, tau} with random termination flags.
inline Lts random_lts(std::mt19937_64& rng, int max_states = 10) {
    std::uniform_int_distribution<int> count(1, max_states);
    int n = count(rng);
    Lts lts;
    for (int s = 0; s < n; ++s)
        lts.add_state("q" + std::to_string(s), rng() % 5 == 0);
    lts.set_initial(0);
    std::uniform_int_distribution<int> edges(0, 2 * n);
    std::uniform_int_distribution<int> state(0, n - 1);
    int m = edges(rng);
    const Label labels[3] = {Label::snd_f("a", "a"), Label::snd_f("b", "b"), Label::tau()};
    for (int i = 0; i < m; ++i)
        lts.add_transition(state(rng), labels[rng() % 3], state(rng));
    return lts;
}

// Naive greatest-fixpoint bisimulation over the states of two specs: node
// labels must agree, postconditional branches must stay related.  Used as
// the independent oracle for minimize().
inline bool thread_states_bisimilar(const ThreadSpec& a, const std::string& sa,
                                    const ThreadSpec& b, const std::string& sb) {
    int na = a.size(), nb = b.size();
    std::vector<std::vector<bool>> rel(static_cast<size_t>(na),
                                       std::vector<bool>(static_cast<size_t>(nb), true));
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < nb; ++j) {
                if (!rel[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
                const Equation& ea = a.equation(i);
                const Equation& eb = b.equation(j);
                bool ok = ea.kind == eb.kind;
                if (ok && ea.kind == RhsKind::Postcond) {
                    ok = ea.action == eb.action &&
                         rel[static_cast<size_t>(a.index_of(ea.on_true))]
                            [static_cast<size_t>(b.index_of(eb.on_true))] &&
                         rel[static_cast<size_t>(a.index_of(ea.on_false))]
                            [static_cast<size_t>(b.index_of(eb.on_false))];
                }
                if (!ok) {
                    rel[static_cast<size_t>(i)][static_cast<size_t>(j)] = false;
                    changed = true;
                }
            }
    }
    return rel[static_cast<size_t>(a.index_of(sa))][static_cast<size_t>(b.index_of(sb))];
}

}  // namespace isplab::testing

#endif
