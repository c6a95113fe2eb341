#include "isplab/equivalence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace isplab {

namespace {

// Internal markers for the prepared graphs.  The tick edge encodes the
// termination predicate as a visible action; div marks silent cycles when
// divergence sensitivity is requested.  Neither can collide with labels
// arising from specs (identifier characters exclude '@').
Label tick_label() { return Label::snd_f("@tick", "@tick"); }
Label div_label() { return Label::snd_f("@div", "@div"); }

struct Edge {
    int to = 0;
    int label = 0;
};

// One side of the comparison after normalization/abstraction, flattened into
// adjacency lists over a shared label table.
struct Prepared {
    int n = 0;
    int initial = 0;
    std::vector<std::vector<Edge>> out;
};

struct Arena {
    std::map<Label, int> label_ids;
    std::vector<Label> labels;
    int tau = -1;

    int intern(const Label& l) {
        auto it = label_ids.find(l);
        if (it != label_ids.end()) return it->second;
        labels.push_back(l);
        label_ids.emplace(l, static_cast<int>(labels.size()) - 1);
        return static_cast<int>(labels.size()) - 1;
    }
};

// States on a cycle of silent transitions (self-loops included).
std::vector<bool> tau_cycle_states(const std::vector<std::vector<Edge>>& out, int tau) {
    int n = static_cast<int>(out.size());
    // Tarjan over the tau-subgraph, iterative.
    std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<size_t>(n), false), result(static_cast<size_t>(n), false);
    std::vector<int> stack;
    int counter = 0;
    struct Frame {
        int v;
        size_t ei;
    };
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<size_t>(root)] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
        stack.push_back(root);
        on_stack[static_cast<size_t>(root)] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            bool descended = false;
            while (f.ei < out[static_cast<size_t>(f.v)].size()) {
                const Edge& e = out[static_cast<size_t>(f.v)][f.ei++];
                if (e.label != tau) continue;
                if (index[static_cast<size_t>(e.to)] == -1) {
                    index[static_cast<size_t>(e.to)] = low[static_cast<size_t>(e.to)] = counter++;
                    stack.push_back(e.to);
                    on_stack[static_cast<size_t>(e.to)] = true;
                    frames.push_back({e.to, 0});
                    descended = true;
                    break;
                }
                if (on_stack[static_cast<size_t>(e.to)])
                    low[static_cast<size_t>(f.v)] =
                        std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(e.to)]);
            }
            if (descended) continue;
            int v = f.v;
            frames.pop_back();
            if (!frames.empty())
                low[static_cast<size_t>(frames.back().v)] =
                    std::min(low[static_cast<size_t>(frames.back().v)], low[static_cast<size_t>(v)]);
            if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
                std::vector<int> comp;
                for (;;) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<size_t>(w)] = false;
                    comp.push_back(w);
                    if (w == v) break;
                }
                bool cyclic = comp.size() > 1;
                if (!cyclic)
                    for (const Edge& e : out[static_cast<size_t>(comp[0])])
                        if (e.label == tau && e.to == comp[0]) cyclic = true;
                if (cyclic)
                    for (int w : comp) result[static_cast<size_t>(w)] = true;
            }
        }
    }
    return result;
}

// Quotient by strong bisimilarity.  Strongly bisimilar states are branching
// bisimilar, so collapsing them first is sound and removes most of the
// interleaving diamonds of composed systems before the costlier rounds run.
Prepared strong_quotient(const Prepared& p) {
    const int n = p.n;
    std::vector<int> block(static_cast<size_t>(n), 0);
    int blocks = 1;
    std::vector<std::vector<long long>> sigs(static_cast<size_t>(n));
    for (;;) {
        struct KeyHash {
            size_t operator()(const std::pair<int, const std::vector<long long>*>& k) const {
                size_t h = static_cast<size_t>(k.first) * 1000003u;
                for (long long v : *k.second) h = h * 1099511628211ull + static_cast<size_t>(v);
                return h;
            }
        };
        struct KeyEq {
            bool operator()(const std::pair<int, const std::vector<long long>*>& a,
                            const std::pair<int, const std::vector<long long>*>& b) const {
                return a.first == b.first && *a.second == *b.second;
            }
        };
        for (int s = 0; s < n; ++s) {
            std::vector<long long>& sig = sigs[static_cast<size_t>(s)];
            sig.clear();
            for (const Edge& e : p.out[static_cast<size_t>(s)])
                sig.push_back((static_cast<long long>(e.label) << 32) |
                              static_cast<unsigned>(block[static_cast<size_t>(e.to)]));
            std::sort(sig.begin(), sig.end());
            sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        }
        std::unordered_map<std::pair<int, const std::vector<long long>*>, int, KeyHash, KeyEq> ids;
        ids.reserve(static_cast<size_t>(blocks) * 2);
        std::vector<int> next(static_cast<size_t>(n));
        for (int s = 0; s < n; ++s) {
            auto [it, fresh] = ids.emplace(
                std::make_pair(block[static_cast<size_t>(s)], &sigs[static_cast<size_t>(s)]),
                static_cast<int>(ids.size()));
            (void)fresh;
            next[static_cast<size_t>(s)] = it->second;
        }
        int count = static_cast<int>(ids.size());
        block = std::move(next);
        if (count == blocks) break;
        blocks = count;
    }

    Prepared q;
    q.n = blocks;
    q.initial = block[static_cast<size_t>(p.initial)];
    q.out.assign(static_cast<size_t>(blocks), {});
    std::vector<bool> done(static_cast<size_t>(blocks), false);
    for (int s = 0; s < n; ++s) {
        int b = block[static_cast<size_t>(s)];
        if (done[static_cast<size_t>(b)]) continue;
        done[static_cast<size_t>(b)] = true;
        std::vector<long long> edges;
        for (const Edge& e : p.out[static_cast<size_t>(s)])
            edges.push_back((static_cast<long long>(e.label) << 32) |
                            static_cast<unsigned>(block[static_cast<size_t>(e.to)]));
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (long long packed : edges)
            q.out[static_cast<size_t>(b)].push_back(
                {static_cast<int>(packed & 0xffffffff), static_cast<int>(packed >> 32)});
    }
    return q;
}

Prepared prepare(const Lts& lts, const std::vector<LabelKind>& abstraction, bool divergence,
                 Arena& arena) {
    Lts shaped = normalize_termination(lts).abstracted(abstraction).reachable_part();
    Prepared p;
    p.n = shaped.num_states() + 1;  // extra tick sink
    p.initial = shaped.initial();
    p.out.assign(static_cast<size_t>(p.n), {});
    int sink = p.n - 1;
    int tick = arena.intern(tick_label());
    for (const Transition& t : shaped.transitions())
        p.out[static_cast<size_t>(t.from)].push_back({t.to, arena.intern(shaped.label(t.label))});
    for (int s = 0; s < shaped.num_states(); ++s)
        if (shaped.terminating(s)) p.out[static_cast<size_t>(s)].push_back({sink, tick});
    p = strong_quotient(p);
    if (divergence) {
        std::vector<bool> marked = tau_cycle_states(p.out, arena.tau);
        int div = arena.intern(div_label());
        for (int s = 0; s < p.n; ++s)
            if (marked[static_cast<size_t>(s)]) p.out[static_cast<size_t>(s)].push_back({s, div});
    }
    return p;
}

// Disjoint union of the two prepared sides.
struct Union {
    int n = 0;
    int init1 = 0, init2 = 0;
    int offset2 = 0;
    std::vector<std::vector<Edge>> out;
};

Union join(const Prepared& a, const Prepared& b) {
    Union u;
    u.n = a.n + b.n;
    u.offset2 = a.n;
    u.init1 = a.initial;
    u.init2 = a.n + b.initial;
    u.out = a.out;
    u.out.resize(static_cast<size_t>(u.n));
    for (int s = 0; s < b.n; ++s)
        for (const Edge& e : b.out[static_cast<size_t>(s)])
            u.out[static_cast<size_t>(a.n + s)].push_back({a.n + e.to, e.label});
    return u;
}

// Signature-based partition refinement for branching bisimulation: the
// signature of a state is the set of non-inert moves reachable through
// silent steps inside its own block.  Per round, the inert subgraph is
// condensed into strongly connected components and signatures propagate in
// reverse topological order, so each round costs about one graph pass.
std::vector<int> refine(const Union& u, int tau) {
    const int n = u.n;
    std::vector<int> block(static_cast<size_t>(n), 0);
    int blocks = 1;

    std::vector<int> comp(static_cast<size_t>(n));
    std::vector<int> index(static_cast<size_t>(n)), low(static_cast<size_t>(n));
    std::vector<bool> on_stack(static_cast<size_t>(n));
    std::vector<int> tarjan_stack, pop_order;

    auto inert = [&](int from, const Edge& e) {
        return e.label == tau && block[static_cast<size_t>(e.to)] == block[static_cast<size_t>(from)];
    };

    for (;;) {
        // Tarjan over the inert subgraph; pop order lists components with
        // successors first.
        std::fill(index.begin(), index.end(), -1);
        std::fill(on_stack.begin(), on_stack.end(), false);
        pop_order.clear();
        int counter = 0, comps = 0;
        struct Frame {
            int v;
            size_t ei;
        };
        std::vector<Frame> frames;
        for (int root = 0; root < n; ++root) {
            if (index[static_cast<size_t>(root)] != -1) continue;
            frames.push_back({root, 0});
            index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
            tarjan_stack.push_back(root);
            on_stack[static_cast<size_t>(root)] = true;
            while (!frames.empty()) {
                Frame& f = frames.back();
                bool descended = false;
                auto& edges = u.out[static_cast<size_t>(f.v)];
                while (f.ei < edges.size()) {
                    const Edge& e = edges[f.ei++];
                    if (!inert(f.v, e)) continue;
                    if (index[static_cast<size_t>(e.to)] == -1) {
                        index[static_cast<size_t>(e.to)] = low[static_cast<size_t>(e.to)] = counter++;
                        tarjan_stack.push_back(e.to);
                        on_stack[static_cast<size_t>(e.to)] = true;
                        frames.push_back({e.to, 0});
                        descended = true;
                        break;
                    }
                    if (on_stack[static_cast<size_t>(e.to)])
                        low[static_cast<size_t>(f.v)] = std::min(low[static_cast<size_t>(f.v)],
                                                                 index[static_cast<size_t>(e.to)]);
                }
                if (descended) continue;
                int v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[static_cast<size_t>(frames.back().v)] = std::min(
                        low[static_cast<size_t>(frames.back().v)], low[static_cast<size_t>(v)]);
                if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
                    int c = comps++;
                    for (;;) {
                        int w = tarjan_stack.back();
                        tarjan_stack.pop_back();
                        on_stack[static_cast<size_t>(w)] = false;
                        comp[static_cast<size_t>(w)] = c;
                        if (w == v) break;
                    }
                    pop_order.push_back(c);
                }
            }
        }

        // Signatures per component: own non-inert moves plus the signatures
        // of inert successors, in pop (reverse topological) order.
        std::vector<std::vector<long long>> sig(static_cast<size_t>(comps));
        std::vector<std::vector<int>> members(static_cast<size_t>(comps));
        for (int s = 0; s < n; ++s) members[static_cast<size_t>(comp[static_cast<size_t>(s)])].push_back(s);
        for (int c : pop_order) {
            std::vector<long long>& acc = sig[static_cast<size_t>(c)];
            for (int s : members[static_cast<size_t>(c)]) {
                for (const Edge& e : u.out[static_cast<size_t>(s)]) {
                    if (inert(s, e)) {
                        int tc = comp[static_cast<size_t>(e.to)];
                        if (tc != c)
                            acc.insert(acc.end(), sig[static_cast<size_t>(tc)].begin(),
                                       sig[static_cast<size_t>(tc)].end());
                    } else {
                        acc.push_back((static_cast<long long>(e.label) << 32) |
                                      static_cast<unsigned>(block[static_cast<size_t>(e.to)]));
                    }
                }
            }
            std::sort(acc.begin(), acc.end());
            acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        }

        struct KeyHash {
            size_t operator()(const std::pair<int, const std::vector<long long>*>& k) const {
                size_t h = static_cast<size_t>(k.first) * 1000003u;
                for (long long v : *k.second)
                    h = h * 1099511628211ull + static_cast<size_t>(v);
                return h;
            }
        };
        struct KeyEq {
            bool operator()(const std::pair<int, const std::vector<long long>*>& a,
                            const std::pair<int, const std::vector<long long>*>& b) const {
                return a.first == b.first && *a.second == *b.second;
            }
        };
        std::unordered_map<std::pair<int, const std::vector<long long>*>, int, KeyHash, KeyEq> ids;
        ids.reserve(static_cast<size_t>(comps) * 2);
        std::vector<int> next(static_cast<size_t>(n));
        for (int s = 0; s < n; ++s) {
            auto key = std::make_pair(block[static_cast<size_t>(s)],
                                      &sig[static_cast<size_t>(comp[static_cast<size_t>(s)])]);
            auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
            (void)fresh;
            next[static_cast<size_t>(s)] = it->second;
        }
        int count = static_cast<int>(ids.size());
        if (count == blocks) return next;
        blocks = count;
        block = std::move(next);
    }
}

bool root_condition(const Union& u, const std::vector<int>& block) {
    auto moves = [&](int s) {
        std::set<std::pair<int, int>> m;
        for (const Edge& e : u.out[static_cast<size_t>(s)])
            m.emplace(e.label, block[static_cast<size_t>(e.to)]);
        return m;
    };
    return moves(u.init1) == moves(u.init2);
}

// ---- counterexample machinery -------------------------------------------

using StateSet = std::vector<int>;  // sorted

StateSet tau_closure(const Union& u, int tau, StateSet s) {
    std::set<int> seen(s.begin(), s.end());
    std::vector<int> stack(s.begin(), s.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const Edge& e : u.out[static_cast<size_t>(v)])
            if (e.label == tau && seen.insert(e.to).second) stack.push_back(e.to);
    }
    return StateSet(seen.begin(), seen.end());
}

StateSet visible_step(const Union& u, int tau, const StateSet& s, int label) {
    std::set<int> next;
    for (int v : s)
        for (const Edge& e : u.out[static_cast<size_t>(v)])
            if (e.label == label) next.insert(e.to);
    return tau_closure(u, tau, StateSet(next.begin(), next.end()));
}

// Weak menu of one state: visible labels reachable via silent steps.
std::set<int> weak_menu(const Union& u, int tau, int s) {
    std::set<int> menu;
    for (int v : tau_closure(u, tau, {s}))
        for (const Edge& e : u.out[static_cast<size_t>(v)])
            if (e.label != tau) menu.insert(e.label);
    return menu;
}

std::string render_menu(const Arena& arena, const std::set<int>& menu) {
    int tick = -1;
    if (auto it = arena.label_ids.find(tick_label()); it != arena.label_ids.end())
        tick = it->second;
    std::string s = "{";
    bool first = true;
    for (int l : menu) {
        if (!first) s += ", ";
        first = false;
        s += l == tick ? "termination" : arena.labels[static_cast<size_t>(l)].str();
    }
    return s + "}";
}

struct CexSearch {
    const Union& u;
    const Arena& arena;
    int tau;
    const std::vector<int>& block;

    // Menus present on one side and missing on the other; nullopt when the
    // sets agree signature-wise.
    std::optional<std::string> signature_mismatch(const StateSet& s1, const StateSet& s2) {
        std::set<std::set<int>> menus1, menus2;
        for (int v : s1) menus1.insert(weak_menu(u, tau, v));
        for (int v : s2) menus2.insert(weak_menu(u, tau, v));
        if (menus1 == menus2) return std::nullopt;
        int tick = -1;
        if (auto it = arena.label_ids.find(tick_label()); it != arena.label_ids.end())
            tick = it->second;
        auto describe = [&](const std::set<int>& menu, const char* side) {
            bool term = tick >= 0 && menu.count(tick);
            if (menu.empty()) return std::string("deadlock reachable on the ") + side +
                                     " side only";
            std::string what = term && menu.size() == 1 ? "termination" : render_menu(arena, menu);
            return "state offering " + what + " reachable on the " + std::string(side) +
                   " side only";
        };
        for (const auto& m : menus1)
            if (!menus2.count(m)) return describe(m, "left");
        for (const auto& m : menus2)
            if (!menus1.count(m)) return describe(m, "right");
        return std::nullopt;
    }

    bool block_sets_differ(const StateSet& s1, const StateSet& s2) {
        std::set<int> b1, b2;
        for (int v : s1) b1.insert(block[static_cast<size_t>(v)]);
        for (int v : s2) b2.insert(block[static_cast<size_t>(v)]);
        return b1 != b2;
    }
};

}  // namespace

std::string Counterexample::str() const {
    std::string s = "trace:";
    if (trace.empty()) s += " (empty)";
    for (const Label& l : trace) s += " " + l.str();
    return s + "\nobligation: " + obligation;
}

Lts normalize_termination(const Lts& lts) {
    bool any = false;
    for (const Transition& t : lts.transitions())
        if (lts.label(t.label).kind == LabelKind::Stp) any = true;
    if (!any) return lts;

    Lts res;
    for (int s = 0; s < lts.num_states(); ++s)
        res.add_state(lts.state_name(s), lts.terminating(s), lts.state_desc(s));
    int sink = res.add_state("@sqrt", true);
    res.set_initial(lts.initial());
    for (const Transition& t : lts.transitions()) {
        const Label& l = lts.label(t.label);
        res.add_transition(t.from, l, l.kind == LabelKind::Stp ? sink : t.to);
    }
    return res.reachable_part();
}

namespace {

EquivVerdict branching_bisim_impl(const Lts& l1, const Lts& l2, const EquivConfig& cfg) {
    Arena arena;
    arena.tau = arena.intern(Label::tau());
    Prepared p1 = prepare(l1, cfg.lhs_abstraction, cfg.divergence_sensitive, arena);
    Prepared p2 = prepare(l2, cfg.rhs_abstraction, cfg.divergence_sensitive, arena);
    Union u = join(p1, p2);
    std::vector<int> block = refine(u, arena.tau);

    bool same_class = block[static_cast<size_t>(u.init1)] == block[static_cast<size_t>(u.init2)];
    bool ok = cfg.rooted ? same_class : root_condition(u, block);
    if (ok) return {true, std::nullopt};

    if (!cfg.rooted && same_class) {
        // Only the strict root condition fails: initial moves differ.
        Counterexample cex;
        cex.obligation =
            "root condition: the initial states offer different first moves before any "
            "silent step";
        return {false, std::move(cex)};
    }

    // Breadth-first search over weak-trace set pairs for a shortest witness.
    CexSearch search{u, arena, arena.tau, block};
    struct Node {
        StateSet s1, s2;
        std::vector<int> trace;
    };
    std::vector<Node> queue{{tau_closure(u, arena.tau, {u.init1}),
                             tau_closure(u, arena.tau, {u.init2}),
                             {}}};
    std::set<std::pair<StateSet, StateSet>> visited{{queue[0].s1, queue[0].s2}};
    std::optional<std::vector<int>> block_fallback;
    constexpr size_t kSearchBound = 50000;

    auto to_labels = [&](const std::vector<int>& ids) {
        std::vector<Label> out;
        for (int id : ids) out.push_back(arena.labels[static_cast<size_t>(id)]);
        return out;
    };

    for (size_t qi = 0; qi < queue.size() && qi < kSearchBound; ++qi) {
        Node node = queue[qi];
        if (auto mismatch = search.signature_mismatch(node.s1, node.s2)) {
            Counterexample cex;
            cex.trace = to_labels(node.trace);
            cex.obligation = *mismatch;
            return {false, std::move(cex)};
        }
        if (!block_fallback && search.block_sets_differ(node.s1, node.s2))
            block_fallback = node.trace;

        std::set<int> alphabet;
        for (int v : node.s1)
            for (const Edge& e : u.out[static_cast<size_t>(v)])
                if (e.label != arena.tau) alphabet.insert(e.label);
        for (int v : node.s2)
            for (const Edge& e : u.out[static_cast<size_t>(v)])
                if (e.label != arena.tau) alphabet.insert(e.label);
        for (int a : alphabet) {
            Node next;
            next.s1 = visible_step(u, arena.tau, node.s1, a);
            next.s2 = visible_step(u, arena.tau, node.s2, a);
            if (next.s1.empty() && next.s2.empty()) continue;
            if (!visited.emplace(next.s1, next.s2).second) continue;
            next.trace = node.trace;
            next.trace.push_back(a);
            queue.push_back(std::move(next));
        }
    }

    Counterexample cex;
    if (block_fallback) {
        cex.trace = to_labels(*block_fallback);
        cex.obligation =
            "branching obligation: the equivalence classes reachable after this trace differ";
    } else {
        cex.obligation =
            "states distinguished by branching structure; no linear trace witness exists";
        cex.replayable = false;
    }
    return {false, std::move(cex)};
}

}  // namespace

EquivVerdict branching_bisim(const Lts& l1, const Lts& l2, const EquivConfig& cfg) {
    EquivVerdict v = branching_bisim_impl(l1, l2, cfg);
    if (!v.equivalent && v.counterexample &&
        !counterexample_valid(l1, l2, cfg, *v.counterexample))
        throw std::logic_error("counterexample failed its replay check: " +
                               v.counterexample->str());
    return v;
}

bool counterexample_valid(const Lts& l1, const Lts& l2, const EquivConfig& cfg,
                          const Counterexample& cex) {
    if (!cex.replayable) return true;

    Arena arena;
    arena.tau = arena.intern(Label::tau());
    Prepared p1 = prepare(l1, cfg.lhs_abstraction, cfg.divergence_sensitive, arena);
    Prepared p2 = prepare(l2, cfg.rhs_abstraction, cfg.divergence_sensitive, arena);
    Union u = join(p1, p2);

    if (cex.trace.empty() && cex.obligation.rfind("root condition", 0) == 0) {
        std::vector<int> block = refine(u, arena.tau);
        return !root_condition(u, block);
    }

    StateSet s1 = tau_closure(u, arena.tau, {u.init1});
    StateSet s2 = tau_closure(u, arena.tau, {u.init2});
    for (const Label& l : cex.trace) {
        auto it = arena.label_ids.find(l);
        if (it == arena.label_ids.end()) return false;  // label absent from both systems
        s1 = visible_step(u, arena.tau, s1, it->second);
        s2 = visible_step(u, arena.tau, s2, it->second);
        if (s1.empty() && s2.empty()) return false;  // trace not replayable
    }

    std::vector<int> block = refine(u, arena.tau);
    CexSearch search{u, arena, arena.tau, block};
    if (search.signature_mismatch(s1, s2)) return true;
    return search.block_sets_differ(s1, s2);
}

bool naive_bisim_oracle(const Lts& l1, const Lts& l2, const EquivConfig& cfg, int state_bound) {
    if (l1.num_states() + l2.num_states() > state_bound)
        throw std::invalid_argument("naive_bisim_oracle: combined state count exceeds bound");

    // Own pipeline, kept deliberately plain: normalize, abstract, flatten.
    auto flatten = [&](const Lts& lts, const std::vector<LabelKind>& abstraction, Arena& arena) {
        Lts shaped = normalize_termination(lts).abstracted(abstraction).reachable_part();
        Prepared p;
        p.n = shaped.num_states() + 1;
        p.initial = shaped.initial();
        p.out.assign(static_cast<size_t>(p.n), {});
        int tick = arena.intern(tick_label());
        for (const Transition& t : shaped.transitions())
            p.out[static_cast<size_t>(t.from)].push_back({t.to, arena.intern(shaped.label(t.label))});
        for (int s = 0; s < shaped.num_states(); ++s)
            if (shaped.terminating(s)) p.out[static_cast<size_t>(s)].push_back({p.n - 1, tick});
        if (cfg.divergence_sensitive) {
            // Same cycle marking, recomputed here by brute-force reachability.
            int div = arena.intern(div_label());
            for (int s = 0; s < p.n; ++s) {
                std::set<int> reach;
                std::vector<int> stack;
                for (const Edge& e : p.out[static_cast<size_t>(s)])
                    if (e.label == arena.tau) stack.push_back(e.to);
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    if (!reach.insert(v).second) continue;
                    for (const Edge& e : p.out[static_cast<size_t>(v)])
                        if (e.label == arena.tau) stack.push_back(e.to);
                }
                if (reach.count(s)) p.out[static_cast<size_t>(s)].push_back({s, div});
            }
        }
        return p;
    };

    Arena arena;
    arena.tau = arena.intern(Label::tau());
    Prepared p1 = flatten(l1, cfg.lhs_abstraction, arena);
    Prepared p2 = flatten(l2, cfg.rhs_abstraction, arena);
    Union u = join(p1, p2);
    const int n = u.n;
    const int tau = arena.tau;

    std::vector<std::vector<bool>> rel(static_cast<size_t>(n),
                                       std::vector<bool>(static_cast<size_t>(n), true));

    auto weak_reach = [&](int s) {  // states reachable via silent steps
        std::set<int> seen{s};
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const Edge& e : u.out[static_cast<size_t>(v)])
                if (e.label == tau && seen.insert(e.to).second) stack.push_back(e.to);
        }
        return std::vector<int>(seen.begin(), seen.end());
    };
    std::vector<std::vector<int>> closure(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) closure[static_cast<size_t>(s)] = weak_reach(s);

    auto matched = [&](int s, int t) {
        // Every move of s must be answered by t modulo silent stuttering.
        for (const Edge& e : u.out[static_cast<size_t>(s)]) {
            bool ok = e.label == tau && rel[static_cast<size_t>(e.to)][static_cast<size_t>(t)];
            if (!ok) {
                for (int t0 : closure[static_cast<size_t>(t)]) {
                    if (!rel[static_cast<size_t>(s)][static_cast<size_t>(t0)]) continue;
                    for (const Edge& f : u.out[static_cast<size_t>(t0)]) {
                        if (f.label != e.label) continue;
                        if (rel[static_cast<size_t>(e.to)][static_cast<size_t>(f.to)]) {
                            ok = true;
                            break;
                        }
                    }
                    if (ok) break;
                }
            }
            if (!ok) return false;
        }
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                if (!rel[static_cast<size_t>(s)][static_cast<size_t>(t)]) continue;
                if (!matched(s, t) || !matched(t, s)) {
                    rel[static_cast<size_t>(s)][static_cast<size_t>(t)] = false;
                    changed = true;
                }
            }
    }

    if (cfg.rooted) return rel[static_cast<size_t>(u.init1)][static_cast<size_t>(u.init2)];

    // Strict root condition on the given roots.
    auto root_ok = [&](int s, int t) {
        for (const Edge& e : u.out[static_cast<size_t>(s)]) {
            bool ok = false;
            for (const Edge& f : u.out[static_cast<size_t>(t)])
                if (f.label == e.label && rel[static_cast<size_t>(e.to)][static_cast<size_t>(f.to)]) {
                    ok = true;
                    break;
                }
            if (!ok) return false;
        }
        return true;
    };
    return root_ok(u.init1, u.init2) && root_ok(u.init2, u.init1);
}

}  // namespace isplab
