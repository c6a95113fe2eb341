#include "isplab/bta.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace isplab {

std::string ExtAction::str() const {
    switch (kind) {
        case ExtKind::Basic: return action.str();
        case ExtKind::Stop: return "stop";
        case ExtKind::Dead: return "dead";
    }
    return "?";
}

ThreadSpec::ThreadSpec(std::vector<Equation> equations, std::string start,
                       std::map<BasicAction, double> probabilities)
    : equations_(std::move(equations)),
      start_(std::move(start)),
      probabilities_(std::move(probabilities)) {
    for (int i = 0; i < static_cast<int>(equations_.size()); ++i) {
        if (!index_.emplace(equations_[i].name, i).second)
            throw std::invalid_argument("duplicate equation for " + equations_[i].name);
    }
    if (equations_.empty()) throw std::invalid_argument("empty specification");
    if (index_.find(start_) == index_.end())
        throw std::invalid_argument("unknown start variable " + start_);
    for (const Equation& eq : equations_) {
        if (eq.kind != RhsKind::Postcond) continue;
        if (index_.find(eq.on_true) == index_.end())
            throw std::invalid_argument("unknown variable " + eq.on_true);
        if (index_.find(eq.on_false) == index_.end())
            throw std::invalid_argument("unknown variable " + eq.on_false);
    }
    compute_classes();
}

int ThreadSpec::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

double ThreadSpec::prob(const BasicAction& a) const {
    auto it = probabilities_.find(a);
    return it == probabilities_.end() ? 0.5 : it->second;
}

int ThreadSpec::bisim_class(int state) const {
    if (state < 0) return dead_class_;
    return class_of_.at(static_cast<size_t>(state));
}

ThreadHandle ThreadSpec::handle(const std::string& name) const {
    int idx = index_of(name);
    if (idx < 0) throw std::invalid_argument("unknown variable " + name);
    return {this, idx};
}

ThreadHandle ThreadSpec::start_handle() const { return {this, index_of(start_)}; }

// Partition refinement over states 0..n-1 plus the virtual dead state n.
// Node label: Terminate / Deadlock / action; successors (thrt,thrf) for
// postconditionals.  The signature of a deadlock node equals the virtual
// dead node's, so they end up in one class.
void ThreadSpec::compute_classes() {
    const int n = static_cast<int>(equations_.size());
    std::vector<int> cls(static_cast<size_t>(n) + 1, 0);

    auto node_label = [&](int s) -> std::pair<int, const BasicAction*> {
        if (s == n) return {1, nullptr};  // virtual dead node
        const Equation& eq = equations_[static_cast<size_t>(s)];
        switch (eq.kind) {
            case RhsKind::Terminate: return {0, nullptr};
            case RhsKind::Deadlock: return {1, nullptr};
            case RhsKind::Postcond: return {2, &eq.action};
        }
        return {1, nullptr};
    };

    // Initial partition by node label.
    {
        std::map<std::pair<int, BasicAction>, int> ids;
        for (int s = 0; s <= n; ++s) {
            auto [tag, act] = node_label(s);
            auto key = std::make_pair(tag, act ? *act : BasicAction{});
            auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
            (void)fresh;
            cls[static_cast<size_t>(s)] = it->second;
        }
    }

    for (;;) {
        std::map<std::tuple<int, int, int>, int> ids;
        std::vector<int> next(static_cast<size_t>(n) + 1);
        for (int s = 0; s <= n; ++s) {
            int succ_t = -1, succ_f = -1;
            if (s < n && equations_[static_cast<size_t>(s)].kind == RhsKind::Postcond) {
                const Equation& eq = equations_[static_cast<size_t>(s)];
                succ_t = cls[static_cast<size_t>(index_of(eq.on_true))];
                succ_f = cls[static_cast<size_t>(index_of(eq.on_false))];
            }
            auto key = std::make_tuple(cls[static_cast<size_t>(s)], succ_t, succ_f);
            auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
            (void)fresh;
            next[static_cast<size_t>(s)] = it->second;
        }
        if (next == cls) break;
        cls = std::move(next);
    }

    // Renumber classes by first occurrence for stable output.
    std::map<int, int> renum;
    for (int s = 0; s <= n; ++s) {
        auto [it, fresh] = renum.emplace(cls[static_cast<size_t>(s)], static_cast<int>(renum.size()));
        (void)fresh;
        cls[static_cast<size_t>(s)] = it->second;
    }
    dead_class_ = cls[static_cast<size_t>(n)];
    cls.pop_back();
    class_of_ = std::move(cls);
}

const std::string& ThreadHandle::name() const {
    static const std::string kDead = "<dead>";
    if (state_ < 0 || !spec_) return kDead;
    return spec_->equation(state_).name;
}

namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }
bool is_action_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

struct LineLexer {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }
    std::string name() {
        skip_ws();
        size_t b = pos;
        if (pos < s.size() && is_name_start(s[pos])) {
            ++pos;
            while (pos < s.size() && is_name_char(s[pos])) ++pos;
        }
        return s.substr(b, pos - b);
    }
    std::string action_part() {
        skip_ws();
        size_t b = pos;
        while (pos < s.size() && is_action_char(s[pos])) ++pos;
        return s.substr(b, pos - b);
    }
    std::string rest() {
        skip_ws();
        return s.substr(pos);
    }
};

std::string format_prob(double p) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
    if (ec != std::errc()) return "0.5";
    return std::string(buf, end);
}

}  // namespace

ParseResult parse_spec(const std::string& text) {
    std::vector<Equation> equations;
    std::map<std::string, int> first_line;  // name -> defining line, for duplicate reports
    std::map<BasicAction, double> probs;
    std::string start;
    int start_line = 0;
    std::vector<ParseError> errors;
    std::vector<std::tuple<std::string, int>> forward_refs;  // name, line

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        LineLexer lex{raw};
        if (lex.at_end()) continue;

        if (lex.eat('@')) {
            std::string directive = lex.name();
            if (directive == "start") {
                start = lex.name();
                start_line = lineno;
                if (start.empty())
                    errors.push_back({lineno, "missing variable after @start"});
                else if (!lex.at_end())
                    errors.push_back({lineno, "trailing input after @start " + start});
            } else if (directive == "prob") {
                std::string focus = lex.action_part();
                bool dot = lex.eat('.');
                std::string method = lex.action_part();
                std::string val = lex.rest();
                double p = -1;
                try {
                    size_t used = 0;
                    p = std::stod(val, &used);
                    if (used != val.size()) p = -1;
                } catch (...) {
                    p = -1;
                }
                if (focus.empty() || !dot || method.empty())
                    errors.push_back({lineno, "malformed action name in @prob"});
                else if (p < 0.0 || p > 1.0)
                    errors.push_back({lineno, "probability out of [0,1] in @prob"});
                else
                    probs[BasicAction{focus, method}] = p;
            } else {
                errors.push_back({lineno, "unknown directive @" + directive});
            }
            continue;
        }

        Equation eq;
        eq.name = lex.name();
        if (eq.name.empty()) {
            errors.push_back({lineno, "expected equation name"});
            continue;
        }
        if (!lex.eat('=')) {
            errors.push_back({lineno, "expected '=' after " + eq.name});
            continue;
        }
        lex.skip_ws();
        size_t rhs_pos = lex.pos;
        std::string head = lex.name();
        if (head == "S" && lex.at_end()) {
            eq.kind = RhsKind::Terminate;
        } else if (head == "D" && lex.at_end()) {
            eq.kind = RhsKind::Deadlock;
        } else {
            lex.pos = rhs_pos;
            std::string focus = lex.action_part();
            bool dot = lex.eat('.');
            std::string method = lex.action_part();
            if (focus.empty() || !dot || method.empty()) {
                errors.push_back({lineno, "malformed action name"});
                continue;
            }
            eq.kind = RhsKind::Postcond;
            eq.action = BasicAction{focus, method};
            if (!lex.eat('?')) {
                errors.push_back({lineno, "expected '?' after action " + eq.action.str()});
                continue;
            }
            eq.on_true = lex.name();
            if (eq.on_true.empty()) {
                errors.push_back({lineno, "expected variable in true branch"});
                continue;
            }
            if (!lex.eat(':')) {
                errors.push_back({lineno, "expected ':' between branches"});
                continue;
            }
            eq.on_false = lex.name();
            if (eq.on_false.empty()) {
                errors.push_back({lineno, "expected variable in false branch"});
                continue;
            }
            if (!lex.at_end()) {
                errors.push_back({lineno, "trailing input after equation"});
                continue;
            }
            forward_refs.emplace_back(eq.on_true, lineno);
            forward_refs.emplace_back(eq.on_false, lineno);
        }
        if (first_line.count(eq.name)) {
            errors.push_back({lineno, "duplicate equation for " + eq.name});
            continue;
        }
        first_line[eq.name] = lineno;
        equations.push_back(std::move(eq));
    }

    for (auto& [name, line] : forward_refs)
        if (!first_line.count(name)) errors.push_back({line, "unknown variable " + name});

    if (equations.empty() && errors.empty()) errors.push_back({lineno ? lineno : 1, "missing start variable: no equations"});
    if (start.empty() && !equations.empty()) start = equations.front().name;
    if (!start.empty() && !first_line.count(start) && !equations.empty())
        errors.push_back({start_line ? start_line : 1, "missing start variable " + start});

    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end(),
                  [](const ParseError& a, const ParseError& b) {
                      return std::tie(a.line, a.message) < std::tie(b.line, b.message);
                  });
        return {std::nullopt, std::move(errors)};
    }
    return {ThreadSpec(std::move(equations), std::move(start), std::move(probs)), {}};
}

std::string print_spec(const ThreadSpec& spec) {
    std::string out;
    for (const Equation& eq : spec.equations()) {
        out += eq.name;
        out += " = ";
        switch (eq.kind) {
            case RhsKind::Terminate: out += "S"; break;
            case RhsKind::Deadlock: out += "D"; break;
            case RhsKind::Postcond:
                out += eq.action.str() + " ? " + eq.on_true + " : " + eq.on_false;
                break;
        }
        out += "\n";
    }
    if (spec.start() != spec.equations().front().name)
        out += "@start " + spec.start() + "\n";
    for (const auto& [action, p] : spec.probabilities())
        out += "@prob " + action.str() + " " + format_prob(p) + "\n";
    return out;
}

ExtAction act(const ThreadHandle& t) {
    if (t.is_canonical_dead()) return ExtAction::dead();
    const Equation& eq = t.spec()->equation(t.state());
    switch (eq.kind) {
        case RhsKind::Terminate: return ExtAction::stop();
        case RhsKind::Deadlock: return ExtAction::dead();
        case RhsKind::Postcond: return ExtAction::basic(eq.action);
    }
    return ExtAction::dead();
}

ThreadHandle thrt(const ThreadHandle& t) {
    if (t.is_canonical_dead()) return {t.spec(), -1};
    const Equation& eq = t.spec()->equation(t.state());
    if (eq.kind != RhsKind::Postcond) return {t.spec(), -1};
    return {t.spec(), t.spec()->index_of(eq.on_true)};
}

ThreadHandle thrf(const ThreadHandle& t) {
    if (t.is_canonical_dead()) return {t.spec(), -1};
    const Equation& eq = t.spec()->equation(t.state());
    if (eq.kind != RhsKind::Postcond) return {t.spec(), -1};
    return {t.spec(), t.spec()->index_of(eq.on_false)};
}

std::vector<ThreadHandle> residuals(const ThreadHandle& t) {
    std::vector<ThreadHandle> order;
    std::set<int> seen;
    std::vector<ThreadHandle> stack{t};
    while (!stack.empty()) {
        ThreadHandle h = stack.back();
        stack.pop_back();
        if (!seen.insert(h.state()).second) continue;
        order.push_back(h);
        if (!h.is_canonical_dead() && act(h).is_basic()) {
            // Depth-first, true branch first; order is then deterministic.
            stack.push_back(thrf(h));
            stack.push_back(thrt(h));
        }
    }
    return order;
}

MinimizeResult minimize(const ThreadSpec& spec) {
    const int n = spec.size();
    // Representative of each class: the lowest-indexed member.
    std::map<int, int> rep;
    for (int s = 0; s < n; ++s) rep.emplace(spec.bisim_class(s), s);

    std::vector<Equation> eqs;
    std::map<int, std::string> class_name;
    std::vector<int> class_order;
    for (int s = 0; s < n; ++s) {
        int c = spec.bisim_class(s);
        if (!class_name.count(c)) {
            class_name[c] = spec.equation(rep[c]).name;
            class_order.push_back(c);
        }
    }
    for (int c : class_order) {
        const Equation& src = spec.equation(rep[c]);
        Equation eq;
        eq.name = class_name[c];
        eq.kind = src.kind;
        if (src.kind == RhsKind::Postcond) {
            eq.action = src.action;
            eq.on_true = class_name[spec.bisim_class(spec.index_of(src.on_true))];
            eq.on_false = class_name[spec.bisim_class(spec.index_of(src.on_false))];
        }
        eqs.push_back(std::move(eq));
    }

    std::map<std::string, std::string> state_map;
    for (int s = 0; s < n; ++s)
        state_map[spec.equation(s).name] = class_name[spec.bisim_class(s)];

    std::string start = class_name[spec.bisim_class(spec.index_of(spec.start()))];
    return {ThreadSpec(std::move(eqs), std::move(start), spec.probabilities()),
            std::move(state_map)};
}

bool threads_equal(const ThreadHandle& a, const ThreadHandle& b) {
    if (a.spec() != b.spec())
        throw std::invalid_argument("threads_equal requires handles into the same spec");
    return a.spec()->bisim_class(a.state()) == b.spec()->bisim_class(b.state());
}

}  // namespace isplab
