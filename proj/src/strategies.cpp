#include "isplab/strategies.hpp"

#include <stdexcept>

namespace isplab {

std::string SelectionStrategy::str() const {
    std::string base;
    if (kind == StrategyKind::BreadthFirst) {
        base = "breadth";
    } else if (threshold == 0.50 && breadth_first) {
        base = "prob50";
    } else if (threshold == 0.95 && !breadth_first) {
        base = "prob95";
    } else {
        base = "prob(" + std::to_string(threshold) + (breadth_first ? ",bf)" : ")");
    }
    return wildcard ? base + "+wildcard" : base;
}

SelectionStrategy parse_strategy(const std::string& name) {
    std::string base = name;
    bool wildcard = false;
    if (auto plus = base.find('+'); plus != std::string::npos) {
        if (base.substr(plus) != "+wildcard")
            throw std::invalid_argument("unknown strategy modifier in " + name);
        wildcard = true;
        base.erase(plus);
    }
    SelectionStrategy s;
    if (base == "breadth")
        s = SelectionStrategy::breadth();
    else if (base == "prob50")
        s = SelectionStrategy::prob50();
    else if (base == "prob95")
        s = SelectionStrategy::prob95();
    else
        throw std::invalid_argument("unknown strategy " + name);
    s.wildcard = wildcard;
    return s;
}

double residual_probability(const AnnotatedEntry& entry, const ThreadSpec& spec) {
    if (entry.prefix.size() != static_cast<int>(entry.actions.size()))
        throw std::invalid_argument("entry actions out of step with its prefix");
    double p = 1.0;
    for (int i = 0; i < entry.prefix.size(); ++i) {
        switch (entry.prefix.at(i)) {
            case Reply::True: p *= spec.prob(entry.actions[static_cast<size_t>(i)]); break;
            case Reply::False: p *= 1.0 - spec.prob(entry.actions[static_cast<size_t>(i)]); break;
            case Reply::Star: break;
        }
    }
    return p;
}

std::vector<AnnotatedEntry> wildcard_expand(const AnnotatedEntry& entry, bool wildcard) {
    ExtAction a = act(entry.thread);
    if (!a.is_basic())
        throw std::invalid_argument("wildcard_expand needs a thread performing a basic action");
    std::vector<BasicAction> actions = entry.actions;
    actions.push_back(a.action);

    ThreadHandle t = thrt(entry.thread);
    ThreadHandle f = thrf(entry.thread);
    if (wildcard && threads_equal(t, f))
        return {{entry.prefix.append(Reply::Star), actions, t}};
    return {{entry.prefix.append(Reply::True), actions, t},
            {entry.prefix.append(Reply::False), std::move(actions), f}};
}

bool pick_before(const AnnotatedEntry& a, const AnnotatedEntry& b, const ThreadSpec& spec) {
    double pa = residual_probability(a, spec);
    double pb = residual_probability(b, spec);
    if (pa != pb) return pa > pb;
    if (a.prefix.size() != b.prefix.size()) return a.prefix.size() < b.prefix.size();
    return a.prefix.symbols() < b.prefix.symbols();
}

}  // namespace isplab
