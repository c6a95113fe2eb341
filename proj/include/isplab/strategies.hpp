// Pluggable run-ahead selection policies for the instruction stream
// generator: plain breadth-first, probability-thresholded selection, and
// the wildcard adaptation that collapses identical branch pairs.

#ifndef ISPLAB_STRATEGIES_HPP
#define ISPLAB_STRATEGIES_HPP

#include <compare>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/replyseq.hpp"

namespace isplab {

enum class StrategyKind : std::uint8_t { BreadthFirst, ProbThreshold };

struct SelectionStrategy {
    StrategyKind kind = StrategyKind::BreadthFirst;
    double threshold = 0.0;     // ProbThreshold only
    bool breadth_first = true;  // ProbThreshold: keep the minimum-length restriction
    bool wildcard = false;      // orthogonal to the variant

    static SelectionStrategy breadth() { return {}; }
    static SelectionStrategy prob50() { return {StrategyKind::ProbThreshold, 0.50, true, false}; }
    static SelectionStrategy prob95() { return {StrategyKind::ProbThreshold, 0.95, false, false}; }
    SelectionStrategy with_wildcard() const {
        SelectionStrategy s = *this;
        s.wildcard = true;
        return s;
    }

    auto operator<=>(const SelectionStrategy&) const = default;
    std::string str() const;
};

// Parses "breadth", "prob50", "prob95", each optionally with "+wildcard".
// Throws std::invalid_argument on anything else.
SelectionStrategy parse_strategy(const std::string& name);

// A frontier entry: the reply sequence after which `thread` is due, together
// with the actions that produced those replies (one per position, wildcard
// positions included).
struct AnnotatedEntry {
    ReplySeq prefix;
    std::vector<BasicAction> actions;
    ThreadHandle thread;

    auto operator<=>(const AnnotatedEntry&) const = default;
};

// Probability of the entry's reply sequence happening: the product over
// positions of prob(action) for T, 1-prob(action) for F, and 1 for *.
double residual_probability(const AnnotatedEntry& entry, const ThreadSpec& spec);

// Children of an entry whose thread performs a basic action: one *-child when
// the two continuations are identical threads and wildcard is on, otherwise
// the T and F children.
std::vector<AnnotatedEntry> wildcard_expand(const AnnotatedEntry& entry, bool wildcard);

// Strict ordering used wherever one entry must be picked deterministically:
// highest residual probability first, then shortest prefix, then prefix text.
bool pick_before(const AnnotatedEntry& a, const AnnotatedEntry& b, const ThreadSpec& spec);

}  // namespace isplab

#endif
