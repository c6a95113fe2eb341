// Synchronized product of generator, channels and execution unit under the
// communication function, with channel actions encapsulated and a
// configurable abstraction set, explored into an explicit LTS.

#ifndef ISPLAB_COMPOSITION_HPP
#define ISPLAB_COMPOSITION_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/lts.hpp"
#include "isplab/protocol.hpp"

namespace isplab {

struct CompositionConfig {
    int maxlen = 1;
    int capacity_msg = 1;
    int capacity_reply = 1;
    GenMode mode = GenMode::Safe;
    SelectionStrategy strategy;
    std::vector<LabelKind> abstraction = {LabelKind::JAct};
    int state_bound = 1'000'000;
    // Collapse runs of states whose only move is one hidden step; such a
    // state is branching-bisimilar to its successor.  Off for strict-root
    // comparisons, which are sensitive to silent steps at the root.
    bool compress_inert = true;
    // Deliver the message at the head of the channel before exploring any
    // other move.  A delivery commutes with every other step (channel pushes,
    // replies, executions) and the states it bypasses differ only after stp
    // or i, where termination normalization erases the difference; sound for
    // the normalized rooted check only, so off by default.
    bool eager_delivery = false;
};

struct ExplorationLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Observations gathered over every visited state.  `violations` holds the
// reachable-state assertions of the acceptance suite (strict unacked bound,
// prefix incomparability, single empty-prefix entry, no strip-past-end);
// `relaxed_violations` the provable bounds (unacked <= maxlen+1, frontier
// prefixes <= maxlen+1); `range_notes` the remaining [0,maxlen] ranges that
// reachable states are known to exceed, reported without failing.
struct ExplorationReport {
    std::vector<std::string> violations;
    std::vector<std::string> relaxed_violations;
    std::vector<std::string> range_notes;
    int states = 0;
    int discarded_messages = 0;
    int breadth_span_violations = 0;
};

// The communication function: matching channel send/receive pairs fuse into
// j; every other pair does not communicate.
std::optional<Label> gamma(const Label& a, const Label& b);

Lts compose(const ThreadHandle& thread, const CompositionConfig& cfg,
            ExplorationReport* report = nullptr);

}  // namespace isplab

#endif
