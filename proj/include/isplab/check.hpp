// End-to-end check of one thread: reference extraction against the composed
// protocol, decided by rooted branching bisimilarity.

#ifndef ISPLAB_CHECK_HPP
#define ISPLAB_CHECK_HPP

#include "isplab/bta.hpp"
#include "isplab/composition.hpp"
#include "isplab/equivalence.hpp"
#include "isplab/extraction.hpp"

namespace isplab {

struct CheckOutcome {
    EquivVerdict verdict;
    ExplorationReport report;
    LtsStats lhs;
    LtsStats rhs;
    Lts reference;  // extraction side
    Lts protocol;   // composed side
};

// The composition runs with an empty abstraction set here; the equivalence
// configuration owns all hiding so overrides behave predictably.
CheckOutcome check_thread(const ThreadHandle& thread, CompositionConfig ccfg,
                          const EquivConfig& ecfg = {});

}  // namespace isplab

#endif
