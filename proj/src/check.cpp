#include "isplab/check.hpp"

#include <algorithm>

namespace isplab {

CheckOutcome check_thread(const ThreadHandle& thread, CompositionConfig ccfg,
                          const EquivConfig& ecfg) {
    // Hiding j during composition lets the explorer fuse handshake chains;
    // anything else in the equivalence configuration stays its business.
    ccfg.abstraction.clear();
    bool hide_j = std::find(ecfg.rhs_abstraction.begin(), ecfg.rhs_abstraction.end(),
                            LabelKind::JAct) != ecfg.rhs_abstraction.end();
    if (hide_j) ccfg.abstraction.push_back(LabelKind::JAct);
    ccfg.compress_inert = ecfg.rooted && !ecfg.divergence_sensitive;
    ccfg.eager_delivery = ccfg.compress_inert && hide_j;

    CheckOutcome out;
    out.reference = extract_lts(thread);
    out.protocol = compose(thread, ccfg, &out.report);
    out.lhs = explore_stats(out.reference);
    out.rhs = explore_stats(out.protocol);
    out.verdict = branching_bisim(out.reference, out.protocol, ecfg);
    return out;
}

}  // namespace isplab
