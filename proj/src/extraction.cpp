#include "isplab/extraction.hpp"

#include <map>
#include <vector>

namespace isplab {

Lts extract_lts(const ThreadHandle& t) {
    Lts lts;
    std::map<int, int> state_of;  // thread state -> lts state
    int term_sink = -1;
    int dead_sink = -1;

    auto sink_term = [&] {
        if (term_sink < 0) term_sink = lts.add_state("@term", true);
        return term_sink;
    };
    auto sink_dead = [&] {
        if (dead_sink < 0) dead_sink = lts.add_state("@dead", false);
        return dead_sink;
    };

    // Breadth-first over residual threads; state ids follow discovery order.
    std::vector<ThreadHandle> queue{t};
    state_of[t.state()] = lts.add_state(t.name());
    lts.set_initial(0);
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        ThreadHandle h = queue[qi];
        int s = state_of.at(h.state());
        ExtAction a = act(h);
        switch (a.kind) {
            case ExtKind::Stop:
                lts.add_transition(s, Label::stp(), sink_term());
                break;
            case ExtKind::Dead:
                lts.add_transition(s, Label::iact(), sink_dead());
                break;
            case ExtKind::Basic: {
                int wait = lts.add_state("@wait(" + h.name() + ")");
                lts.add_transition(s, Label::snd_f(a.action.focus, a.action.method), wait);
                ThreadHandle branches[2] = {thrt(h), thrf(h)};
                int targets[2];
                for (int i = 0; i < 2; ++i) {
                    auto it = state_of.find(branches[i].state());
                    if (it == state_of.end()) {
                        int ns = lts.add_state(branches[i].name());
                        state_of.emplace(branches[i].state(), ns);
                        queue.push_back(branches[i]);
                        targets[i] = ns;
                    } else {
                        targets[i] = it->second;
                    }
                }
                lts.add_transition(wait, Label::rcv_f(a.action.focus, true), targets[0]);
                lts.add_transition(wait, Label::rcv_f(a.action.focus, false), targets[1]);
                break;
            }
        }
    }
    return lts;
}

}  // namespace isplab
