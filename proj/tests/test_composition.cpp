#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "isplab/composition.hpp"
#include "isplab/equivalence.hpp"
#include "isplab/extraction.hpp"

using namespace isplab;
using isplab::testing::spec_of;
using isplab::testing::visible_traces;

namespace {

const InstructionMessage kMsg{0, ReplySeq(), ExtAction::basic({"f", "m"})};

CompositionConfig config(int maxlen, GenMode mode = GenMode::Safe, int capacity = 1) {
    CompositionConfig cfg;
    cfg.maxlen = maxlen;
    cfg.mode = mode;
    cfg.capacity_msg = capacity;
    cfg.capacity_reply = capacity;
    return cfg;
}

// All visible words of length up to `bound` enabled from the initial state,
// using weak steps; suitable for containment comparisons.
std::set<std::vector<std::string>> trace_prefixes(const Lts& lts, int bound) {
    std::set<std::vector<std::string>> words;
    auto closure = [&](std::set<int> states) {
        std::vector<int> stack(states.begin(), states.end());
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            for (const Transition& t : lts.out(s))
                if (lts.label(t.label).is_tau() && states.insert(t.to).second)
                    stack.push_back(t.to);
        }
        return states;
    };
    struct Node {
        std::set<int> states;
        std::vector<std::string> word;
    };
    std::vector<Node> queue{{closure({lts.initial()}), {}}};
    words.insert({});
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        Node node = queue[qi];
        if (static_cast<int>(node.word.size()) >= bound) continue;
        std::map<std::string, std::set<int>> next;
        for (int s : node.states)
            for (const Transition& t : lts.out(s))
                if (!lts.label(t.label).is_tau())
                    next[lts.label(t.label).str()].insert(t.to);
        for (auto& [label, states] : next) {
            Node n{closure(states), node.word};
            n.word.push_back(label);
            words.insert(n.word);
            queue.push_back(std::move(n));
        }
    }
    return words;
}

}  // namespace

TEST_CASE("gamma fuses matching channel pairs into j") {
    CHECK(gamma(Label::snd_chan(1, kMsg), Label::rcv_chan(1, kMsg)) == Label::jact());
    CHECK(gamma(Label::rcv_chan(1, kMsg), Label::snd_chan(1, kMsg)) == Label::jact());
    CHECK(gamma(Label::snd_reply(3, true), Label::rcv_reply(3, true)) == Label::jact());
}

TEST_CASE("gamma rejects mismatched channels, payloads and non-channel actions") {
    CHECK(!gamma(Label::snd_chan(1, kMsg), Label::rcv_chan(2, kMsg)));
    CHECK(!gamma(Label::snd_reply(3, true), Label::rcv_reply(3, false)));
    CHECK(!gamma(Label::stp(), Label::rcv_chan(1, kMsg)));
    CHECK(!gamma(Label::stp(), Label::iact()));
    CHECK(!gamma(Label::snd_f("f", "m"), Label::rcv_f("f", true)));
    CHECK(!gamma(Label::snd_chan(1, kMsg), Label::snd_chan(1, kMsg)));
}

TEST_CASE("composition of a terminating thread shows exactly stp") {
    Lts lts = compose(spec_of("X = S").start_handle(), config(1));
    std::set<std::vector<std::string>> expected{{"stp"}};
    CHECK(visible_traces(lts) == expected);
}

TEST_CASE("composition of one branch shows the two reference runs") {
    Lts lts = compose(spec_of("X = f.m ? Y : Z\nY = S\nZ = D").start_handle(), config(1));
    std::set<std::vector<std::string>> expected{{"snd_f(m)", "rcv_f(T)", "stp"},
                                                {"snd_f(m)", "rcv_f(F)", "i"}};
    CHECK(visible_traces(lts) == expected);
}

TEST_CASE("the literal reading wedges at maxlen zero, the safe one does not") {
    ThreadSpec s = spec_of("X = f.m ? Y : Z\nY = S\nZ = D");
    Lts strict = compose(s.start_handle(), config(0, GenMode::StrictPaper));
    CHECK(!strict.protocol_deadlock_states().empty());

    Lts safe = normalize_termination(compose(s.start_handle(), config(0, GenMode::Safe)));
    CHECK(safe.protocol_deadlock_states().empty());
}

TEST_CASE("explore_stats counts states, transitions, deadlocks and termination") {
    LtsStats stop = explore_stats(extract_lts(spec_of("X = S").start_handle()));
    CHECK(stop.states == 2);
    CHECK(stop.transitions == 1);
    CHECK(stop.deadlock_states == 0);
    CHECK(stop.terminating_states == 1);

    LtsStats dead = explore_stats(extract_lts(spec_of("X = D").start_handle()));
    CHECK(dead.states == 2);
    CHECK(dead.transitions == 1);
    CHECK(dead.deadlock_states == 1);
    CHECK(dead.terminating_states == 0);

    LtsStats safe = explore_stats(
        normalize_termination(compose(spec_of("X = S").start_handle(), config(1))));
    CHECK(safe.deadlock_states == 0);
}

TEST_CASE("encapsulation and abstraction hold over explored systems") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 25; ++i) {
        ThreadSpec s = isplab::testing::random_spec(rng, 4);
        Lts lts = compose(s.start_handle(), config(1 + static_cast<int>(rng() % 2)));
        for (const Transition& t : lts.transitions()) {
            LabelKind k = lts.label(t.label).kind;
            CHECK(k != LabelKind::SndChan);  // encapsulated
            CHECK(k != LabelKind::RcvChan);
            CHECK(k != LabelKind::JAct);  // abstracted by default
        }
    }
}

TEST_CASE("composition output is bytewise deterministic") {
    ThreadSpec s = spec_of("X = f.m ? Y : X\nY = g.n ? X : Z\nZ = S");
    CompositionConfig cfg = config(2);
    CHECK(compose(s.start_handle(), cfg).to_json() == compose(s.start_handle(), cfg).to_json());
}

TEST_CASE("visible behaviour grows monotonically with channel capacity") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 10; ++i) {
        ThreadSpec s = isplab::testing::random_spec(rng, 3);
        for (int cap = 1; cap <= 3; ++cap) {
            auto small = trace_prefixes(compose(s.start_handle(), config(1, GenMode::Safe, cap)), 6);
            auto large =
                trace_prefixes(compose(s.start_handle(), config(1, GenMode::Safe, cap + 1)), 6);
            for (const auto& w : small) CHECK(large.count(w) == 1);
        }
    }
}

TEST_CASE("exploration stays within bounds on the corpus scale") {
    ThreadSpec s = spec_of("X = f.m ? Y : Z\nY = g.n ? X : W\nZ = g.n ? W : X\nW = S");
    CompositionConfig cfg = config(3, GenMode::Safe, 4);
    ExplorationReport report;
    Lts lts = compose(s.start_handle(), cfg, &report);
    CHECK(lts.num_states() > 0);
    CHECK(report.relaxed_violations.empty());
    CHECK(report.breadth_span_violations == 0);
}

TEST_CASE("the state bound aborts oversized explorations with a clear error") {
    ThreadSpec s = spec_of("X = f.m ? Y : Z\nY = g.n ? X : W\nZ = g.n ? W : X\nW = S");
    CompositionConfig cfg = config(2);
    cfg.state_bound = 10;
    CHECK_THROWS_AS(compose(s.start_handle(), cfg), ExplorationLimit);
}

TEST_CASE("json round-trips a composed system") {
    Lts lts = compose(spec_of("X = f.m ? Y : Z\nY = S\nZ = D").start_handle(), config(1));
    Lts back = Lts::from_json(lts.to_json());
    CHECK(back.num_states() == lts.num_states());
    CHECK(back.num_transitions() == lts.num_transitions());
    CHECK(back.to_json() == lts.to_json());
}
