#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "isplab/composition.hpp"
#include "isplab/simulation.hpp"

using namespace isplab;
using isplab::testing::spec_of;

namespace {

// Eight identical-branch steps, then termination.
std::string linear8() {
    std::string text;
    for (int i = 1; i <= 8; ++i)
        text += "X" + std::to_string(i) + " = f.m ? X" + std::to_string(i + 1) + " : X" +
                std::to_string(i + 1) + "\n";
    text += "X9 = S\n";
    return text;
}

SimConfig lab_config(int maxlen, SelectionStrategy strategy) {
    SimConfig cfg;
    cfg.maxlen = maxlen;
    cfg.strategy = strategy;
    cfg.latency_msg = 4;
    cfg.latency_reply = 4;
    cfg.exec_time = 1;
    cfg.env.kind = EnvKind::AllTrue;
    return cfg;
}

}  // namespace

TEST_CASE("a terminating thread sends one message and never executes") {
    ThreadSpec s = spec_of("X = S");
    SimResult r = simulate(s.start_handle(), lab_config(1, SelectionStrategy::breadth()));
    CHECK(r.metrics.busy == 0);
    CHECK(r.metrics.messages_sent == 1);
    CHECK(r.metrics.terminated);
    CHECK(r.metrics.utilization == 0.0);
}

TEST_CASE("without run-ahead every step pays the full round trip") {
    ThreadSpec s = spec_of(linear8());
    SimResult r = simulate(s.start_handle(), lab_config(0, SelectionStrategy::breadth()));
    REQUIRE(r.metrics.terminated);
    CHECK(r.metrics.busy == 8);
    // Idle per executed step covers at least one message plus one reply leg.
    CHECK(r.metrics.idle / 8 >= 8);
}

TEST_CASE("run-ahead with wildcards overlaps transmission with execution") {
    ThreadSpec s = spec_of(linear8());
    SelectionStrategy wildcard = SelectionStrategy::breadth().with_wildcard();
    Metrics m0 = simulate(s.start_handle(), lab_config(0, wildcard)).metrics;
    Metrics m2 = simulate(s.start_handle(), lab_config(2, wildcard)).metrics;
    REQUIRE(m0.terminated);
    REQUIRE(m2.terminated);
    CHECK(m2.utilization >= m0.utilization);
    CHECK(m2.total < m0.total);
}

TEST_CASE("wildcard run-ahead sends one message per thread step") {
    ThreadSpec s = spec_of(linear8());
    SelectionStrategy wildcard = SelectionStrategy::breadth().with_wildcard();
    Metrics m = simulate(s.start_handle(), lab_config(2, wildcard)).metrics;
    CHECK(m.messages_sent == 9);  // eight actions plus the stop
    CHECK(m.discarded == 0);
    // Without the adaptation the same thread costs duplicated speculation.
    Metrics plain = simulate(s.start_handle(), lab_config(2, SelectionStrategy::breadth())).metrics;
    CHECK(plain.messages_sent > m.messages_sent);
}

TEST_CASE("thresholded selection discards less speculation on skewed branches") {
    std::string text;
    for (int i = 1; i <= 6; ++i)
        text += "X" + std::to_string(i) + " = f.m ? X" + std::to_string(i + 1) + " : Y" +
                std::to_string(i) + "\nY" + std::to_string(i) + " = S\n";
    text += "X7 = S\n@prob f.m 0.95\n";
    ThreadSpec s = spec_of(text);
    SimConfig base = lab_config(2, SelectionStrategy::breadth());
    base.env.kind = EnvKind::Prob;
    base.env.seed = 13;
    Metrics breadth = simulate(s.start_handle(), base).metrics;
    base.strategy = SelectionStrategy::prob95();
    Metrics prob = simulate(s.start_handle(), base).metrics;
    CHECK(prob.discarded <= breadth.discarded);
    CHECK(prob.messages_sent <= breadth.messages_sent);
}

TEST_CASE("metrics account exactly and respect their bounds") {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 40; ++i) {
        ThreadSpec s = isplab::testing::random_spec(rng, 4);
        SimConfig cfg = lab_config(static_cast<int>(rng() % 3), SelectionStrategy::breadth());
        cfg.env.kind = EnvKind::Random;
        cfg.env.seed = rng();
        cfg.horizon = 4000;
        Metrics m = simulate(s.start_handle(), cfg).metrics;
        CHECK(m.busy + m.idle == m.total);
        CHECK(m.utilization >= 0.0);
        CHECK(m.utilization <= 1.0);
        CHECK(m.discarded <= m.messages_sent);
        CHECK(m.replies_sent <= m.messages_sent);
    }
}

TEST_CASE("reply conservation holds along simulated runs") {
    ThreadSpec s = spec_of(linear8());
    SimResult r = simulate(s.start_handle(), lab_config(2, SelectionStrategy::breadth()));
    long sent = 0, arrived = 0;
    for (const std::string& line : r.events) {
        if (line.find("reply-sent") != std::string::npos) ++sent;
        if (line.find("reply-arrived") != std::string::npos) ++arrived;
    }
    CHECK(sent == r.metrics.replies_sent);
    CHECK(arrived <= sent);
    CHECK(sent - arrived <= 4);  // at most the channel cap remains in flight
}

TEST_CASE("identical configurations produce identical bytes") {
    ThreadSpec s = spec_of(linear8());
    SimConfig cfg = lab_config(2, SelectionStrategy::breadth());
    cfg.env.kind = EnvKind::Random;
    cfg.env.seed = 99;
    std::vector<int> maxlens{0, 1, 2};
    std::vector<SelectionStrategy> strategies{SelectionStrategy::breadth(),
                                              SelectionStrategy::prob50()};
    std::string a = sweep_csv(s.start_handle(), "linear8", cfg, maxlens, strategies);
    std::string b = sweep_csv(s.start_handle(), "linear8", cfg, maxlens, strategies);
    CHECK(a == b);
    CHECK(a.rfind("thread,maxlen,strategy,seed,env,busy,idle,total,utilization,msgs,replies,"
                  "discarded\n",
                  0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 7);  // header + 6 rows
}

TEST_CASE("an empty sweep is just the header") {
    ThreadSpec s = spec_of("X = S");
    std::string csv = sweep_csv(s.start_handle(), "stop", lab_config(0, {}), {}, {});
    CHECK(csv ==
          "thread,maxlen,strategy,seed,env,busy,idle,total,utilization,msgs,replies,discarded\n");
}

TEST_CASE("utilization is monotone in run-ahead depth on the linear corpus") {
    ThreadSpec s = spec_of(linear8());
    double prev = -1.0;
    for (int maxlen : {0, 1, 2}) {
        Metrics m = simulate(s.start_handle(),
                             lab_config(maxlen, SelectionStrategy::breadth().with_wildcard()))
                        .metrics;
        CHECK(m.utilization >= prev);
        prev = m.utilization;
    }
}

TEST_CASE("a tiny horizon yields a degenerate run") {
    ThreadSpec s = spec_of("X = f.m ? X : X");
    SimConfig cfg = lab_config(1, SelectionStrategy::breadth());
    cfg.horizon = 1;
    Metrics m = simulate(s.start_handle(), cfg).metrics;
    CHECK(m.degenerate);
}

TEST_CASE("simulated runs are visible traces of the composed system") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 12; ++i) {
        ThreadSpec s = isplab::testing::random_spec(rng, 3);
        int maxlen = static_cast<int>(rng() % 2);
        SimConfig cfg = lab_config(maxlen, SelectionStrategy::breadth());
        cfg.env.kind = EnvKind::Random;
        cfg.env.seed = rng();
        cfg.horizon = 400;
        SimResult r = simulate(s.start_handle(), cfg);

        CompositionConfig ccfg;
        ccfg.maxlen = maxlen;
        ccfg.capacity_msg = maxlen + 2;
        ccfg.capacity_reply = maxlen + 2;
        Lts lts = compose(s.start_handle(), ccfg);

        // Walk the composed system along the simulated visible labels,
        // allowing silent steps between them.
        std::set<int> states{lts.initial()};
        auto closure = [&](std::set<int> from) {
            std::vector<int> stack(from.begin(), from.end());
            while (!stack.empty()) {
                int st = stack.back();
                stack.pop_back();
                for (const Transition& t : lts.out(st))
                    if (lts.label(t.label).is_tau() && from.insert(t.to).second)
                        stack.push_back(t.to);
            }
            return from;
        };
        states = closure(states);
        for (const Label& l : r.visible_trace) {
            std::set<int> next;
            for (int st : states)
                for (const Transition& t : lts.out(st))
                    if (lts.label(t.label) == l) next.insert(t.to);
            states = closure(next);
            REQUIRE(!states.empty());
        }
    }
}
