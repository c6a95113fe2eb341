#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "isplab/composition.hpp"
#include "isplab/equivalence.hpp"
#include "isplab/extraction.hpp"

using namespace isplab;
using isplab::testing::LtsBuilder;
using isplab::testing::spec_of;

namespace {

EquivConfig plain() {
    EquivConfig cfg;
    cfg.lhs_abstraction.clear();
    cfg.rhs_abstraction.clear();
    return cfg;
}

}  // namespace

TEST_CASE("normalize_termination leaves the reference shape intact up to isomorphism") {
    Lts lts = extract_lts(spec_of("X = S").start_handle());
    Lts norm = normalize_termination(lts);
    CHECK(norm.num_states() == 2);
    CHECK(norm.num_transitions() == 1);
    CHECK(norm.terminating(norm.transitions()[0].to));
}

TEST_CASE("normalize_termination removes the post-stp wreckage of the composition") {
    CompositionConfig cfg;
    cfg.maxlen = 1;
    Lts lts = compose(spec_of("X = f.m ? Y : Y\nY = S").start_handle(), cfg);
    // Runs where the generator never drains its reply leave stuck states
    // behind the stp transition; the reference side has none.
    Lts norm = normalize_termination(lts);
    CHECK(norm.protocol_deadlock_states().empty());
    CHECK(explore_stats(norm).deadlock_states == 0);
}

TEST_CASE("normalize_termination is the identity without stp transitions") {
    Lts lts = extract_lts(spec_of("X = D").start_handle());
    CHECK(normalize_termination(lts) == lts);
}

TEST_CASE("a silent step before b is inert: a tau b equals a b") {
    Lts l1 = LtsBuilder()
                 .edge("p0", "a", "p1")
                 .edge("p1", "tau", "p2")
                 .edge("p2", "b", "p3")
                 .terminating("p3")
                 .build("p0");
    Lts l2 =
        LtsBuilder().edge("q0", "a", "q1").edge("q1", "b", "q2").terminating("q2").build("q0");
    EquivVerdict v = branching_bisim(l1, l2, plain());
    CHECK(v.equivalent);
    CHECK(naive_bisim_oracle(l1, l2, plain()));
}

TEST_CASE("committing early distinguishes a(b+c) from ab+ac") {
    Lts l1 = LtsBuilder()
                 .edge("p0", "a", "p1")
                 .edge("p1", "b", "p2")
                 .edge("p1", "c", "p3")
                 .build("p0");
    Lts l2 = LtsBuilder()
                 .edge("q0", "a", "q1")
                 .edge("q0", "a", "q2")
                 .edge("q1", "b", "q3")
                 .edge("q2", "c", "q4")
                 .build("q0");
    EquivVerdict v = branching_bisim(l1, l2, plain());
    REQUIRE(!v.equivalent);
    REQUIRE(v.counterexample.has_value());
    REQUIRE(v.counterexample->trace.size() == 1);
    CHECK(v.counterexample->trace[0].focus == "a");
    CHECK(v.counterexample->obligation.find("offering") != std::string::npos);
    CHECK(counterexample_valid(l1, l2, plain(), *v.counterexample));
    CHECK(!naive_bisim_oracle(l1, l2, plain()));
}

TEST_CASE("reflexivity on extracted and composed systems") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10; ++i) {
        ThreadSpec s = isplab::testing::random_spec(rng, 3);
        Lts lhs = extract_lts(s.start_handle());
        CHECK(branching_bisim(lhs, lhs, plain()).equivalent);
        CompositionConfig cfg;
        cfg.maxlen = 1;
        Lts rhs = compose(s.start_handle(), cfg);
        CHECK(branching_bisim(rhs, rhs, plain()).equivalent);
    }
}

TEST_CASE("verdicts are symmetric") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 60; ++i) {
        Lts l1 = isplab::testing::random_lts(rng, 8);
        Lts l2 = isplab::testing::random_lts(rng, 8);
        CHECK(branching_bisim(l1, l2, plain()).equivalent ==
              branching_bisim(l2, l1, plain()).equivalent);
    }
}

TEST_CASE("hiding j is vacuous on systems without j") {
    std::mt19937_64 rng(31);
    EquivConfig with_j = plain();
    with_j.lhs_abstraction.push_back(LabelKind::JAct);
    with_j.rhs_abstraction.push_back(LabelKind::JAct);
    for (int i = 0; i < 40; ++i) {
        Lts l1 = isplab::testing::random_lts(rng, 8);
        Lts l2 = isplab::testing::random_lts(rng, 8);
        CHECK(branching_bisim(l1, l2, plain()).equivalent ==
              branching_bisim(l1, l2, with_j).equivalent);
    }
}

TEST_CASE("checker and oracle agree on random systems") {
    std::mt19937_64 rng(37);
    int disagreements = 0;
    int inequivalent = 0;
    for (int i = 0; i < 60; ++i) {
        Lts l1 = isplab::testing::random_lts(rng, 9);
        Lts l2 = isplab::testing::random_lts(rng, 9);
        EquivVerdict v = branching_bisim(l1, l2, plain());
        if (v.equivalent != naive_bisim_oracle(l1, l2, plain())) ++disagreements;
        if (!v.equivalent) {
            ++inequivalent;
            REQUIRE(v.counterexample.has_value());
            CHECK(counterexample_valid(l1, l2, plain(), *v.counterexample));
        }
    }
    CHECK(disagreements == 0);
    CHECK(inequivalent > 0);  // the sample must exercise the negative path
}

TEST_CASE("the oracle rejects oversized inputs") {
    std::mt19937_64 rng(41);
    Lts l = isplab::testing::random_lts(rng, 9);
    CHECK_THROWS_AS(naive_bisim_oracle(l, l, plain(), 3), std::invalid_argument);
}

TEST_CASE("divergence sensitivity distinguishes a silent loop from a stuck state") {
    Lts looping = LtsBuilder().edge("p0", "a", "p1").edge("p1", "tau", "p1").build("p0");
    Lts stuck = LtsBuilder().edge("q0", "a", "q1").build("q0");
    EquivConfig insensitive = plain();
    CHECK(branching_bisim(looping, stuck, insensitive).equivalent);
    CHECK(naive_bisim_oracle(looping, stuck, insensitive));

    EquivConfig sensitive = plain();
    sensitive.divergence_sensitive = true;
    CHECK(!branching_bisim(looping, stuck, sensitive).equivalent);
    CHECK(!naive_bisim_oracle(looping, stuck, sensitive));
}

TEST_CASE("the strict root condition rejects a leading silent step") {
    Lts direct = LtsBuilder().edge("p0", "a", "p1").terminating("p1").build("p0");
    Lts delayed = LtsBuilder()
                      .edge("q0", "tau", "q1")
                      .edge("q1", "a", "q2")
                      .terminating("q2")
                      .build("q0");
    EquivConfig rooted = plain();
    CHECK(branching_bisim(direct, delayed, rooted).equivalent);
    CHECK(naive_bisim_oracle(direct, delayed, rooted));

    EquivConfig strict = plain();
    strict.rooted = false;
    EquivVerdict v = branching_bisim(direct, delayed, strict);
    REQUIRE(!v.equivalent);
    CHECK(v.counterexample->obligation.rfind("root condition", 0) == 0);
    CHECK(!naive_bisim_oracle(direct, delayed, strict));
}

TEST_CASE("termination is observable: stp into termination differs from stp into deadlock") {
    Lts ends = LtsBuilder().edge("p0", "a", "p1").terminating("p1").build("p0");
    Lts stalls = LtsBuilder().edge("q0", "a", "q1").build("q0");
    EquivVerdict v = branching_bisim(ends, stalls, plain());
    REQUIRE(!v.equivalent);
    bool names_termination = v.counterexample->obligation.find("termination") != std::string::npos ||
                             v.counterexample->obligation.find("deadlock") != std::string::npos;
    CHECK(names_termination);
}
