// Deterministic discrete-event simulation of the protocol under transmission
// and execution latencies, measuring how busy the execution unit stays.
//
// Only transmission and execution cost time; generator computation is free.
// Identical configurations (seed included) produce identical event logs and
// identical CSV bytes.

#ifndef ISPLAB_SIMULATION_HPP
#define ISPLAB_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/lts.hpp"
#include "isplab/strategies.hpp"

namespace isplab {

enum class EnvKind : std::uint8_t { AllTrue, AllFalse, Fixed, Random, Prob };

// Chooses the reply of each executed basic action.
struct Environment {
    EnvKind kind = EnvKind::AllTrue;
    std::vector<bool> fixed;  // Fixed: consumed cyclically
    std::uint64_t seed = 0;   // Random / Prob

    std::string str() const;
    // Parses all-true | all-false | fixed:TFT... | random | prob.
    static Environment parse(const std::string& text);
};

struct SimConfig {
    int maxlen = 1;
    SelectionStrategy strategy;
    int latency_msg = 4;
    int latency_reply = 4;
    int exec_time = 1;
    Environment env;
    long horizon = 100000;   // processed events
    int capacity_msg = -1;   // -1: maxlen + 2
    int capacity_reply = -1; // -1: maxlen + 2
};

struct Metrics {
    long busy = 0;
    long idle = 0;
    long total = 0;
    long messages_sent = 0;
    long replies_sent = 0;
    long discarded = 0;  // messages invalidated by a mismatching reply
    double utilization = 0.0;
    bool terminated = false;
    bool dead = false;
    bool degenerate = false;  // horizon exhausted before any execution
};

struct SimResult {
    Metrics metrics;
    std::vector<std::string> events;  // one line per event, logical timestamps
    std::vector<Label> visible_trace;  // snd_f / rcv_f / stp / i sequence
};

SimResult simulate(const ThreadHandle& thread, const SimConfig& cfg);

// One CSV row per (maxlen, strategy) pair, deterministic order, exact header
// thread,maxlen,strategy,seed,env,busy,idle,total,utilization,msgs,replies,discarded
std::string sweep_csv(const ThreadHandle& thread, const std::string& thread_name,
                      const SimConfig& base, const std::vector<int>& maxlens,
                      const std::vector<SelectionStrategy>& strategies);

}  // namespace isplab

#endif
