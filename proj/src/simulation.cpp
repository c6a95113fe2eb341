#include "isplab/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "isplab/protocol.hpp"

namespace isplab {

std::string Environment::str() const {
    switch (kind) {
        case EnvKind::AllTrue: return "all-true";
        case EnvKind::AllFalse: return "all-false";
        case EnvKind::Fixed: {
            std::string s = "fixed:";
            for (bool b : fixed) s += b ? 'T' : 'F';
            return s;
        }
        case EnvKind::Random: return "random";
        case EnvKind::Prob: return "prob";
    }
    return "?";
}

Environment Environment::parse(const std::string& text) {
    Environment env;
    if (text == "all-true") {
        env.kind = EnvKind::AllTrue;
    } else if (text == "all-false") {
        env.kind = EnvKind::AllFalse;
    } else if (text == "random") {
        env.kind = EnvKind::Random;
    } else if (text == "prob") {
        env.kind = EnvKind::Prob;
    } else if (text.rfind("fixed:", 0) == 0) {
        env.kind = EnvKind::Fixed;
        for (char c : text.substr(6)) {
            if (c == 'T')
                env.fixed.push_back(true);
            else if (c == 'F')
                env.fixed.push_back(false);
            else
                throw std::invalid_argument("bad reply symbol in " + text);
        }
        if (env.fixed.empty()) throw std::invalid_argument("empty fixed reply sequence");
    } else {
        throw std::invalid_argument("unknown environment " + text);
    }
    return env;
}

namespace {

enum class EventKind : std::uint8_t { MsgArrival = 0, ExecComplete = 1, ReplyArrival = 2 };

struct Event {
    long time = 0;
    EventKind kind = EventKind::MsgArrival;
    long seq = 0;  // FIFO tie-break
    InstructionMessage msg;  // MsgArrival
    bool reply = false;      // ExecComplete / ReplyArrival

    bool operator<(const Event& o) const {
        return std::tie(time, kind, seq) < std::tie(o.time, o.kind, o.seq);
    }
};

struct ReplyOracle {
    const ThreadSpec& spec;
    Environment env;
    std::mt19937_64 rng;
    size_t fixed_pos = 0;

    explicit ReplyOracle(const ThreadSpec& s, const Environment& e)
        : spec(s), env(e), rng(e.seed) {}

    bool decide(const BasicAction& action) {
        switch (env.kind) {
            case EnvKind::AllTrue: return true;
            case EnvKind::AllFalse: return false;
            case EnvKind::Fixed: {
                bool b = env.fixed[fixed_pos % env.fixed.size()];
                ++fixed_pos;
                return b;
            }
            case EnvKind::Random:
                return std::uniform_int_distribution<int>(0, 1)(rng) == 1;
            case EnvKind::Prob:
                return std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
                       spec.prob(action);
        }
        return true;
    }
};

}  // namespace

SimResult simulate(const ThreadHandle& thread, const SimConfig& cfg) {
    const ThreadSpec& spec = *thread.spec();
    const int cap_msg = cfg.capacity_msg > 0 ? cfg.capacity_msg : cfg.maxlen + 2;
    const int cap_reply = cfg.capacity_reply > 0 ? cfg.capacity_reply : cfg.maxlen + 2;

    SimResult res;
    Metrics& m = res.metrics;
    ReplyOracle oracle(spec, cfg.env);

    GeneratorState gen = initial_generator(thread, GenMode::Safe, cfg.strategy);
    bool gen_done = false;
    ExecUnitState eu;
    EuStatus eu_status = EuStatus::Running;

    // In-flight counts model channel occupancy: a slot is held from send to
    // arrival.
    int msgs_in_flight = 0;
    int replies_in_flight = 0;
    bool executing = false;
    bool reply_unshipped = false;  // execution finished, waiting for a reply slot
    bool pending_reply_value = false;
    BasicAction pending_action;

    std::vector<Event> pending;  // kept sorted on pop
    long now = 0;
    long seq = 0;
    long processed = 0;
    long executions = 0;
    long end_time = -1;

    auto log = [&](const std::string& line) {
        res.events.push_back("t=" + std::to_string(now) + " " + line);
    };

    auto ship_reply = [&] {
        if (!reply_unshipped || replies_in_flight >= cap_reply) return;
        reply_unshipped = false;
        replies_in_flight += 1;
        m.replies_sent += 1;
        // Store entries killed by the produced reply were one message each.
        for (const EuEntry& e : eu.store)
            if (!e.prefix.empty() && !reply_matches(e.prefix.head(), pending_reply_value))
                m.discarded += 1;
        eu = updpr(pending_reply_value, eu);
        pending.push_back({now + cfg.latency_reply, EventKind::ReplyArrival, seq++,
                           {}, pending_reply_value});
        log(std::string("reply-sent ") + (pending_reply_value ? "T" : "F"));
    };

    auto progress = [&] {
        // Generator sends every currently selectable entry, best first.
        bool sent = true;
        while (sent && !gen_done && eu_status == EuStatus::Running) {
            sent = false;
            if (msgs_in_flight >= cap_msg) break;
            std::vector<AnnotatedEntry> chosen =
                select(gen.frontier, cfg.strategy, cfg.maxlen, spec);
            if (chosen.empty()) break;
            auto best = std::min_element(chosen.begin(), chosen.end(),
                                         [&](const AnnotatedEntry& a, const AnnotatedEntry& b) {
                                             return pick_before(a, b, spec);
                                         });
            InstructionMessage msg{gen.unacked, best->prefix, act(best->thread)};
            gen = updpm(*best, gen);
            msgs_in_flight += 1;
            m.messages_sent += 1;
            pending.push_back({now + cfg.latency_msg, EventKind::MsgArrival, seq++, msg, false});
            log("msg-sent " + msg.str());
            sent = true;
        }

        ship_reply();

        // Execution unit dispatch.
        if (eu_status == EuStatus::Running && !executing && !reply_unshipped) {
            for (const EuEntry& e : eu.store) {
                if (!e.prefix.empty()) continue;
                if (e.instr.kind == ExtKind::Stop) {
                    res.visible_trace.push_back(Label::stp());
                    log("stp");
                    eu_status = EuStatus::Terminated;
                    end_time = now;
                } else if (e.instr.kind == ExtKind::Dead) {
                    res.visible_trace.push_back(Label::iact());
                    log("dead");
                    eu_status = EuStatus::Dead;
                    end_time = now;
                } else {
                    executing = true;
                    pending_action = e.instr.action;
                    res.visible_trace.push_back(
                        Label::snd_f(pending_action.focus, pending_action.method));
                    log("exec-start " + e.instr.str());
                    bool reply = oracle.decide(pending_action);
                    pending.push_back(
                        {now + cfg.exec_time, EventKind::ExecComplete, seq++, {}, reply});
                }
                break;
            }
        }
    };

    progress();
    while (eu_status == EuStatus::Running && !pending.empty() && processed < cfg.horizon) {
        auto next = std::min_element(pending.begin(), pending.end());
        Event ev = *next;
        pending.erase(next);
        now = ev.time;
        ++processed;
        switch (ev.kind) {
            case EventKind::MsgArrival: {
                msgs_in_flight -= 1;
                UpdcmResult r = updcm(ev.msg, eu);
                eu = std::move(r.state);
                if (r.discarded) {
                    m.discarded += 1;
                    log("msg-discarded " + ev.msg.str());
                } else {
                    log("msg-arrived " + ev.msg.str());
                }
                break;
            }
            case EventKind::ExecComplete: {
                executing = false;
                executions += 1;
                m.busy += cfg.exec_time;
                res.visible_trace.push_back(Label::rcv_f(pending_action.focus, ev.reply));
                log(std::string("exec-done reply ") + (ev.reply ? "T" : "F"));
                reply_unshipped = true;
                pending_reply_value = ev.reply;
                break;
            }
            case EventKind::ReplyArrival: {
                replies_in_flight -= 1;
                gen = updcr(ev.reply, gen);
                log(std::string("reply-arrived ") + (ev.reply ? "T" : "F"));
                break;
            }
        }
        progress();
    }

    if (end_time < 0) end_time = now;
    m.total = end_time;
    m.idle = m.total - m.busy;
    m.utilization = m.total > 0 ? static_cast<double>(m.busy) / static_cast<double>(m.total) : 0.0;
    m.terminated = eu_status == EuStatus::Terminated;
    m.dead = eu_status == EuStatus::Dead;
    m.degenerate = executions == 0 && eu_status == EuStatus::Running;
    return res;
}

std::string sweep_csv(const ThreadHandle& thread, const std::string& thread_name,
                      const SimConfig& base, const std::vector<int>& maxlens,
                      const std::vector<SelectionStrategy>& strategies) {
    std::string csv =
        "thread,maxlen,strategy,seed,env,busy,idle,total,utilization,msgs,replies,discarded\n";
    for (int maxlen : maxlens) {
        for (const SelectionStrategy& strategy : strategies) {
            SimConfig cfg = base;
            cfg.maxlen = maxlen;
            cfg.strategy = strategy;
            Metrics m = simulate(thread, cfg).metrics;
            char util[32];
            std::snprintf(util, sizeof util, "%.6f", m.utilization);
            csv += thread_name + "," + std::to_string(maxlen) + "," + strategy.str() + "," +
                   std::to_string(base.env.seed) + "," + base.env.str() + "," +
                   std::to_string(m.busy) + "," + std::to_string(m.idle) + "," +
                   std::to_string(m.total) + "," + util + "," +
                   std::to_string(m.messages_sent) + "," + std::to_string(m.replies_sent) +
                   "," + std::to_string(m.discarded) + "\n";
        }
    }
    return csv;
}

}  // namespace isplab
