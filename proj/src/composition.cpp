#include "isplab/composition.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace isplab {

namespace {

struct SystemState {
    bool gen_done = false;
    GeneratorState gen;
    MsgChannel chm;
    ReplyChannel chr;
    EuStatus eu_status = EuStatus::Running;
    ExecUnitState eu;

    bool terminating() const {
        return gen_done && eu_status == EuStatus::Terminated && chm.empty() && chr.empty();
    }

    // Injective key over the run-varying fields; mode, strategy and
    // capacities are constant per exploration.
    std::string key() const {
        std::string k;
        k += gen_done ? 'G' : 'g';
        if (!gen_done) {
            k += std::to_string(gen.unacked) + ';' + std::to_string(gen.root.state()) + ';';
            for (const AnnotatedEntry& e : gen.frontier) {
                k += e.prefix.symbols() + '|' + std::to_string(e.thread.state()) + '|';
                for (const BasicAction& a : e.actions) k += a.focus + '.' + a.method + ',';
                k += ';';
            }
        }
        k += '#';
        for (const InstructionMessage& m : chm.buffer)
            k += std::to_string(m.ack) + ',' + m.prefix.symbols() + ',' + m.instr.str() + ';';
        k += '#';
        for (bool b : chr.buffer) k += b ? 'T' : 'F';
        k += '#';
        switch (eu_status) {
            case EuStatus::Running: {
                k += 'r' + eu.unacked_replies.symbols() + ';';
                for (const EuEntry& e : eu.store) k += e.prefix.symbols() + ',' + e.instr.str() + ';';
                k += static_cast<char>('0' + static_cast<int>(eu.phase));
                k += eu.await_focus + (eu.pending_reply ? 'T' : 'F');
                break;
            }
            case EuStatus::Terminated: k += 'T'; break;
            case EuStatus::Dead: k += 'D'; break;
        }
        return k;
    }

    std::string desc() const {
        std::string g = gen_done ? "isg:done" : gen.str();
        std::string e;
        switch (eu_status) {
            case EuStatus::Running: e = eu.str(); break;
            case EuStatus::Terminated: e = "iseu:done"; break;
            case EuStatus::Dead: e = "iseu:dead"; break;
        }
        std::string m = "chm[";
        for (size_t i = 0; i < chm.buffer.size(); ++i)
            m += (i ? " " : "") + chm.buffer[i].str();
        m += "]";
        std::string r = "chr[";
        for (size_t i = 0; i < chr.buffer.size(); ++i)
            r += (i ? " " : "") + std::string(chr.buffer[i] ? "T" : "F");
        r += "]";
        return g + " | " + m + " | " + r + " | " + e;
    }
};

struct Successor {
    Label label;
    SystemState state;
    bool discarded = false;  // message dropped as stale speculation
};

struct Explorer {
    const CompositionConfig& cfg;
    ExplorationReport* report;
    std::vector<std::string> violations;  // gathered before report caps apply

    static constexpr size_t kMaxMessages = 32;

    void note(std::vector<std::string>& sink, std::string msg) {
        if (sink.size() < kMaxMessages) sink.push_back(std::move(msg));
    }

    void visit(const SystemState& s) {
        if (!report) return;
        report->states += 1;
        if (!s.gen_done) {
            for (auto& v : generator_invariant_violations(s.gen, cfg.maxlen, true))
                note(report->violations, v);
            for (auto& v : generator_invariant_violations(s.gen, cfg.maxlen, false))
                note(report->relaxed_violations, v);
            if (s.gen.strategy.kind == StrategyKind::BreadthFirst && !s.gen.frontier.empty()) {
                int lo = s.gen.frontier.front().prefix.size(), hi = lo;
                for (const AnnotatedEntry& e : s.gen.frontier) {
                    lo = std::min(lo, e.prefix.size());
                    hi = std::max(hi, e.prefix.size());
                }
                if (hi - lo > 1) report->breadth_span_violations += 1;
            }
        }
        if (s.eu_status == EuStatus::Running) {
            for (auto& v : exec_unit_invariant_violations(s.eu, cfg.maxlen, false))
                note(report->violations, v);
            if (s.eu.pending_acks() > cfg.maxlen)
                note(report->range_notes,
                     "exec unit pending acks " + std::to_string(s.eu.pending_acks()) +
                         " beyond maxlen in " + s.eu.str());
        }
        for (const InstructionMessage& m : s.chm.buffer)
            if (m.ack > cfg.maxlen)
                note(report->range_notes,
                     "message ack " + std::to_string(m.ack) + " beyond maxlen in " + m.str());
    }

    std::vector<Successor> successors(const SystemState& cur) {
        std::vector<Successor> out;
        if (cfg.eager_delivery && cur.eu_status == EuStatus::Running && !cur.chm.empty() &&
            cur.eu.phase != EuPhase::ReplyPending) {
            try {
                UpdcmResult r = updcm(cur.chm.head(), cur.eu);
                Successor n{Label::jact(), cur, r.discarded};
                n.state.chm = cur.chm.popped();
                n.state.eu = std::move(r.state);
                return {std::move(n)};
            } catch (const ProtocolViolation& pv) {
                if (report) note(report->violations, pv.what());
            }
        }
        if (!cur.gen_done) {
            for (const GenStep& gs : gen_steps(cur.gen, cfg.maxlen)) {
                switch (gs.label.kind) {
                    case LabelKind::SndChan: {  // snd_1 | rcv_1
                        if (cur.chm.full()) break;
                        Successor n{*gamma(gs.label, Label::rcv_chan(1, gs.label.msg)), cur, false};
                        n.state.gen = *gs.next;
                        n.state.chm = cur.chm.pushed(gs.label.msg);
                        out.push_back(std::move(n));
                        break;
                    }
                    case LabelKind::RcvChan: {  // rcv_4 | snd_4
                        if (cur.chr.empty() || cur.chr.head() != gs.label.reply) break;
                        Successor n{*gamma(Label::snd_reply(4, gs.label.reply), gs.label), cur,
                                    false};
                        n.state.gen = *gs.next;
                        n.state.chr = cur.chr.popped();
                        out.push_back(std::move(n));
                        break;
                    }
                    case LabelKind::JAct: {  // the generator's own j on exhaustion
                        Successor n{gs.label, cur, false};
                        n.state.gen_done = true;
                        n.state.gen = GeneratorState{};
                        n.state.gen.mode = cur.gen.mode;
                        n.state.gen.strategy = cur.gen.strategy;
                        out.push_back(std::move(n));
                        break;
                    }
                    default: break;
                }
            }
        }

        if (cur.eu_status == EuStatus::Running) {
            // Message delivery: snd_2 | rcv_2.  The execution unit never
            // receives while a reply is waiting to go out.
            if (!cfg.eager_delivery && !cur.chm.empty() &&
                cur.eu.phase != EuPhase::ReplyPending) {
                try {
                    UpdcmResult r = updcm(cur.chm.head(), cur.eu);
                    Successor n{Label::jact(), cur, r.discarded};
                    n.state.chm = cur.chm.popped();
                    n.state.eu = std::move(r.state);
                    out.push_back(std::move(n));
                } catch (const ProtocolViolation& pv) {
                    if (report) note(report->violations, pv.what());
                }
            }
            for (const EuStep& es : eu_steps(cur.eu, {})) {
                switch (es.label.kind) {
                    case LabelKind::SndChan: {  // snd_3 | rcv_3
                        if (cur.chr.full()) break;
                        Successor n{Label::jact(), cur, false};
                        n.state.eu = *es.next;
                        n.state.chr = cur.chr.pushed(es.label.reply);
                        out.push_back(std::move(n));
                        break;
                    }
                    case LabelKind::SndF:
                    case LabelKind::RcvF: {
                        Successor n{es.label, cur, false};
                        n.state.eu = *es.next;
                        out.push_back(std::move(n));
                        break;
                    }
                    case LabelKind::Stp:
                    case LabelKind::IAct: {
                        Successor n{es.label, cur, false};
                        n.state.eu_status = es.status;
                        n.state.eu = ExecUnitState{};
                        out.push_back(std::move(n));
                        break;
                    }
                    default: break;
                }
            }
        }
        return out;
    }
};

}  // namespace

std::optional<Label> gamma(const Label& a, const Label& b) {
    const Label* snd = nullptr;
    const Label* rcv = nullptr;
    if (a.kind == LabelKind::SndChan && b.kind == LabelKind::RcvChan) {
        snd = &a;
        rcv = &b;
    } else if (b.kind == LabelKind::SndChan && a.kind == LabelKind::RcvChan) {
        snd = &b;
        rcv = &a;
    } else {
        return std::nullopt;
    }
    if (snd->channel != rcv->channel) return std::nullopt;
    if (snd->channel <= 2 ? snd->msg != rcv->msg : snd->reply != rcv->reply)
        return std::nullopt;
    return Label::jact();
}

Lts compose(const ThreadHandle& thread, const CompositionConfig& cfg,
            ExplorationReport* report) {
    SystemState init;
    init.gen = initial_generator(thread, cfg.mode, cfg.strategy);
    init.chm.capacity = cfg.capacity_msg;
    init.chr.capacity = cfg.capacity_reply;

    Explorer explorer{cfg, report, {}};
    auto hidden = [&](const Label& l) {
        return std::find(cfg.abstraction.begin(), cfg.abstraction.end(), l.kind) !=
               cfg.abstraction.end();
    };

    Lts raw;
    std::unordered_map<std::string, int> seen;
    std::vector<SystemState> order;

    // Interns a state, first sliding forward over runs of states whose only
    // behaviour is one hidden (inert) step; every state slid over is still
    // visited by the observer and keyed to the surviving representative.
    auto intern = [&](SystemState s) {
        std::string key = s.key();
        if (auto it = seen.find(key); it != seen.end()) return it->second;

        std::vector<std::string> chain_keys{key};
        std::vector<Successor> steps;
        while (cfg.compress_inert) {
            if (s.terminating()) break;
            steps = explorer.successors(s);
            if (steps.size() != 1 || !hidden(steps[0].label)) break;
            std::string next_key = steps[0].state.key();
            if (auto it = seen.find(next_key); it != seen.end()) {
                explorer.visit(s);
                for (std::string& k : chain_keys) seen.emplace(std::move(k), it->second);
                return it->second;
            }
            bool looped = false;
            for (const std::string& k : chain_keys) looped |= k == next_key;
            if (looped) break;
            if (report && steps[0].discarded) report->discarded_messages += 1;
            explorer.visit(s);
            s = std::move(steps[0].state);
            chain_keys.push_back(std::move(next_key));
        }

        if (static_cast<int>(order.size()) >= cfg.state_bound)
            throw ExplorationLimit("state bound " + std::to_string(cfg.state_bound) +
                                   " exceeded during composition");
        int id = raw.add_state("s" + std::to_string(order.size()), s.terminating(), s.desc());
        for (std::string& k : chain_keys) seen.emplace(std::move(k), id);
        order.push_back(std::move(s));
        explorer.visit(order.back());
        return id;
    };

    intern(init);
    raw.set_initial(0);

    for (size_t qi = 0; qi < order.size(); ++qi) {
        SystemState cur = order[qi];
        int from = static_cast<int>(qi);
        for (Successor& next : explorer.successors(cur)) {
            if (report && next.discarded) report->discarded_messages += 1;
            raw.add_transition(from, next.label, intern(std::move(next.state)));
        }
    }

    return raw.abstracted(cfg.abstraction);
}

}  // namespace isplab
