#include "isplab/protocol.hpp"

#include <algorithm>

namespace isplab {

namespace {

void insert_sorted(std::vector<AnnotatedEntry>& v, AnnotatedEntry e) {
    auto it = std::lower_bound(v.begin(), v.end(), e);
    if (it == v.end() || *it != e) v.insert(it, std::move(e));
}

void insert_sorted(std::vector<EuEntry>& v, EuEntry e) {
    auto it = std::lower_bound(v.begin(), v.end(), e);
    if (it == v.end() || *it != e) v.insert(it, std::move(e));
}

}  // namespace

std::string GeneratorState::str() const {
    std::string s = "isg<" + std::to_string(unacked) + ",{";
    bool first = true;
    for (const AnnotatedEntry& e : frontier) {
        if (!first) s += " ";
        first = false;
        s += "(" + e.prefix.str() + "," + e.thread.name() + ")";
    }
    return s + "}>";
}

std::string ExecUnitState::str() const {
    std::string s = "iseu<" + std::to_string(pending_acks()) + ",{";
    bool first = true;
    for (const EuEntry& e : store) {
        if (!first) s += " ";
        first = false;
        s += "(" + e.prefix.str() + "," + e.instr.str() + ")";
    }
    s += "}";
    switch (phase) {
        case EuPhase::Idle: break;
        case EuPhase::AwaitingReply: s += ",await:" + await_focus; break;
        case EuPhase::ReplyPending: s += std::string(",reply:") + (pending_reply ? "T" : "F"); break;
    }
    return s + ">";
}

GeneratorState initial_generator(const ThreadHandle& thread, GenMode mode,
                                 SelectionStrategy strategy) {
    GeneratorState g;
    g.mode = mode;
    g.strategy = strategy;
    g.root = thread;
    g.frontier.push_back({ReplySeq(), {}, thread});
    return g;
}

GeneratorState updpm(const AnnotatedEntry& entry, const GeneratorState& state) {
    auto it = std::find(state.frontier.begin(), state.frontier.end(), entry);
    if (it == state.frontier.end())
        throw std::invalid_argument("updpm: entry not in frontier");
    GeneratorState next = state;
    next.unacked = 0;
    next.frontier.erase(next.frontier.begin() + (it - state.frontier.begin()));
    if (act(entry.thread).is_basic()) {
        for (AnnotatedEntry& child : wildcard_expand(entry, state.strategy.wildcard))
            insert_sorted(next.frontier, std::move(child));
    }
    return next;
}

GeneratorState updcr(bool reply, const GeneratorState& state) {
    GeneratorState next = state;
    next.unacked += 1;
    next.root = reply ? thrt(state.root) : thrf(state.root);
    next.frontier.clear();
    for (const AnnotatedEntry& e : state.frontier) {
        if (e.prefix.empty() || !reply_matches(e.prefix.head(), reply)) continue;
        AnnotatedEntry kept{e.prefix.tail(),
                            {e.actions.begin() + 1, e.actions.end()},
                            e.thread};
        insert_sorted(next.frontier, std::move(kept));
    }
    return next;
}

std::vector<AnnotatedEntry> select(const std::vector<AnnotatedEntry>& frontier,
                                   const SelectionStrategy& strategy, int maxlen,
                                   const ThreadSpec& spec) {
    if (frontier.empty()) return {};
    int min_len = frontier.front().prefix.size();
    for (const AnnotatedEntry& e : frontier) min_len = std::min(min_len, e.prefix.size());

    std::vector<AnnotatedEntry> res;
    for (const AnnotatedEntry& e : frontier) {
        int len = e.prefix.size();
        if (len > maxlen) continue;
        bool min_length_ok = len == min_len;
        if (strategy.kind == StrategyKind::BreadthFirst) {
            if (min_length_ok) res.push_back(e);
            continue;
        }
        if (strategy.breadth_first && !min_length_ok) continue;
        if (len == 0 || residual_probability(e, spec) >= strategy.threshold) res.push_back(e);
    }
    return res;
}

std::vector<GenStep> gen_steps(const GeneratorState& state, int maxlen) {
    std::vector<GenStep> steps;
    if (state.frontier.empty()) {
        // Everything is dispatched; replies keep arriving while the actual
        // path still runs through basic actions.
        if (state.mode == GenMode::Safe && act(state.root).is_basic()) {
            for (bool e : {true, false})
                steps.push_back({Label::rcv_reply(4, e), updcr(e, state)});
        } else {
            steps.push_back({Label::jact(), std::nullopt});
        }
        return steps;
    }

    const ThreadSpec& spec = *state.frontier.front().thread.spec();
    std::vector<AnnotatedEntry> chosen = select(state.frontier, state.strategy, maxlen, spec);
    for (const AnnotatedEntry& e : chosen) {
        InstructionMessage msg{state.unacked, e.prefix, act(e.thread)};
        steps.push_back({Label::snd_chan(1, std::move(msg)), updpm(e, state)});
    }
    bool receives = state.mode == GenMode::Safe ? true : !chosen.empty();
    if (receives) {
        for (bool e : {true, false})
            steps.push_back({Label::rcv_reply(4, e), updcr(e, state)});
    }
    return steps;
}

UpdcmResult updcm(const InstructionMessage& msg, const ExecUnitState& state) {
    if (msg.ack > state.pending_acks())
        throw ProtocolViolation("message acknowledges more replies than are pending");
    ExecUnitState next = state;
    next.unacked_replies = state.unacked_replies.drop(msg.ack);

    const ReplySeq& produced = next.unacked_replies;  // replies the sender had not seen
    int strip = produced.size();
    int check = std::min(strip, msg.prefix.size());
    for (int i = 0; i < check; ++i) {
        if (!reply_matches(msg.prefix.at(i), produced.at(i) == Reply::True))
            return {std::move(next), true};  // contradicts a produced reply: stale
    }
    if (msg.prefix.size() < strip)
        throw ProtocolViolation("message prefix strips past its end");
    insert_sorted(next.store, {msg.prefix.drop(strip), msg.instr});
    return {std::move(next), false};
}

ExecUnitState updpr(bool reply, const ExecUnitState& state) {
    ExecUnitState next = state;
    next.unacked_replies = state.unacked_replies.append(reply_of(reply));
    next.store.clear();
    for (const EuEntry& e : state.store) {
        if (e.prefix.empty() || !reply_matches(e.prefix.head(), reply)) continue;
        insert_sorted(next.store, {e.prefix.tail(), e.instr});
    }
    return next;
}

bool enable(const ExtAction& instr, const std::vector<EuEntry>& store) {
    return std::find(store.begin(), store.end(), EuEntry{ReplySeq(), instr}) != store.end();
}

std::vector<EuStep> eu_steps(const ExecUnitState& state,
                             std::span<const InstructionMessage> offered) {
    std::vector<EuStep> steps;
    if (state.phase == EuPhase::ReplyPending) {
        ExecUnitState next = updpr(state.pending_reply, state);
        next.phase = EuPhase::Idle;
        next.await_focus.clear();
        next.pending_reply = false;
        steps.push_back({Label::snd_reply(3, state.pending_reply), EuStatus::Running,
                         std::move(next), false});
        return steps;
    }

    for (const InstructionMessage& d : offered) {
        UpdcmResult r = updcm(d, state);
        steps.push_back({Label::rcv_chan(2, d), EuStatus::Running, std::move(r.state),
                         r.discarded});
    }

    if (state.phase == EuPhase::AwaitingReply) {
        for (bool e : {true, false}) {
            ExecUnitState next = state;
            next.phase = EuPhase::ReplyPending;
            next.pending_reply = e;
            steps.push_back({Label::rcv_f(state.await_focus, e), EuStatus::Running,
                             std::move(next), false});
        }
        return steps;
    }

    for (const EuEntry& e : state.store) {
        if (!e.prefix.empty()) continue;
        switch (e.instr.kind) {
            case ExtKind::Basic: {
                ExecUnitState next = state;
                next.phase = EuPhase::AwaitingReply;
                next.await_focus = e.instr.action.focus;
                steps.push_back({Label::snd_f(e.instr.action.focus, e.instr.action.method),
                                 EuStatus::Running, std::move(next), false});
                break;
            }
            case ExtKind::Stop:
                steps.push_back({Label::stp(), EuStatus::Terminated, std::nullopt, false});
                break;
            case ExtKind::Dead:
                steps.push_back({Label::iact(), EuStatus::Dead, std::nullopt, false});
                break;
        }
    }
    return steps;
}

std::vector<ChannelStep<InstructionMessage>> channel_steps(
    const MsgChannel& ch, std::span<const InstructionMessage> offered) {
    std::vector<ChannelStep<InstructionMessage>> steps;
    if (!ch.full())
        for (const InstructionMessage& d : offered)
            steps.push_back({Label::rcv_chan(1, d), ch.pushed(d)});
    if (!ch.empty()) steps.push_back({Label::snd_chan(2, ch.head()), ch.popped()});
    return steps;
}

std::vector<ChannelStep<bool>> channel_steps(const ReplyChannel& ch) {
    std::vector<ChannelStep<bool>> steps;
    if (!ch.full())
        for (bool e : {true, false}) steps.push_back({Label::rcv_reply(3, e), ch.pushed(e)});
    if (!ch.empty()) steps.push_back({Label::snd_reply(4, ch.head()), ch.popped()});
    return steps;
}

std::vector<std::string> generator_invariant_violations(const GeneratorState& s, int maxlen,
                                                        bool strict_bounds) {
    std::vector<std::string> v;
    int bound = strict_bounds ? maxlen : maxlen + 1;
    if (s.unacked > bound)
        v.push_back("generator unacked " + std::to_string(s.unacked) + " > " +
                    std::to_string(bound) + " in " + s.str());
    for (const AnnotatedEntry& e : s.frontier) {
        if (e.prefix.size() > maxlen + 1)
            v.push_back("frontier prefix " + e.prefix.str() + " longer than maxlen+1 in " + s.str());
        if (e.prefix.size() != static_cast<int>(e.actions.size()))
            v.push_back("frontier annotations out of step in " + s.str());
    }
    for (size_t i = 0; i < s.frontier.size(); ++i)
        for (size_t j = i + 1; j < s.frontier.size(); ++j) {
            const ReplySeq& a = s.frontier[i].prefix;
            const ReplySeq& b = s.frontier[j].prefix;
            if (a.is_prefix_of(b) || b.is_prefix_of(a))
                v.push_back("frontier prefixes " + a.str() + " and " + b.str() +
                            " comparable in " + s.str());
        }
    return v;
}

std::vector<std::string> exec_unit_invariant_violations(const ExecUnitState& s, int maxlen,
                                                        bool strict_bounds) {
    std::vector<std::string> v;
    if (strict_bounds && s.pending_acks() > maxlen)
        v.push_back("exec unit pending acks " + std::to_string(s.pending_acks()) + " > " +
                    std::to_string(maxlen) + " in " + s.str());
    int empties = 0;
    for (const EuEntry& e : s.store)
        if (e.prefix.empty()) ++empties;
    if (empties > 1) v.push_back("more than one empty-prefix store entry in " + s.str());
    return v;
}

}  // namespace isplab
