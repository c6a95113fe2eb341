// Finite labelled transition systems with a termination predicate.
//
// Labels cover both sides of the pipeline: channel send/receive with
// instruction-message or reply payloads, the open service actions
// snd_f(m) / rcv_f(b), the constants stp / i / j, and the silent step tau.

#ifndef ISPLAB_LTS_HPP
#define ISPLAB_LTS_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/replyseq.hpp"

namespace isplab {

struct InstructionMessage {
    int ack = 0;
    ReplySeq prefix;
    ExtAction instr;

    auto operator<=>(const InstructionMessage&) const = default;
    std::string str() const {
        return "<" + std::to_string(ack) + "," + prefix.str() + "," + instr.str() + ">";
    }
};

enum class LabelKind : std::uint8_t { SndChan, RcvChan, SndF, RcvF, Stp, IAct, JAct, Tau };

struct Label {
    LabelKind kind = LabelKind::Tau;
    int channel = 0;           // 1..2 message channels, 3..4 reply channels
    InstructionMessage msg;    // channel 1/2 payload
    bool reply = false;        // channel 3/4 payload, RcvF reply
    std::string focus;         // SndF / RcvF
    std::string method;        // SndF

    static Label snd_chan(int ch, InstructionMessage m) {
        Label l;
        l.kind = LabelKind::SndChan;
        l.channel = ch;
        l.msg = std::move(m);
        return l;
    }
    static Label rcv_chan(int ch, InstructionMessage m) {
        Label l = snd_chan(ch, std::move(m));
        l.kind = LabelKind::RcvChan;
        return l;
    }
    static Label snd_reply(int ch, bool e) {
        Label l;
        l.kind = LabelKind::SndChan;
        l.channel = ch;
        l.reply = e;
        return l;
    }
    static Label rcv_reply(int ch, bool e) {
        Label l = snd_reply(ch, e);
        l.kind = LabelKind::RcvChan;
        return l;
    }
    static Label snd_f(std::string focus, std::string method) {
        Label l;
        l.kind = LabelKind::SndF;
        l.focus = std::move(focus);
        l.method = std::move(method);
        return l;
    }
    static Label rcv_f(std::string focus, bool e) {
        Label l;
        l.kind = LabelKind::RcvF;
        l.focus = std::move(focus);
        l.reply = e;
        return l;
    }
    static Label stp() { return Label{LabelKind::Stp, 0, {}, false, {}, {}}; }
    static Label iact() { return Label{LabelKind::IAct, 0, {}, false, {}, {}}; }
    static Label jact() { return Label{LabelKind::JAct, 0, {}, false, {}, {}}; }
    static Label tau() { return Label{}; }

    bool is_tau() const { return kind == LabelKind::Tau; }
    auto operator<=>(const Label&) const = default;
    std::string str() const;
};

struct Transition {
    int from = 0;
    int label = 0;  // index into Lts::labels()
    int to = 0;

    auto operator<=>(const Transition&) const = default;
};

class Lts {
public:
    int add_state(std::string name, bool terminating = false, std::string desc = {});
    void set_initial(int s) { initial_ = s; }
    void set_terminating(int s, bool v) { terminating_.at(static_cast<size_t>(s)) = v; }
    int label_id(const Label& l);  // interns
    void add_transition(int from, const Label& l, int to);
    void add_transition(int from, int label_id, int to);

    int initial() const { return initial_; }
    int num_states() const { return static_cast<int>(names_.size()); }
    int num_transitions() const { return static_cast<int>(transitions_.size()); }
    bool terminating(int s) const { return terminating_.at(static_cast<size_t>(s)); }
    const std::string& state_name(int s) const { return names_.at(static_cast<size_t>(s)); }
    const std::string& state_desc(int s) const { return descs_.at(static_cast<size_t>(s)); }
    const std::vector<Label>& labels() const { return labels_; }
    const Label& label(int id) const { return labels_.at(static_cast<size_t>(id)); }
    const std::vector<Transition>& transitions() const { return transitions_; }

    // Outgoing transitions of s, in insertion order.
    std::vector<Transition> out(int s) const;

    // States with no outgoing transition that are not terminating.
    std::vector<int> deadlock_states() const;

    // Deadlock states that are not intended inaction: a sink entered only by
    // i transitions is the deliberate i-then-deadlock shape; anything else
    // stuck is a wedged protocol.
    std::vector<int> protocol_deadlock_states() const;

    // Rewrites every transition whose label kind is in `kinds` to tau.
    Lts abstracted(const std::vector<LabelKind>& kinds) const;

    // Drops states unreachable from the initial state (stable renumbering).
    Lts reachable_part() const;

    std::string to_json() const;
    static Lts from_json(const std::string& text);

    bool operator==(const Lts&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<std::string> descs_;
    std::vector<bool> terminating_;
    std::vector<Label> labels_;
    std::map<Label, int> label_ids_;
    std::vector<Transition> transitions_;
    int initial_ = 0;
};

struct LtsStats {
    int states = 0;
    int transitions = 0;
    int deadlock_states = 0;
    int terminating_states = 0;
};

LtsStats explore_stats(const Lts& lts);

}  // namespace isplab

#endif
