#include "isplab/lts.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace isplab {

using nlohmann::json;

std::string Label::str() const {
    switch (kind) {
        case LabelKind::SndChan:
            return "snd_" + std::to_string(channel) + "(" +
                   (channel <= 2 ? msg.str() : std::string(reply ? "T" : "F")) + ")";
        case LabelKind::RcvChan:
            return "rcv_" + std::to_string(channel) + "(" +
                   (channel <= 2 ? msg.str() : std::string(reply ? "T" : "F")) + ")";
        case LabelKind::SndF: return "snd_" + focus + "(" + method + ")";
        case LabelKind::RcvF: return "rcv_" + focus + "(" + (reply ? "T" : "F") + ")";
        case LabelKind::Stp: return "stp";
        case LabelKind::IAct: return "i";
        case LabelKind::JAct: return "j";
        case LabelKind::Tau: return "tau";
    }
    return "?";
}

int Lts::add_state(std::string name, bool terminating, std::string desc) {
    names_.push_back(std::move(name));
    descs_.push_back(std::move(desc));
    terminating_.push_back(terminating);
    return static_cast<int>(names_.size()) - 1;
}

int Lts::label_id(const Label& l) {
    auto it = label_ids_.find(l);
    if (it != label_ids_.end()) return it->second;
    labels_.push_back(l);
    int id = static_cast<int>(labels_.size()) - 1;
    label_ids_.emplace(l, id);
    return id;
}

void Lts::add_transition(int from, const Label& l, int to) {
    add_transition(from, label_id(l), to);
}

void Lts::add_transition(int from, int label, int to) {
    transitions_.push_back({from, label, to});
}

std::vector<Transition> Lts::out(int s) const {
    std::vector<Transition> res;
    for (const Transition& t : transitions_)
        if (t.from == s) res.push_back(t);
    return res;
}

std::vector<int> Lts::deadlock_states() const {
    std::vector<bool> has_out(static_cast<size_t>(num_states()), false);
    for (const Transition& t : transitions_) has_out[static_cast<size_t>(t.from)] = true;
    std::vector<int> res;
    for (int s = 0; s < num_states(); ++s)
        if (!has_out[static_cast<size_t>(s)] && !terminating(s)) res.push_back(s);
    return res;
}

std::vector<int> Lts::protocol_deadlock_states() const {
    // States reachable without crossing an i edge; a deadlock outside that
    // set sits behind the deliberate i step and is not a wedge.
    std::vector<bool> reach(static_cast<size_t>(num_states()), false);
    reach[static_cast<size_t>(initial_)] = true;
    std::vector<int> stack{initial_};
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const Transition& t : transitions_) {
            if (t.from != s || label(t.label).kind == LabelKind::IAct) continue;
            if (!reach[static_cast<size_t>(t.to)]) {
                reach[static_cast<size_t>(t.to)] = true;
                stack.push_back(t.to);
            }
        }
    }
    std::vector<int> res;
    for (int s : deadlock_states())
        if (reach[static_cast<size_t>(s)]) res.push_back(s);
    return res;
}

Lts Lts::abstracted(const std::vector<LabelKind>& kinds) const {
    Lts res;
    for (int s = 0; s < num_states(); ++s)
        res.add_state(state_name(s), terminating(s), state_desc(s));
    res.set_initial(initial_);
    for (const Transition& t : transitions_) {
        const Label& l = label(t.label);
        bool hide = std::find(kinds.begin(), kinds.end(), l.kind) != kinds.end();
        res.add_transition(t.from, hide ? Label::tau() : l, t.to);
    }
    return res;
}

Lts Lts::reachable_part() const {
    // Adjacency index first; the transition list itself is unordered.
    std::vector<int> head(static_cast<size_t>(num_states()), -1);
    std::vector<int> next_edge(transitions_.size(), -1);
    for (int e = static_cast<int>(transitions_.size()) - 1; e >= 0; --e) {
        int from = transitions_[static_cast<size_t>(e)].from;
        next_edge[static_cast<size_t>(e)] = head[static_cast<size_t>(from)];
        head[static_cast<size_t>(from)] = e;
    }
    std::vector<int> renum(static_cast<size_t>(num_states()), -1);
    std::vector<int> order{initial_};
    renum[static_cast<size_t>(initial_)] = 0;
    // BFS keeps numbering stable w.r.t. discovery order.
    for (size_t qi = 0; qi < order.size(); ++qi) {
        for (int e = head[static_cast<size_t>(order[qi])]; e >= 0; e = next_edge[static_cast<size_t>(e)]) {
            int to = transitions_[static_cast<size_t>(e)].to;
            if (renum[static_cast<size_t>(to)] < 0) {
                renum[static_cast<size_t>(to)] = static_cast<int>(order.size());
                order.push_back(to);
            }
        }
    }
    Lts res;
    for (int old : order) res.add_state(state_name(old), terminating(old), state_desc(old));
    res.set_initial(0);
    for (const Transition& t : transitions_) {
        if (renum[static_cast<size_t>(t.from)] < 0 || renum[static_cast<size_t>(t.to)] < 0) continue;
        res.add_transition(renum[static_cast<size_t>(t.from)], label(t.label),
                           renum[static_cast<size_t>(t.to)]);
    }
    return res;
}

namespace {

json label_to_json(const Label& l) {
    json j;
    switch (l.kind) {
        case LabelKind::SndChan:
        case LabelKind::RcvChan:
            j["kind"] = l.kind == LabelKind::SndChan ? "snd_chan" : "rcv_chan";
            j["channel"] = l.channel;
            if (l.channel <= 2) {
                j["msg"] = {{"ack", l.msg.ack},
                            {"prefix", l.msg.prefix.symbols()},
                            {"instr", l.msg.instr.str()}};
            } else {
                j["reply"] = l.reply;
            }
            break;
        case LabelKind::SndF:
            j["kind"] = "snd_f";
            j["focus"] = l.focus;
            j["method"] = l.method;
            break;
        case LabelKind::RcvF:
            j["kind"] = "rcv_f";
            j["focus"] = l.focus;
            j["reply"] = l.reply;
            break;
        case LabelKind::Stp: j["kind"] = "stp"; break;
        case LabelKind::IAct: j["kind"] = "i"; break;
        case LabelKind::JAct: j["kind"] = "j"; break;
        case LabelKind::Tau: j["kind"] = "tau"; break;
    }
    return j;
}

ExtAction ext_action_from_str(const std::string& s) {
    if (s == "stop") return ExtAction::stop();
    if (s == "dead") return ExtAction::dead();
    auto dot = s.find('.');
    if (dot == std::string::npos) throw std::invalid_argument("bad instruction " + s);
    return ExtAction::basic({s.substr(0, dot), s.substr(dot + 1)});
}

Label label_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "snd_chan" || kind == "rcv_chan") {
        int ch = j.at("channel").get<int>();
        if (ch <= 2) {
            const json& m = j.at("msg");
            InstructionMessage msg{m.at("ack").get<int>(),
                                   ReplySeq(m.at("prefix").get<std::string>()),
                                   ext_action_from_str(m.at("instr").get<std::string>())};
            return kind == "snd_chan" ? Label::snd_chan(ch, msg) : Label::rcv_chan(ch, msg);
        }
        bool e = j.at("reply").get<bool>();
        return kind == "snd_chan" ? Label::snd_reply(ch, e) : Label::rcv_reply(ch, e);
    }
    if (kind == "snd_f")
        return Label::snd_f(j.at("focus").get<std::string>(), j.at("method").get<std::string>());
    if (kind == "rcv_f")
        return Label::rcv_f(j.at("focus").get<std::string>(), j.at("reply").get<bool>());
    if (kind == "stp") return Label::stp();
    if (kind == "i") return Label::iact();
    if (kind == "j") return Label::jact();
    if (kind == "tau") return Label::tau();
    throw std::invalid_argument("unknown label kind " + kind);
}

}  // namespace

std::string Lts::to_json() const {
    json j;
    j["states"] = json::array();
    for (int s = 0; s < num_states(); ++s) j["states"].push_back(state_name(s));
    j["initial"] = state_name(initial_);
    j["terminating"] = json::array();
    for (int s = 0; s < num_states(); ++s)
        if (terminating(s)) j["terminating"].push_back(state_name(s));
    j["transitions"] = json::array();
    for (const Transition& t : transitions_) {
        j["transitions"].push_back({{"from", state_name(t.from)},
                                    {"label", label_to_json(label(t.label))},
                                    {"to", state_name(t.to)}});
    }
    return j.dump(2) + "\n";
}

Lts Lts::from_json(const std::string& text) {
    json j = json::parse(text);
    Lts res;
    std::map<std::string, int> idx;
    for (const auto& s : j.at("states")) {
        std::string name = s.get<std::string>();
        idx[name] = res.add_state(name);
    }
    for (const auto& s : j.at("terminating"))
        res.set_terminating(idx.at(s.get<std::string>()), true);
    res.set_initial(idx.at(j.at("initial").get<std::string>()));
    for (const auto& t : j.at("transitions")) {
        res.add_transition(idx.at(t.at("from").get<std::string>()),
                           label_from_json(t.at("label")),
                           idx.at(t.at("to").get<std::string>()));
    }
    return res;
}

LtsStats explore_stats(const Lts& lts) {
    LtsStats st;
    st.states = lts.num_states();
    st.transitions = lts.num_transitions();
    st.deadlock_states = static_cast<int>(lts.deadlock_states().size());
    for (int s = 0; s < lts.num_states(); ++s)
        if (lts.terminating(s)) ++st.terminating_states;
    return st;
}

}  // namespace isplab
