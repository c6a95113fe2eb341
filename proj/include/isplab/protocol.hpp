// The instruction stream protocol: generator, two transmission channels and
// the execution unit, as pure state machines.
//
// Two deviations from the naive reading of the component definitions, both
// required for the composed system to match the reference behaviour:
//
//  * The execution unit remembers the values of the replies it has produced
//    but not yet seen acknowledged (`unacked_replies`).  An arriving message
//    is stripped against that memory; a message whose reply prefix
//    contradicts the replies that actually happened is stale speculation and
//    is discarded instead of being blindly truncated into the store.
//
//  * The generator keeps the residual thread at its current consumption
//    point (`root`).  Once the frontier is exhausted it keeps consuming
//    replies while the instruction due at the root is a basic action, and
//    performs j only when the root has reached stop or dead; terminating
//    the moment the frontier empties leaves replies stuck in the channel
//    and wedges the execution unit mid-handshake at capacity 1.
//
// STRICT mode reproduces the literal component equations (receive enabled
// only when the selection is nonempty, j immediately on empty frontier) and
// exists to exhibit the resulting deadlocks; SAFE is the default.

#ifndef ISPLAB_PROTOCOL_HPP
#define ISPLAB_PROTOCOL_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isplab/bta.hpp"
#include "isplab/lts.hpp"
#include "isplab/replyseq.hpp"
#include "isplab/strategies.hpp"

namespace isplab {

// Balance errors and strip-past-end are protocol violations: unreachable in
// a well-formed run, collected as hard failures by the exploration observer.
struct ProtocolViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GenMode : std::uint8_t { StrictPaper, Safe };

struct GeneratorState {
    int unacked = 0;    // replies consumed since the last message sent
    ThreadHandle root;  // residual thread at the current consumption point
    std::vector<AnnotatedEntry> frontier;  // sorted, pairwise prefix-incomparable
    GenMode mode = GenMode::Safe;
    SelectionStrategy strategy;

    auto operator<=>(const GeneratorState&) const = default;
    std::string str() const;
};

GeneratorState initial_generator(const ThreadHandle& thread, GenMode mode,
                                 SelectionStrategy strategy);

// Generator update on producing the message for `entry`: resets unacked,
// replaces the entry by its children (or removes it for stop/dead).
GeneratorState updpm(const AnnotatedEntry& entry, const GeneratorState& state);

// Generator update on consuming a reply: bumps unacked, keeps entries whose
// prefix head matches the reply (head removed), discards the rest.
GeneratorState updcr(bool reply, const GeneratorState& state);

// Entries eligible for the next message under the strategy.  The plain
// formula keeps minimum-length entries of length <= maxlen; thresholded
// variants additionally require the entry's residual probability, and
// prob95 drops the minimum-length restriction.  Empty-prefix entries always
// qualify.
std::vector<AnnotatedEntry> select(const std::vector<AnnotatedEntry>& frontier,
                                   const SelectionStrategy& strategy, int maxlen,
                                   const ThreadSpec& spec);

struct GenStep {
    Label label;
    std::optional<GeneratorState> next;  // nullopt: generator terminated

    bool terminated() const { return !next.has_value(); }
};

std::vector<GenStep> gen_steps(const GeneratorState& state, int maxlen);

struct EuEntry {
    ReplySeq prefix;
    ExtAction instr;

    auto operator<=>(const EuEntry&) const = default;
};

enum class EuPhase : std::uint8_t { Idle, AwaitingReply, ReplyPending };

struct ExecUnitState {
    ReplySeq unacked_replies;  // values produced, acknowledgement still due
    std::vector<EuEntry> store;  // sorted
    EuPhase phase = EuPhase::Idle;
    std::string await_focus;   // AwaitingReply / ReplyPending
    bool pending_reply = false;  // ReplyPending

    int pending_acks() const { return unacked_replies.size(); }
    auto operator<=>(const ExecUnitState&) const = default;
    std::string str() const;
};

// Execution unit update on consuming message <k,u,a>: drops the k
// acknowledged replies from memory, strips u against the remaining produced
// replies and stores the residual entry, or discards a contradicting one.
struct UpdcmResult {
    ExecUnitState state;
    bool discarded = false;
};
UpdcmResult updcm(const InstructionMessage& msg, const ExecUnitState& state);

// Execution unit update on producing a reply: appends it to the reply
// memory and re-roots the store on the produced value.
ExecUnitState updpr(bool reply, const ExecUnitState& state);

// True iff `instr` is due now, i.e. the store holds it under the empty prefix.
bool enable(const ExtAction& instr, const std::vector<EuEntry>& store);

enum class EuStatus : std::uint8_t { Running, Terminated, Dead };

struct EuStep {
    Label label;
    EuStatus status = EuStatus::Running;
    std::optional<ExecUnitState> next;  // engaged iff status == Running
    bool discarded_message = false;     // receive steps only
};

// Steps of the execution unit given the messages currently on offer.
std::vector<EuStep> eu_steps(const ExecUnitState& state,
                             std::span<const InstructionMessage> offered);

template <typename Payload>
struct Channel {
    int capacity = 1;
    std::vector<Payload> buffer;  // front = oldest

    bool full() const { return static_cast<int>(buffer.size()) >= capacity; }
    bool empty() const { return buffer.empty(); }
    Payload head() const { return buffer.front(); }
    Channel pushed(Payload p) const {
        Channel c = *this;
        c.buffer.push_back(std::move(p));
        return c;
    }
    Channel popped() const {
        Channel c = *this;
        c.buffer.erase(c.buffer.begin());
        return c;
    }
    auto operator<=>(const Channel&) const = default;
};

using MsgChannel = Channel<InstructionMessage>;
using ReplyChannel = Channel<bool>;

template <typename Payload>
struct ChannelStep {
    Label label;
    Channel<Payload> next;
};

// Message channel: rcv_1 while not full, snd_2 of the head while nonempty.
std::vector<ChannelStep<InstructionMessage>> channel_steps(
    const MsgChannel& ch, std::span<const InstructionMessage> offered);

// Reply channel: rcv_3 of either reply while not full, snd_4 of the head.
std::vector<ChannelStep<bool>> channel_steps(const ReplyChannel& ch);

// Reachable-state checks used by the exploration observer.  `strict_bounds`
// adds the literal unacked <= maxlen / pending <= maxlen bounds, which the
// protocol exceeds by one in reachable states; the relaxed bounds are the
// provable ones.
std::vector<std::string> generator_invariant_violations(const GeneratorState& s, int maxlen,
                                                        bool strict_bounds);
std::vector<std::string> exec_unit_invariant_violations(const ExecUnitState& s, int maxlen,
                                                        bool strict_bounds);

}  // namespace isplab

#endif
