// Regular threads as finite guarded recursive specifications.
//
// A ThreadSpec is a closed system of equations  X = S | D | f.m ? Y : Z
// over named variables.  Branch positions are always variable references,
// so guardedness is a syntactic invariant and the residual threads of a
// state are exactly the equation names reachable from it.

#ifndef ISPLAB_BTA_HPP
#define ISPLAB_BTA_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace isplab {

// A request `focus.method` to the service named by the focus.
struct BasicAction {
    std::string focus;
    std::string method;

    auto operator<=>(const BasicAction&) const = default;
    std::string str() const { return focus + "." + method; }
};

// Instructions: basic actions plus the stop/dead markers.
enum class ExtKind : std::uint8_t { Basic, Stop, Dead };

struct ExtAction {
    ExtKind kind = ExtKind::Stop;
    BasicAction action;  // meaningful only when kind == Basic

    static ExtAction basic(BasicAction a) { return {ExtKind::Basic, std::move(a)}; }
    static ExtAction stop() { return {ExtKind::Stop, {}}; }
    static ExtAction dead() { return {ExtKind::Dead, {}}; }

    bool is_basic() const { return kind == ExtKind::Basic; }
    auto operator<=>(const ExtAction&) const = default;
    std::string str() const;
};

enum class RhsKind : std::uint8_t { Terminate, Deadlock, Postcond };

struct Equation {
    std::string name;
    RhsKind kind = RhsKind::Terminate;
    BasicAction action;    // Postcond only
    std::string on_true;   // Postcond only
    std::string on_false;  // Postcond only

    bool operator==(const Equation&) const = default;
};

struct ParseError {
    int line = 0;
    std::string message;

    std::string str() const { return message + " at line " + std::to_string(line); }
};

class ThreadHandle;

class ThreadSpec {
public:
    // Builds a validated spec; throws std::invalid_argument on a broken one.
    // Prefer parse_spec for untrusted input.
    ThreadSpec(std::vector<Equation> equations, std::string start,
               std::map<BasicAction, double> probabilities = {});

    const std::vector<Equation>& equations() const { return equations_; }
    const std::string& start() const { return start_; }
    const std::map<BasicAction, double>& probabilities() const { return probabilities_; }

    int index_of(const std::string& name) const;  // -1 when absent
    const Equation& equation(int idx) const { return equations_.at(static_cast<size_t>(idx)); }
    int size() const { return static_cast<int>(equations_.size()); }

    // Probability that `a` yields reply true; 0.5 when unspecified.
    double prob(const BasicAction& a) const;

    // Bisimulation class of each state; two states denote identical threads
    // iff their classes coincide.  Class of the canonical dead handle is
    // dead_class().
    int bisim_class(int state) const;
    int dead_class() const { return dead_class_; }

    ThreadHandle handle(const std::string& name) const;
    ThreadHandle start_handle() const;

    bool operator==(const ThreadSpec& other) const {
        return equations_ == other.equations_ && start_ == other.start_ &&
               probabilities_ == other.probabilities_;
    }

private:
    std::vector<Equation> equations_;
    std::string start_;
    std::map<BasicAction, double> probabilities_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> class_of_;  // per-equation bisimulation class
    int dead_class_ = -1;

    void compute_classes();
};

// One residual thread of a spec.  State -1 is the canonical deadlocked
// thread produced by thrt/thrf on S and D.
class ThreadHandle {
public:
    ThreadHandle() = default;
    ThreadHandle(const ThreadSpec* spec, int state) : spec_(spec), state_(state) {}

    const ThreadSpec* spec() const { return spec_; }
    int state() const { return state_; }
    bool is_canonical_dead() const { return state_ < 0; }
    const std::string& name() const;

    auto operator<=>(const ThreadHandle&) const = default;

private:
    const ThreadSpec* spec_ = nullptr;
    int state_ = -1;
};

struct ParseResult {
    std::optional<ThreadSpec> spec;
    std::vector<ParseError> errors;

    bool ok() const { return spec.has_value(); }
};

ParseResult parse_spec(const std::string& text);
std::string print_spec(const ThreadSpec& spec);

// First action of a residual thread: act(S)=stop, act(D)=dead, act(t<a>t')=a.
ExtAction act(const ThreadHandle& t);
// Continuations: thrt/thrf of S and D are the canonical dead thread.
ThreadHandle thrt(const ThreadHandle& t);
ThreadHandle thrf(const ThreadHandle& t);

// Res(t): least set containing t and closed under branches of postconditional
// members.  S and D have no residual step, so Res(S) = {S}.
std::vector<ThreadHandle> residuals(const ThreadHandle& t);

struct MinimizeResult {
    ThreadSpec spec;
    std::map<std::string, std::string> state_map;  // original name -> minimized name
};

// Bisimulation-minimal quotient of the spec (partition refinement over the
// deterministic node-labelled graph).  Idempotent; preserves act/thrt/thrf
// through state_map.
MinimizeResult minimize(const ThreadSpec& spec);

// Identity of two residual threads of the same spec (minimized-state equality).
bool threads_equal(const ThreadHandle& a, const ThreadHandle& b);

}  // namespace isplab

#endif
