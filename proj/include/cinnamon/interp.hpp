#pragma once

#include "cinnamon/core.hpp"
#include "cinnamon/model.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace cinnamon {

/// Variable store plus the FORW / FAILURE system flags. Every declared
/// variable always has a value (0 or "" by default).
class Environment {
public:
    Environment() = default;
    Environment(std::vector<std::string> names, Mode mode);

    const std::vector<std::string>& names() const { return *names_; }
    std::size_t size() const { return values_.size(); }
    std::optional<std::size_t> slot(const std::string& name) const;
    bool contains(const std::string& name) const { return slot(name).has_value(); }

    const Value& get(const std::string& name) const;
    void set(const std::string& name, Value v);
    const Value& at(std::size_t slot) const { return values_[slot]; }
    Value& at(std::size_t slot) { return values_[slot]; }

    bool forw = true;
    bool failure = false;

    /// Values only (flags excluded), compared by name.
    bool same_values(const Environment& other) const;
    friend bool operator==(const Environment& a, const Environment& b) {
        return a.forw == b.forw && a.failure == b.failure && a.same_values(b);
    }

private:
    std::shared_ptr<const std::vector<std::string>> names_ = std::make_shared<std::vector<std::string>>();
    std::shared_ptr<const std::unordered_map<std::string, std::size_t>> index_ =
        std::make_shared<std::unordered_map<std::string, std::size_t>>();
    std::vector<Value> values_;
};

enum class RuntimeErrorKind { IrreversibleHistory, TopLevelReturn, ConsNonSymbolHead, ModeMismatch };

const char* to_string(RuntimeErrorKind kind);

class PrimitiveError : public std::runtime_error {
public:
    PrimitiveError(RuntimeErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    RuntimeErrorKind kind() const { return kind_; }

private:
    RuntimeErrorKind kind_;
};

/// Forward action of a primitive (FORW must be 1). Tests only set FAILURE.
Environment exec_forward_prim(const Primitive& p, Environment env);

/// Backward action: inc decrements, everything else is the identity.
Environment exec_backward_prim(const Primitive& p, Environment env);

enum class UndoMode { Paper, Journal };

struct RunOptions {
    std::uint64_t step_limit = 1'000'000;
    UndoMode undo_mode = UndoMode::Paper;
    bool check_invariants = true; // O(1) per step; throws InvariantViolation
};

class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

struct WriteRecord {
    std::string var;
    Value old_value;
    Value new_value;
    friend bool operator==(const WriteRecord&, const WriteRecord&) = default;
};

enum class EventKind {
    TryArrow,
    PrimFwd,
    PrimBwd,
    PrimFail,
    Call,
    Return,
    ReenterBwd,
    UncallBwd,
    HaltSuccess,
    HaltFailure,
    HaltLimit,
    RuntimeError,
};

const char* to_string(EventKind kind);

struct TraceEvent {
    std::uint64_t step = 0;
    bool forward = true;
    EventKind kind = EventKind::TryArrow;
    std::string subnet;
    std::optional<std::string> arrow;
    std::string from;
    std::optional<std::string> to;
    std::vector<WriteRecord> writes;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// One flat JSON object, fields in declaration order, absent optionals omitted.
std::string to_json(const TraceEvent& e);

enum class OutcomeKind { Success, Failure, StepLimit, RuntimeError };

const char* to_string(OutcomeKind kind);

struct Outcome {
    OutcomeKind kind = OutcomeKind::Failure;
    Environment env; // final environment; meaningful on Success
    RuntimeErrorKind error = RuntimeErrorKind::IrreversibleHistory;
    std::string location;
    std::string message;

    bool success() const { return kind == OutcomeKind::Success; }
};

/// A validated, macro-expanded, normalized and indexed cinnamon, ready to run.
/// Immutable; machines share it.
class Program {
public:
    /// Throws ValidationError if the cinnamon is ill formed.
    static std::shared_ptr<const Program> load(const Cinnamon& c);

    struct Target {
        NodeRef::Kind kind = NodeRef::Kind::Ordinary;
        int state = -1;
    };
    struct OperandSlot {
        int slot = -1; // -1: literal
        Value literal;
    };
    struct Item {
        enum class Kind { Lambda, Prim, Call } kind = Kind::Lambda;
        PrimKind prim = PrimKind::Clear;
        std::vector<OperandSlot> operands;
        int callee = -1;
        std::vector<OperandSlot> actuals;
    };
    struct ArrowInfo {
        std::string id;
        std::string text;
        int subnet = -1;
        int source = -1;
        Target target;
        Item item;
    };
    struct StateInfo {
        std::string id;
        int subnet = -1;
        std::vector<int> out;
    };
    struct SubnetInfo {
        std::string name;
        std::vector<int> formals;
        int init = -1;
    };

    const Cinnamon& source() const { return source_; }
    const Cinnamon& normalized() const { return normalized_; }
    Mode mode() const { return source_.mode; }
    int main() const { return main_; }

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<ArrowInfo>& arrows() const { return arrows_; }
    const std::vector<StateInfo>& states() const { return states_; }
    const std::vector<SubnetInfo>& subnets() const { return subnets_; }

    /// All variables at their defaults, flags FORW=1, FAILURE=0.
    Environment initial_environment() const;
    std::string target_name(const Target& t) const;
    /// True if running subnet `from` can enter subnet `to`, directly or through calls.
    bool reaches(int from, int to) const {
        return reaches_[static_cast<std::size_t>(from) * subnets_.size() + static_cast<std::size_t>(to)];
    }

private:
    Program() = default;

    Cinnamon source_;
    Cinnamon normalized_;
    int main_ = -1;
    std::vector<std::string> variables_;
    std::vector<ArrowInfo> arrows_;
    std::vector<StateInfo> states_;
    std::vector<SubnetInfo> subnets_;
    std::vector<bool> reaches_; // row-major, subnets x subnets
};

using ValueList = std::vector<Value>;

struct Frame {
    Program::Target return_state;
    std::size_t remaining_at_call = 0; // kept as recorded; the ArrowRec copy is the one consulted
    int caller = -1;
    ValueList caller_param_snapshot; // empty when the callee cannot reach the caller
    int call_arrow = -1;
};

using SlotValues = std::vector<std::pair<std::size_t, Value>>;

struct ArrowRec {
    int arrow = -1;
    std::uint32_t remaining = 0; // out-degrees are small; keeps the common entry at 8 bytes
};
struct CallSep {
    int call_arrow = -1;
    int callee = -1;
    ValueList prebind_formal_snapshot;
};
struct RetMark {
    Frame frame;
    int callee = -1;
    SlotValues undo; // prior values, in write order
};
struct Journal {
    int arrow = -1;
    std::size_t remaining = 0;
    SlotValues writes; // prior values, in write order
};

// Everything but ArrowRec is boxed: a diverging run pushes millions of
// ArrowRec entries, so the entry size dominates memory traffic.
using ArrStEntry =
    std::variant<ArrowRec, std::unique_ptr<CallSep>, std::unique_ptr<RetMark>, std::unique_ptr<Journal>>;

enum class ArrStKind { ArrowRec, CallSep, RetMark, Journal };

inline ArrStKind kind_of(const ArrStEntry& e) { return static_cast<ArrStKind>(e.index()); }

using EventSink = std::function<void(const TraceEvent&)>;

/// The small-step backtracking machine.
class Machine {
public:
    Machine(std::shared_ptr<const Program> program, Environment initial, RunOptions options = {});

    /// One transition of the step relation; events go to the sink, if any.
    void step(const EventSink& sink);
    std::vector<TraceEvent> step();

    /// Steps until halted.
    const Outcome& run(const EventSink& sink = {});

    bool halted() const { return halted_; }
    const Outcome& outcome() const { return outcome_; }

    const Program& program() const { return *program_; }
    const Environment& env() const { return env_; }
    bool forward() const { return env_.forw; }
    std::uint64_t steps() const { return steps_; }
    const std::string& current_subnet() const;
    std::string state() const;
    std::vector<std::string> remaining() const;
    const std::deque<ArrStEntry>& arr_stack() const { return arr_; }
    const std::vector<Frame>& subnet_stack() const { return frames_; }
    std::size_t call_separators() const { return separators_; }
    std::size_t return_marks() const { return return_marks_; }

    /// Throws InvariantViolation if the machine configuration is inconsistent.
    void check_invariants() const;
    [[noreturn]] void report_invariant_violation() const;
    void advance();

private:
    void forward_step();
    void backward_step();
    void enter(const Program::Target& target);
    void do_return();
    void halt(OutcomeKind kind);
    void push(ArrStEntry e);
    void push_rec(int arrow, std::uint32_t remaining) { arr_.emplace_back(std::in_place_type<ArrowRec>, arrow, remaining); }
    ArrStEntry pop();
    std::size_t out_size() const;
    bool listening() const { return sink_ && *sink_; }
    // Strings are only built when a sink is listening.
    void emit(EventKind kind, std::optional<int> arrow, const Program::Target& from,
              std::optional<Program::Target> to, const SlotValues& prior = {}) {
        if (listening()) emit_event(kind, arrow, from, to, prior);
    }
    void emit_event(EventKind kind, std::optional<int> arrow, const Program::Target& from,
                    std::optional<Program::Target> to, const SlotValues& prior);
    ValueList read(const std::vector<int>& slots) const;
    void write(std::size_t slot, Value v, SlotValues* prior);
    std::array<Value*, 3> resolve(const Program::Item& item);

    std::shared_ptr<const Program> program_;
    RunOptions options_;
    Environment env_;
    int current_ = -1;
    Program::Target state_;
    std::size_t remaining_ = 0;
    std::deque<ArrStEntry> arr_;
    std::array<Value, 3> literals_; // scratch copies of literal operands
    std::vector<Frame> frames_;
    std::size_t separators_ = 0;
    std::size_t return_marks_ = 0;
    std::uint64_t steps_ = 0;
    bool halted_ = false;
    Outcome outcome_;
    const EventSink* sink_ = nullptr;
};

struct RunResult {
    Outcome outcome;
    std::vector<TraceEvent> trace;
};

/// Runs from the initial state of main with every variable at its default,
/// overridden by `initial`.
RunResult run(const Cinnamon& c, const std::vector<std::pair<std::string, Value>>& initial,
              const RunOptions& options = {});

/// Same, streaming events to `sink` instead of collecting them.
Outcome run(const Cinnamon& c, const std::vector<std::pair<std::string, Value>>& initial,
            const RunOptions& options, const EventSink& sink);

struct ComputeResult {
    std::optional<Nat> value; // empty: undefined
    OutcomeKind cause = OutcomeKind::Success;
    std::string message;

    bool defined() const { return value.has_value(); }
};

/// f^(j): arguments fill x_1 .. x_min(j, n-1), x_0 is read back on success.
ComputeResult compute(const Cinnamon& c, const std::vector<Nat>& args, const RunOptions& options = {});
ComputeResult compute(const std::shared_ptr<const Program>& program, const std::vector<Nat>& args,
                      const RunOptions& options = {}, const EventSink& sink = {});

} // namespace cinnamon
