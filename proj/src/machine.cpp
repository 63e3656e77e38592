#include "kernel.hpp"

#include <array>
#include <cassert>

namespace cinnamon {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

std::array<Value*, 3> Machine::resolve(const Program::Item& item) {
    std::array<Value*, 3> ptrs{};
    for (std::size_t i = 0; i < item.operands.size(); ++i) {
        const auto& op = item.operands[i];
        if (op.slot < 0) {
            literals_[i] = op.literal;
            ptrs[i] = &literals_[i];
        } else {
            ptrs[i] = &env_.at(static_cast<std::size_t>(op.slot));
        }
    }
    return ptrs;
}

Machine::Machine(std::shared_ptr<const Program> program, Environment initial, RunOptions options)
    : program_(std::move(program)), options_(options), env_(std::move(initial)) {
    if (env_.size() != program_->variables().size())
        throw std::invalid_argument("initial environment does not match the program's variables");
    env_.forw = true;
    env_.failure = false;
    current_ = program_->main();
    state_ = {NodeRef::Kind::Ordinary, program_->subnets()[static_cast<std::size_t>(current_)].init};
    remaining_ = 0;
}

const std::string& Machine::current_subnet() const {
    return program_->subnets()[static_cast<std::size_t>(current_)].name;
}

std::string Machine::state() const { return program_->target_name(state_); }

std::size_t Machine::out_size() const {
    if (state_.kind != NodeRef::Kind::Ordinary) return 0;
    return program_->states()[static_cast<std::size_t>(state_.state)].out.size();
}

std::vector<std::string> Machine::remaining() const {
    std::vector<std::string> ids;
    if (state_.kind != NodeRef::Kind::Ordinary) return ids;
    const auto& out = program_->states()[static_cast<std::size_t>(state_.state)].out;
    for (std::size_t i = remaining_; i < out.size(); ++i)
        ids.push_back(program_->arrows()[static_cast<std::size_t>(out[i])].id);
    return ids;
}

void Machine::push(ArrStEntry e) {
    if (kind_of(e) == ArrStKind::CallSep) ++separators_;
    if (kind_of(e) == ArrStKind::RetMark) ++return_marks_;
    arr_.push_back(std::move(e));
}

ArrStEntry Machine::pop() {
    ArrStEntry e = std::move(arr_.back());
    arr_.pop_back();
    if (kind_of(e) == ArrStKind::CallSep) --separators_;
    if (kind_of(e) == ArrStKind::RetMark) --return_marks_;
    return e;
}

ValueList Machine::read(const std::vector<int>& slots) const {
    ValueList out;
    out.reserve(slots.size());
    for (int s : slots) out.push_back(env_.at(static_cast<std::size_t>(s)));
    return out;
}

void Machine::write(std::size_t slot, Value v, SlotValues* prior) {
    if (prior) prior->emplace_back(slot, std::move(env_.at(slot)));
    env_.at(slot) = std::move(v);
}

void Machine::emit_event(EventKind kind, std::optional<int> arrow, const Program::Target& from,
                         std::optional<Program::Target> to, const SlotValues& prior) {
    TraceEvent e;
    e.step = steps_ + 1;
    e.forward = env_.forw;
    e.kind = kind;
    e.subnet = current_subnet();
    if (arrow) e.arrow = program_->arrows()[static_cast<std::size_t>(*arrow)].id;
    e.from = program_->target_name(from);
    if (to) e.to = program_->target_name(*to);
    const auto& names = program_->variables();
    for (const auto& [slot, old] : prior) e.writes.push_back({names[slot], old, env_.at(slot)});
    (*sink_)(e);
}

void Machine::halt(OutcomeKind kind) {
    halted_ = true;
    outcome_.kind = kind;
    outcome_.env = env_;
}

std::vector<TraceEvent> Machine::step() {
    std::vector<TraceEvent> events;
    step([&](const TraceEvent& e) { events.push_back(e); });
    return events;
}

void Machine::step(const EventSink& sink) {
    if (halted_) throw std::logic_error("step on a halted machine");
    sink_ = &sink;
    advance();
    sink_ = nullptr;
}

const Outcome& Machine::run(const EventSink& sink) {
    sink_ = &sink;
    while (!halted_) advance();
    sink_ = nullptr;
    return outcome_;
}

inline void Machine::advance() {
    try {
        if (env_.forw)
            forward_step();
        else
            backward_step();
    } catch (const PrimitiveError& e) {
        outcome_.error = e.kind();
        outcome_.message = e.what();
        outcome_.location = current_subnet() + ":" + state();
        emit(EventKind::RuntimeError, std::nullopt, state_, std::nullopt);
        halt(OutcomeKind::RuntimeError);
    }
    ++steps_;
    if (!halted_ && steps_ >= options_.step_limit) {
        --steps_; // the event belongs to the step just taken
        emit(EventKind::HaltLimit, std::nullopt, state_, std::nullopt);
        ++steps_;
        halt(OutcomeKind::StepLimit);
    }
    if (options_.check_invariants) check_invariants();
}

void Machine::forward_step() {
    const auto& out = program_->states()[static_cast<std::size_t>(state_.state)].out;
    if (remaining_ == out.size()) { // F1
        env_.forw = false;
        return;
    }
    const int a = out[remaining_];
    const auto rest = static_cast<std::uint32_t>(remaining_ + 1);
    const auto& arrow = program_->arrows()[static_cast<std::size_t>(a)];
    const Program::Target from = state_;
    emit(EventKind::TryArrow, a, from, arrow.target);

    const auto& item = arrow.item;
    switch (item.kind) {
    case Program::Item::Kind::Lambda:
        push_rec(a, rest);
        enter(arrow.target);
        return;

    case Program::Item::Kind::Prim: {
        const auto ptrs = resolve(item);
        const bool journal = options_.undo_mode == UndoMode::Journal && !is_test(item.prim);
        const bool record = journal || listening();
        detail::OperandWrites writes;
        env_.failure = detail::forward(item.prim, ptrs.data(), record ? &writes : nullptr);
        SlotValues prior;
        if (record) {
            prior.reserve(writes.size());
            for (auto& [i, old] : writes)
                prior.emplace_back(static_cast<std::size_t>(item.operands[i].slot), std::move(old));
        }

        if (journal)
            push(std::make_unique<Journal>(Journal{a, rest, prior}));
        else
            push_rec(a, rest);

        if (env_.failure) {
            emit(EventKind::PrimFail, a, from, std::nullopt, prior);
            env_.failure = false;
            env_.forw = false;
            remaining_ = out.size(); // the record on top is undone by the next backward step
            return;
        }
        emit(EventKind::PrimFwd, a, from, arrow.target, prior);
        enter(arrow.target);
        return;
    }

    case Program::Item::Kind::Call: {
        const auto& callee = program_->subnets()[static_cast<std::size_t>(item.callee)];
        boost::container::small_vector<Value, 4> actual_values;
        for (const auto& act : item.actuals)
            actual_values.push_back(act.slot < 0 ? act.literal : env_.at(static_cast<std::size_t>(act.slot)));

        push_rec(a, rest);
        push(std::make_unique<CallSep>(CallSep{a, item.callee, read(callee.formals)}));
        const auto& caller = program_->subnets()[static_cast<std::size_t>(current_)];
        // only a callee that can reach the caller again may change the caller's formals
        frames_.push_back(Frame{arrow.target, rest, current_,
                                program_->reaches(item.callee, current_) ? read(caller.formals) : ValueList{},
                                a});

        // the CallSep snapshot is what undoes the binding; these records only feed the trace
        SlotValues prior;
        for (std::size_t i = 0; i < callee.formals.size(); ++i)
            write(static_cast<std::size_t>(callee.formals[i]), std::move(actual_values[i]),
                  listening() ? &prior : nullptr);
        current_ = item.callee;
        state_ = {NodeRef::Kind::Ordinary, callee.init};
        remaining_ = 0;
        emit(EventKind::Call, a, from, state_, prior);
        return;
    }
    }
}

void Machine::enter(const Program::Target& target) {
    switch (target.kind) {
    case NodeRef::Kind::Ordinary:
        state_ = target;
        remaining_ = 0;
        return;
    case NodeRef::Kind::Finish:
        state_ = target;
        remaining_ = 0;
        emit(EventKind::HaltSuccess, std::nullopt, target, std::nullopt);
        halt(OutcomeKind::Success);
        return;
    case NodeRef::Kind::Return:
        state_ = target;
        remaining_ = 0;
        do_return();
        return;
    }
}

void Machine::do_return() {
    if (frames_.empty())
        throw PrimitiveError(RuntimeErrorKind::TopLevelReturn, "RETURN reached in " + current_subnet() +
                                                                   " with no subnet call to return from");
    Frame frame = std::move(frames_.back());
    frames_.pop_back();
    const int callee = current_;
    const auto& formals = program_->subnets()[static_cast<std::size_t>(callee)].formals;
    const auto& caller = program_->subnets()[static_cast<std::size_t>(frame.caller)];
    const auto& call = program_->arrows()[static_cast<std::size_t>(frame.call_arrow)].item;

    // Formal values are read first: under direct recursion the caller's formals
    // are the same variables and get restored below.
    boost::container::small_vector<Value, 4> results;
    for (int slot : formals) results.push_back(env_.at(static_cast<std::size_t>(slot)));
    SlotValues prior;
    prior.reserve(caller.formals.size() + call.actuals.size());
    for (std::size_t i = 0; i < frame.caller_param_snapshot.size(); ++i) {
        const auto slot = static_cast<std::size_t>(caller.formals[i]);
        if (!(env_.at(slot) == frame.caller_param_snapshot[i]))
            write(slot, frame.caller_param_snapshot[i], &prior);
    }
    for (std::size_t i = 0; i < call.actuals.size(); ++i)
        if (call.actuals[i].slot >= 0)
            write(static_cast<std::size_t>(call.actuals[i].slot), std::move(results[i]), &prior);

    const Program::Target back = frame.return_state;
    const int caller_id = frame.caller;
    push(std::make_unique<RetMark>(RetMark{std::move(frame), callee, std::move(prior)}));
    emit(EventKind::Return, std::nullopt, state_, back, std::get<std::unique_ptr<RetMark>>(arr_.back())->undo);
    current_ = caller_id; // the event above is reported in the callee
    enter(back);
}

void Machine::backward_step() {
    if (remaining_ < out_size()) { // B1
        env_.forw = true;
        return;
    }
    if (arr_.empty()) { // B2
        const auto& main = program_->subnets()[static_cast<std::size_t>(program_->main())];
        if (current_ != program_->main() || state_.kind != NodeRef::Kind::Ordinary || state_.state != main.init)
            throw InvariantViolation("empty arrow stack outside the initial state of main");
        emit(EventKind::HaltFailure, std::nullopt, state_, std::nullopt);
        halt(OutcomeKind::Failure);
        return;
    }

    ArrStEntry entry = pop();
    std::visit(
        Overloaded{
            [&](ArrowRec& rec) {
                const auto& arrow = program_->arrows()[static_cast<std::size_t>(rec.arrow)];
                if (arrow.item.kind == Program::Item::Kind::Call)
                    throw InvariantViolation("call record " + arrow.id + " without its separator");
                SlotValues prior;
                if (arrow.item.kind == Program::Item::Kind::Prim && options_.undo_mode == UndoMode::Paper) {
                    const auto ptrs = resolve(arrow.item);
                    detail::OperandWrites writes;
                    try {
                        detail::backward(arrow.item.prim, ptrs.data(), listening() ? &writes : nullptr);
                    } catch (const PrimitiveError&) {
                        state_ = {NodeRef::Kind::Ordinary, arrow.source};
                        throw;
                    }
                    for (auto& [i, old] : writes)
                        prior.emplace_back(static_cast<std::size_t>(arrow.item.operands[i].slot), std::move(old));
                }
                const Program::Target from = state_;
                state_ = {NodeRef::Kind::Ordinary, arrow.source};
                remaining_ = rec.remaining;
                emit(EventKind::PrimBwd, rec.arrow, from, state_, prior);
            },
            [&](std::unique_ptr<Journal>& boxed) {
                const Journal& j = *boxed;
                const auto& arrow = program_->arrows()[static_cast<std::size_t>(j.arrow)];
                SlotValues prior;
                for (auto it = j.writes.rbegin(); it != j.writes.rend(); ++it) write(it->first, it->second, &prior);
                const Program::Target from = state_;
                state_ = {NodeRef::Kind::Ordinary, arrow.source};
                remaining_ = j.remaining;
                emit(EventKind::PrimBwd, j.arrow, from, state_, prior);
            },
            [&](std::unique_ptr<CallSep>& boxed) {
                const CallSep& sep = *boxed;
                const auto& callee = program_->subnets()[static_cast<std::size_t>(sep.callee)];
                SlotValues prior;
                for (std::size_t i = 0; i < callee.formals.size(); ++i)
                    write(static_cast<std::size_t>(callee.formals[i]), sep.prebind_formal_snapshot[i], &prior);
                if (frames_.empty()) throw InvariantViolation("call separator without a frame");
                const int caller = frames_.back().caller;
                frames_.pop_back();
                if (arr_.empty() || !std::holds_alternative<ArrowRec>(arr_.back()) ||
                    std::get<ArrowRec>(arr_.back()).arrow != sep.call_arrow)
                    throw InvariantViolation("call separator not preceded by its call arrow");
                const ArrowRec rec = std::get<ArrowRec>(pop());
                const Program::Target from = state_;
                current_ = caller;
                state_ = {NodeRef::Kind::Ordinary,
                          program_->arrows()[static_cast<std::size_t>(rec.arrow)].source};
                remaining_ = rec.remaining;
                emit(EventKind::UncallBwd, rec.arrow, from, state_, prior);
            },
            [&](std::unique_ptr<RetMark>& boxed) {
                RetMark& mark = *boxed;
                SlotValues prior;
                for (auto it = mark.undo.rbegin(); it != mark.undo.rend(); ++it) write(it->first, it->second, &prior);
                const Program::Target from = state_;
                frames_.push_back(std::move(mark.frame));
                current_ = mark.callee;
                state_ = {NodeRef::Kind::Return, -1};
                remaining_ = 0;
                emit(EventKind::ReenterBwd, std::nullopt, from, state_, prior);
            },
        },
        entry);
}

void Machine::check_invariants() const {
    bool ok = frames_.size() + return_marks_ == separators_ && !env_.failure;
    if (state_.kind == NodeRef::Kind::Ordinary) {
        const auto& st = program_->states()[static_cast<std::size_t>(state_.state)];
        ok = ok && st.subnet == current_ && remaining_ <= st.out.size();
    } else {
        ok = ok && remaining_ == 0;
    }
    if (halted_ && outcome_.kind == OutcomeKind::Failure && (!arr_.empty() || remaining_ < out_size())) ok = false;
    if (!ok) report_invariant_violation();
}

void Machine::report_invariant_violation() const {
    if (frames_.size() + return_marks_ != separators_)
        throw InvariantViolation("stack discipline: |subnet_ST| = " + std::to_string(frames_.size()) +
                                 ", #CallSep = " + std::to_string(separators_) +
                                 ", #RetMark = " + std::to_string(return_marks_));
    if (state_.kind == NodeRef::Kind::Ordinary) {
        const auto& st = program_->states()[static_cast<std::size_t>(state_.state)];
        if (st.subnet != current_)
            throw InvariantViolation("state " + st.id + " is not in the current subnet " + current_subnet());
        if (remaining_ > st.out.size()) throw InvariantViolation("REMAINING is not a suffix of out(STATE)");
    } else if (remaining_ != 0) {
        throw InvariantViolation("system state with remaining arrows");
    }
    if (env_.failure) throw InvariantViolation("FAILURE set at a step boundary");
    throw InvariantViolation("Failure with a nonempty path");
}

} // namespace cinnamon
