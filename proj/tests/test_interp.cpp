#include "doctest.h"
#include "support.hpp"

#include "cinnamon/fuzz.hpp"

#include <map>

using namespace cinnamon;

namespace {

Environment env_of(std::initializer_list<std::pair<const char*, Value>> values, Mode mode = Mode::Nat) {
    std::vector<std::string> names;
    for (const auto& [n, _] : values) names.emplace_back(n);
    Environment e(names, mode);
    for (const auto& [n, v] : values) e.set(n, v);
    return e;
}

Primitive prim(PrimKind kind, std::initializer_list<const char*> vars) {
    Primitive p{kind, {}};
    for (const char* v : vars) p.operands.push_back(Operand::var(v));
    return p;
}

Cinnamon parse_ok(const std::string& text) {
    auto r = parse(text);
    REQUIRE_MESSAGE(r.ok(), (r.diagnostics.empty() ? "" : r.diagnostics[0].to_string()));
    return *r.cinnamon;
}

std::optional<Nat> f(const Cinnamon& c, std::vector<Nat> args) { return compute(c, args).value; }

RunOptions journal() {
    RunOptions o;
    o.undo_mode = UndoMode::Journal;
    return o;
}

// Every machine the property tests drive: fixtures with sample inputs, and
// random cinnamons.
struct Scenario {
    std::string name;
    Cinnamon c;
    std::vector<std::pair<std::string, Value>> initial;
};

std::vector<Scenario> scenarios(bool inc_only) {
    std::vector<Scenario> out;
    if (!inc_only) {
        out.push_back({"subtract", testing::load_fixture("subtract.cin"), {{"x", Value(7)}, {"y", Value(3)}}});
        out.push_back({"compose", testing::load_fixture("compose.cin"), {{"x", Value(2)}, {"y", Value(3)}}});
        out.push_back({"compose-eq", testing::load_fixture("compose.cin"), {{"x", Value(2)}, {"y", Value(2)}}});
        out.push_back({"recognizer", testing::load_fixture("recognizer.cin"), {{"input", Value("a+b*c")}}});
        out.push_back({"recognizer-bad", testing::load_fixture("recognizer.cin"), {{"input", Value("a**b")}}});
        out.push_back({"systems", testing::load_fixture("systems.cin"), {}});
    }
    out.push_back({"backtrack", testing::load_fixture("backtrack.cin"), {}});
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        RandomCinnamonOptions o;
        o.inc_only = inc_only;
        if (!inc_only && seed % 3 == 0) o.mode = Mode::Str;
        out.push_back({"random " + std::to_string(seed), random_cinnamon(seed, o), {}});
    }
    return out;
}

Machine start(const Scenario& s, const RunOptions& options) {
    auto program = Program::load(s.c);
    Environment env = program->initial_environment();
    for (const auto& [name, value] : s.initial) env.set(name, value);
    return Machine(program, env, options);
}

std::vector<std::string> kinds(const std::vector<TraceEvent>& trace) {
    std::vector<std::string> out;
    for (const auto& e : trace) out.emplace_back(to_string(e.kind));
    return out;
}

} // namespace

TEST_CASE("forward primitives") {
    CHECK(exec_forward_prim(clear("x"), env_of({{"x", 5}})).get("x") == Value(0));
    CHECK(exec_forward_prim(inc("x"), env_of({{"x", 0}})).get("x") == Value(1));
    CHECK(exec_forward_prim(copy("x", "y"), env_of({{"x", 9}, {"y", 2}})).get("y") == Value(9));

    const auto equal = exec_forward_prim(if_non_eq("x", "y"), env_of({{"x", 3}, {"y", 3}}));
    CHECK(equal.failure);
    CHECK(equal.same_values(env_of({{"x", 3}, {"y", 3}})));
    CHECK_FALSE(exec_forward_prim(if_non_eq("x", "y"), env_of({{"x", 3}, {"y", 4}})).failure);

    const auto s = env_of({{"l", "a+b"}, {"h", ""}, {"t", ""}}, Mode::Str);
    const auto split = exec_forward_prim(prim(PrimKind::Sep, {"l", "h", "t"}), s);
    CHECK(split.get("h") == Value("a"));
    CHECK(split.get("t") == Value("+b"));
    CHECK(split.get("l") == Value("a+b"));
    CHECK(exec_forward_prim(prim(PrimKind::Sep, {"l", "h", "t"}), env_of({{"l", ""}, {"h", ""}, {"t", ""}}, Mode::Str))
              .failure);

    const auto joined =
        exec_forward_prim(prim(PrimKind::Cons, {"h", "t", "l"}), env_of({{"l", ""}, {"h", "x"}, {"t", "yz"}}, Mode::Str));
    CHECK(joined.get("l") == Value("xyz"));
    try {
        exec_forward_prim(prim(PrimKind::Cons, {"h", "t", "l"}), env_of({{"l", ""}, {"h", "xy"}, {"t", ""}}, Mode::Str));
        FAIL("expected an error");
    } catch (const PrimitiveError& e) {
        CHECK(e.kind() == RuntimeErrorKind::ConsNonSymbolHead);
    }

    CHECK(exec_forward_prim(prim(PrimKind::IfEmpty, {"l"}), env_of({{"l", "a"}}, Mode::Str)).failure);
    CHECK_FALSE(exec_forward_prim(prim(PrimKind::IfEmpty, {"l"}), env_of({{"l", ""}}, Mode::Str)).failure);
    Primitive is_a{PrimKind::IfEq, {Operand::var("h"), Operand::symbol('a')}};
    CHECK_FALSE(exec_forward_prim(is_a, env_of({{"h", "a"}}, Mode::Str)).failure);
    CHECK(exec_forward_prim(is_a, env_of({{"h", "b"}}, Mode::Str)).failure);
}

TEST_CASE("backward primitives") {
    auto backward = [](Environment e) {
        e.forw = false;
        return e;
    };
    CHECK(exec_backward_prim(inc("x"), backward(env_of({{"x", 4}}))).get("x") == Value(3));
    const auto same = backward(env_of({{"x", 3}, {"y", 3}}));
    const auto after = exec_backward_prim(if_non_eq("x", "y"), same);
    CHECK(after == same);
    CHECK_FALSE(after.failure);
    CHECK(exec_backward_prim(clear("x"), backward(env_of({{"x", 7}}))).get("x") == Value(7));
    CHECK(exec_backward_prim(copy("x", "y"), backward(env_of({{"x", 1}, {"y", 2}}))).get("y") == Value(2));
    try {
        exec_backward_prim(inc("x"), backward(env_of({{"x", 0}})));
        FAIL("expected an error");
    } catch (const PrimitiveError& e) {
        CHECK(e.kind() == RuntimeErrorKind::IrreversibleHistory);
    }
}

TEST_CASE("destroyed history makes backward inc at zero a runtime error") {
    const auto c = parse_ok(R"(cinnamon H mode nat
main subnet M(x, y) {
  init s0
  s0 -> s1 : inc(x)
  s1 -> s2 : clear(x)
  s2 -> FINISH : if nonEq(x, y)
})");
    const auto o = run(c, {}).outcome;
    CHECK(o.kind == OutcomeKind::RuntimeError);
    CHECK(o.error == RuntimeErrorKind::IrreversibleHistory);
    // journal mode restores the recorded value and the run fails cleanly
    CHECK(run(c, {}, journal()).outcome.kind == OutcomeKind::Failure);
}

TEST_CASE("a state without outgoing arrows only switches to backward mode") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z) {\n  init s0\n}");
    Machine m(Program::load(c), Program::load(c)->initial_environment());
    const Environment before = m.env();
    const auto events = m.step();
    CHECK(events.empty());
    CHECK_FALSE(m.forward());
    CHECK(m.env().same_values(before));
    CHECK(m.state() == "s0");
    CHECK(m.arr_stack().empty());
    CHECK_FALSE(m.halted());

    // nothing left to undo: the run halts with Failure
    const auto last = m.step();
    REQUIRE(m.halted());
    CHECK(m.outcome().kind == OutcomeKind::Failure);
    REQUIRE(last.size() == 1);
    CHECK(last[0].kind == EventKind::HaltFailure);
}

TEST_CASE("an empty arrow into FINISH succeeds in one step") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z) {\n  init s0\n  s0 -> FINISH :\n}");
    const auto r = run(c, {});
    CHECK(r.outcome.success());
    CHECK(r.trace.back().kind == EventKind::HaltSuccess);
    CHECK(r.trace.back().step == 1);
}

TEST_CASE("RETURN inside main at top level is a runtime error") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z) {\n  init s0\n  s0 -> RETURN : inc(z)\n}");
    const auto o = run(c, {}).outcome;
    CHECK(o.kind == OutcomeKind::RuntimeError);
    CHECK(o.error == RuntimeErrorKind::TopLevelReturn);
}

TEST_CASE("step limit halts the run") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z) {\n  init s0\n  s0 -> s0 : inc(z)\n}");
    RunOptions o;
    o.step_limit = 50;
    const auto r = run(c, {}, o);
    CHECK(r.outcome.kind == OutcomeKind::StepLimit);
    CHECK(r.trace.back().kind == EventKind::HaltLimit);
    CHECK(r.trace.back().step == 50);
}

TEST_CASE("initial values for undeclared variables are rejected") {
    CHECK_THROWS_AS(run(testing::load_fixture("subtract.cin"), {{"nope", Value(1)}}), std::invalid_argument);
}

TEST_CASE("ill-formed cinnamons are not loaded") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z) {\n  init s0\n  s0 -> FINISH : call Nope()\n}");
    CHECK_THROWS_AS(Program::load(c), ValidationError);
}

TEST_CASE("subtraction computes the worked values") {
    const auto c = testing::load_fixture("subtract.cin");
    CHECK(f(c, {7, 3}) == Nat(4));
    CHECK(f(c, {7, 7}) == Nat(0));
    CHECK(f(c, {7, 0}) == Nat(7));
    CHECK(f(c, {3, 7}) == Nat(0));
    CHECK(f(c, {7}) == Nat(7));
    CHECK(f(c, {}) == Nat(0));
    CHECK(f(c, {7, 3, 8}) == Nat(4));
    CHECK(f(c, {7, 3, 8, 2}) == Nat(4));
    const auto r = run(c, {{"x", Value(7)}, {"y", Value(3)}});
    REQUIRE(r.outcome.success());
    CHECK(r.outcome.env.get("z") == Value(4));
}

TEST_CASE("extra arguments never change the result") {
    const auto c = testing::load_fixture("subtract.cin");
    for (int x = 0; x <= 9; ++x)
        for (int y = 0; y <= 9; ++y) {
            const auto base = f(c, {x, y});
            REQUIRE(base == Nat(std::max(x - y, 0)));
            for (int extra = 0; extra <= 9; extra += 3) {
                CHECK(f(c, {x, y, extra}) == base);
                CHECK(f(c, {x, y, extra, 9 - extra}) == base);
            }
        }
}

TEST_CASE("failure leaves the function undefined") {
    const auto c = parse_ok("cinnamon S mode nat\nmain subnet M(z, x) {\n  init s0\n  s0 -> FINISH : if nonEq(z, x)\n}");
    const auto r = compute(c, {0});
    CHECK_FALSE(r.defined());
    CHECK(r.cause == OutcomeKind::Failure);
    CHECK(compute(c, {1}).value == Nat(0));
}

TEST_CASE("composition computes x + y when x differs from y") {
    const auto c = testing::load_fixture("compose.cin");
    auto oracle = [](int x, int y) { return x != y ? x + y : 0; };
    CHECK(f(c, {2, 3}) == Nat(5));
    CHECK(f(c, {2, 2}) == Nat(0));
    CHECK(f(c, {0, 4}) == Nat(4));
    for (int x = 0; x <= 6; ++x)
        for (int y = 0; y <= 6; ++y) CHECK(f(c, {x, y}) == Nat(oracle(x, y)));
}

TEST_CASE("recognizer agrees with the grammar") {
    const auto language = testing::expression_language(7);
    CHECK(language.size() == 777);
    CHECK(language.count("a+b*c") == 1);
    for (const char* fixture : {"recognizer.cin", "recognizer_expanded.cin"}) {
        CAPTURE(fixture);
        const auto c = testing::load_fixture(fixture);
        const auto program = Program::load(c);
        auto accepts = [&](const std::string& s) {
            Environment env = program->initial_environment();
            env.set("input", Value(s));
            Machine m(program, env, journal());
            const auto& o = m.run();
            REQUIRE((o.kind == OutcomeKind::Success || o.kind == OutcomeKind::Failure));
            return o.success();
        };
        for (const auto& s : language) {
            CAPTURE(s);
            CHECK(accepts(s));
        }
        for (const char* s : {"", "+", "a+", "ab", "a**b"}) {
            CAPTURE(s);
            CHECK_FALSE(accepts(s));
        }
        // every string up to length 5 over the alphabet
        const std::string alphabet = "abc+*";
        std::vector<std::string> strings = {""};
        for (std::size_t len = 1; len <= 5; ++len) {
            std::vector<std::string> next;
            for (const auto& s : strings)
                if (s.size() == len - 1)
                    for (char ch : alphabet) next.push_back(s + ch);
            strings.insert(strings.end(), next.begin(), next.end());
        }
        for (const auto& s : strings) {
            CAPTURE(s);
            CHECK(accepts(s) == (language.count(s) == 1));
        }
    }
}

TEST_CASE("technical example trace matches the golden file") {
    const auto r = run(testing::load_fixture("backtrack.cin"), {});
    REQUIRE(r.outcome.success());
    std::string text;
    for (const auto& e : r.trace) text += to_json(e) + "\n";
    CHECK(text == testing::slurp(testing::golden_path("backtrack.trace.jsonl")));

    std::vector<std::string> steps;
    for (const auto& line : testing::projection(r.trace))
        if (line.rfind("try_arrow", 0) != 0) steps.push_back(line);
    const std::vector<std::string> narrated = {
        "prim_fwd 1.1",     // A
        "prim_fwd 2.1",     // if C
        "call 3.1",         // call Beta
        "prim_fwd 10.1",    // I, then stuck at 11
        "prim_bwd 10.1",    // I backwards
        "prim_fwd 10.2",    // P
        "prim_fwd 12.1",    // if U
        "return",           // back to Alpha
        "prim_fail 4.1",    // if D fails
        "prim_bwd 4.1",     // and runs backwards
        "reenter_bwd",      // into Beta
        "prim_bwd 12.1",    // if U backwards
        "prim_bwd 10.2",    // P backwards
        "prim_fwd 10.3",    // S
        "prim_fwd 13.1",    // T
        "prim_fwd 12.1",    // if U
        "return",           // back to Alpha
        "prim_fwd 4.1",     // if D holds
        "halt_success",     // FINISH
    };
    CHECK(steps == narrated);
    CHECK(r.outcome.env.get("a") == Value(1));
    CHECK(r.outcome.env.get("d") == Value(1));
    CHECK(r.outcome.env.get("k") == Value(0));
}

TEST_CASE("traces are deterministic") {
    for (const auto& s : scenarios(false)) {
        CAPTURE(s.name);
        RunOptions o;
        o.step_limit = 5000;
        o.undo_mode = s.c.mode == Mode::Str ? UndoMode::Journal : UndoMode::Paper;
        CHECK(run(s.c, s.initial, o).trace == run(s.c, s.initial, o).trace);
    }
}

TEST_CASE("stack discipline holds on every step") {
    for (const auto mode : {UndoMode::Paper, UndoMode::Journal}) {
        for (const auto& s : scenarios(false)) {
            CAPTURE(s.name);
            RunOptions o;
            o.step_limit = 5000;
            o.undo_mode = mode;
            o.check_invariants = false; // counted independently below
            Machine m = start(s, o);
            std::size_t violations = 0;
            while (!m.halted()) {
                m.step([](const TraceEvent&) {});
                std::size_t seps = 0, marks = 0;
                for (const auto& e : m.arr_stack()) {
                    if (kind_of(e) == ArrStKind::CallSep) ++seps;
                    if (kind_of(e) == ArrStKind::RetMark) ++marks;
                    if (mode == UndoMode::Paper && kind_of(e) == ArrStKind::Journal) ++violations;
                }
                if (m.subnet_stack().size() + marks != seps) ++violations;
                if (m.call_separators() != seps || m.return_marks() != marks) ++violations;
            }
            CHECK(violations == 0);
            CHECK_NOTHROW(m.check_invariants());
        }
    }
}

TEST_CASE("halting states") {
    for (const auto& s : scenarios(false)) {
        CAPTURE(s.name);
        RunOptions o;
        o.step_limit = 5000;
        o.undo_mode = UndoMode::Journal;
        Machine m = start(s, o);
        std::vector<TraceEvent> trace;
        m.run([&](const TraceEvent& e) { trace.push_back(e); });
        REQUIRE_FALSE(trace.empty());
        CHECK(m.outcome().success() == (trace.back().kind == EventKind::HaltSuccess));
        if (m.outcome().kind == OutcomeKind::Failure) {
            CHECK(m.state() == s.c.main_subnet().init);
            CHECK(m.current_subnet() == s.c.main);
            CHECK(m.arr_stack().empty());
            CHECK(m.remaining().empty());
        }
    }
}

TEST_CASE("a failed test is undone by the very next event") {
    for (const auto& s : scenarios(false)) {
        CAPTURE(s.name);
        RunOptions o;
        o.step_limit = 5000;
        o.undo_mode = UndoMode::Journal;
        const auto trace = run(s.c, s.initial, o).trace;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            if (!trace[i].forward) CHECK(trace[i].kind != EventKind::PrimFail);
            if (trace[i].kind != EventKind::PrimFail) continue;
            REQUIRE(i + 1 < trace.size());
            if (trace[i + 1].kind == EventKind::HaltLimit) continue;
            CHECK(trace[i + 1].kind == EventKind::PrimBwd);
            CHECK(trace[i + 1].arrow == trace[i].arrow);
        }
    }
}

TEST_CASE("paper and journal undo agree on inc-only programs") {
    for (const auto& s : scenarios(true)) {
        CAPTURE(s.name);
        RunOptions paper;
        paper.step_limit = 5000;
        RunOptions logged = paper;
        logged.undo_mode = UndoMode::Journal;
        const auto a = run(s.c, s.initial, paper);
        const auto b = run(s.c, s.initial, logged);
        REQUIRE(a.outcome.kind == b.outcome.kind);
        CHECK(a.outcome.env.same_values(b.outcome.env));
        CHECK(kinds(a.trace) == kinds(b.trace));
    }
}

TEST_CASE("inc is locally reversible in paper mode") {
    std::size_t checked = 0;
    for (const auto& s : scenarios(true)) {
        CAPTURE(s.name);
        RunOptions o;
        o.step_limit = 5000;
        Machine m = start(s, o);
        const Program& program = m.program();
        // value of the incremented variable before the forward step, keyed by
        // the arr_ST depth its record occupies
        std::map<std::size_t, std::pair<std::string, Value>> before;
        while (!m.halted()) {
            const std::size_t depth = m.arr_stack().size();
            const Environment env = m.env();
            std::vector<TraceEvent> events;
            m.step([&](const TraceEvent& e) { events.push_back(e); });
            for (const auto& e : events) {
                if (!e.arrow || (e.kind != EventKind::PrimFwd && e.kind != EventKind::PrimBwd)) continue;
                const Program::ArrowInfo* info = nullptr;
                for (const auto& a : program.arrows())
                    if (a.id == *e.arrow && program.subnets()[a.subnet].name == e.subnet) info = &a;
                REQUIRE(info);
                if (info->item.kind != Program::Item::Kind::Prim || info->item.prim != PrimKind::Inc) continue;
                const std::string var = program.variables()[info->item.operands[0].slot];
                if (e.kind == EventKind::PrimFwd) {
                    before[depth] = {var, env.get(var)};
                } else {
                    const auto it = before.find(depth - 1);
                    REQUIRE(it != before.end());
                    CHECK(it->second.first == var);
                    CHECK(m.env().get(var) == it->second.second);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("journal mode restores the environment after backing out of a call") {
    std::size_t checked = 0;
    auto cases = scenarios(false);
    for (std::uint64_t seed = 1000; seed < 3000; ++seed) {
        RandomCinnamonOptions o;
        o.max_subnets = 3;
        o.mode = seed % 2 ? Mode::Str : Mode::Nat;
        cases.push_back({"random " + std::to_string(seed), random_cinnamon(seed, o), {}});
    }
    for (const auto& s : cases) {
        CAPTURE(s.name);
        RunOptions o;
        o.step_limit = 5000;
        o.undo_mode = UndoMode::Journal;
        Machine m = start(s, o);
        std::map<std::size_t, Environment> at_call; // keyed by arr_ST depth of the call record
        while (!m.halted()) {
            const std::size_t depth = m.arr_stack().size();
            const Environment env = m.env();
            std::vector<TraceEvent> events;
            m.step([&](const TraceEvent& e) { events.push_back(e); });
            for (const auto& e : events) {
                if (e.kind == EventKind::Call) at_call[depth] = env;
                if (e.kind == EventKind::UncallBwd) {
                    const auto it = at_call.find(m.arr_stack().size());
                    REQUIRE(it != at_call.end());
                    CHECK(m.env().same_values(it->second));
                    ++checked;
                }
            }
        }
    }
    MESSAGE("calls backed out: ", checked);
    CHECK(checked > 20);
}

TEST_CASE("the recognizer accepts a+b*c in journal mode") {
    const auto c = testing::load_fixture("recognizer.cin");
    CHECK(run(c, {{"input", Value("a+b*c")}}, journal()).outcome.success());
}
