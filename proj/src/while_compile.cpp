#include "cinnamon/while_lang.hpp"

namespace cinnamon::whilelang {

namespace {

const char* const kSubtr = "subtr";

Arrow arrow(std::string from, NodeRef to, std::vector<LabelItem> label) {
    Arrow a;
    a.source = std::move(from);
    a.target = std::move(to);
    a.label = std::move(label);
    return a;
}

Call call_subtr(const std::string& x, const std::string& y, const std::string& z) {
    return Call{kSubtr, {Actual::variable(x), Actual::variable(y), Actual::variable(z)}};
}

class Compiler {
public:
    explicit Compiler(const WhileProgram& p) : program_(p) {}

    Cinnamon run() {
        Subnet main;
        main.name = "prog";
        for (unsigned i = 0; i <= program_.max_variable(); ++i) main.formals.push_back(var(i));
        main.init = fresh_state();
        emit(program_, main.init, NodeRef::finish());
        main.locals = std::move(temps_);
        main.arrows = std::move(arrows_);
        finalize(main);

        Cinnamon c;
        c.name = "compiled";
        c.mode = Mode::Nat;
        c.main = main.name;
        c.subnets.push_back(std::move(main));
        c.subnets.push_back(build_subtr());
        return c;
    }

private:
    static std::string var(unsigned i) { return "x" + std::to_string(i); }

    std::string fresh_state() { return "q" + std::to_string(states_++); }
    std::string fresh_temp(const char* role) {
        std::string t = "_" + std::string(role) + std::to_string(temps_.size());
        temps_.push_back(t);
        return t;
    }

    void add(std::string from, NodeRef to, std::vector<LabelItem> label) {
        arrows_.push_back(arrow(std::move(from), std::move(to), std::move(label)));
    }

    // Emits a fragment entered at `entry` whose exit is `exit`. Every entry
    // state gets exactly the arrows of its own construct.
    void emit(const WhileProgram& p, const std::string& entry, const NodeRef& exit) {
        using K = WhileProgram::Kind;
        switch (p.kind) {
        case K::AssignZero: add(entry, exit, {clear(var(p.x))}); return;
        case K::AssignCopy: add(entry, exit, {copy(var(p.y), var(p.x))}); return;
        case K::AssignSucc: add(entry, exit, {copy(var(p.y), var(p.x)), inc(var(p.x))}); return;
        case K::Seq: {
            const std::string mid = fresh_state();
            emit(p.body[0], entry, NodeRef::ordinary(mid));
            emit(p.body[1], mid, exit);
            return;
        }
        case K::If: {
            // x < y iff y - x != 0
            const std::string r = fresh_temp("r"), z = fresh_temp("z");
            const std::string branch = fresh_state(), then_entry = fresh_state(), else_entry = fresh_state();
            add(entry, NodeRef::ordinary(branch), {call_subtr(var(p.y), var(p.x), r), clear(z)});
            add(branch, NodeRef::ordinary(then_entry), {if_non_eq(r, z)});
            add(branch, NodeRef::ordinary(else_entry), {});
            emit(p.body[0], then_entry, exit);
            emit(p.body[1], else_entry, exit);
            return;
        }
        case K::While: {
            const std::string r = fresh_temp("r"), z = fresh_temp("z");
            const std::string branch = fresh_state(), body_entry = fresh_state();
            add(entry, NodeRef::ordinary(branch), {call_subtr(var(p.y), var(p.x), r), clear(z)});
            add(branch, NodeRef::ordinary(body_entry), {if_non_eq(r, z)});
            add(branch, exit, {});
            emit(p.body[0], body_entry, NodeRef::ordinary(entry));
            return;
        }
        case K::For: {
            // trip count frozen into t at entry
            const std::string t = fresh_temp("t"), c = fresh_temp("c");
            const std::string loop = fresh_state(), body_entry = fresh_state();
            add(entry, NodeRef::ordinary(loop), {copy(var(p.y), t), clear(c)});
            add(loop, NodeRef::ordinary(body_entry), {if_non_eq(c, t), inc(c)});
            add(loop, exit, {});
            emit(p.body[0], body_entry, NodeRef::ordinary(loop));
            return;
        }
        }
    }

    const WhileProgram& program_;
    std::vector<Arrow> arrows_;
    std::vector<std::string> temps_;
    unsigned states_ = 0;
};

} // namespace

Subnet build_subtr() {
    Subnet s;
    s.name = kSubtr;
    s.formals = {"sub_x", "sub_y", "sub_z"};
    s.locals = {"sub_i", "sub_j"};
    s.init = "sub0";
    s.arrows = {
        // scratch is re-initialized on every entry
        arrow("sub0", NodeRef::ordinary("sub1"), {clear("sub_z"), clear("sub_i"), clear("sub_j")}),
        arrow("sub1", NodeRef::ordinary("sub2"), {if_non_eq("sub_i", "sub_x"), inc("sub_i")}),
        arrow("sub1", NodeRef::ret(), {}),
        arrow("sub2", NodeRef::ordinary("sub1"), {if_non_eq("sub_j", "sub_y"), inc("sub_j")}),
        arrow("sub2", NodeRef::ordinary("sub1"), {inc("sub_z")}),
    };
    finalize(s);
    return s;
}

Cinnamon monus_cinnamon() {
    Subnet m;
    m.name = "m";
    m.formals = {"z", "x", "y"};
    m.init = "m0";
    m.arrows = {arrow("m0", NodeRef::finish(), {call_subtr("x", "y", "z")})};
    finalize(m);

    Cinnamon c;
    c.name = "Monus";
    c.mode = Mode::Nat;
    c.main = "m";
    c.subnets = {std::move(m), build_subtr()};
    return c;
}

Cinnamon compile_while(const WhileProgram& p) { return Compiler(p).run(); }

Verdict differential_check(const WhileProgram& p, const std::vector<Nat>& inputs, std::uint64_t fuel,
                           const EventSink& sink) {
    Verdict v;
    v.program = p;
    v.inputs = inputs;
    v.oracle = eval_while(p, inputs, fuel);

    RunOptions options;
    options.step_limit = fuel * kStepsPerFuel;
    const ComputeResult r = compute(Program::load(compile_while(p)), inputs, options, sink);
    v.compiled = r.value;
    v.compiled_cause = r.cause;
    if (v.oracle && v.compiled)
        v.agree = *v.oracle == *v.compiled;
    else
        v.agree = !v.oracle && r.cause == OutcomeKind::StepLimit;
    return v;
}

} // namespace cinnamon::whilelang
