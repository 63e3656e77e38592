#include "cinnamon/fuzz.hpp"
#include "cinnamon/while_lang.hpp"

#include <random>

namespace cinnamon {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    // Plain modulo keeps sequences identical across standard libraries.
    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
    bool coin() { return below(2) == 0; }
    template <class T> const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

private:
    std::mt19937_64 engine_;
};

class CinnamonGen {
public:
    CinnamonGen(std::uint64_t seed, const RandomCinnamonOptions& o) : rng_(seed), o_(o) {}

    Cinnamon run() {
        Cinnamon c;
        c.name = "Fuzz";
        c.mode = o_.mode;
        if (o_.macros) {
            const std::size_t n = rng_.below(3);
            for (std::size_t i = 0; i < n; ++i) c.macros.push_back(macro(i));
        }
        macros_ = &c.macros;

        const std::size_t count = 1 + rng_.below(o_.max_subnets);
        for (std::size_t i = 0; i < count; ++i) {
            Subnet s;
            s.name = "n" + std::to_string(i);
            const std::size_t formals = rng_.below(3);
            for (std::size_t k = 0; k < formals; ++k) s.formals.push_back("v" + std::to_string(i) + "_" + std::to_string(k));
            const std::size_t locals = rng_.below(3);
            for (std::size_t k = 0; k < locals; ++k) s.locals.push_back("w" + std::to_string(i) + "_" + std::to_string(k));
            c.subnets.push_back(std::move(s));
        }
        c.main = c.subnets[0].name;
        for (std::size_t i = 0; i < c.subnets.size(); ++i) body(c, c.subnets[i], i == 0);
        return c;
    }

private:
    std::vector<PrimKind> kinds() const {
        if (o_.mode == Mode::Str) return {PrimKind::Clear, PrimKind::Copy, PrimKind::Sep, PrimKind::Cons, PrimKind::IfEq,
                                          PrimKind::IfEmpty};
        if (o_.inc_only) return {PrimKind::Inc, PrimKind::IfNonEq};
        return {PrimKind::Clear, PrimKind::Copy, PrimKind::Inc, PrimKind::IfNonEq};
    }

    Primitive prim(const std::vector<std::string>& vars) {
        Primitive p{rng_.pick(kinds()), {}};
        for (std::size_t i = 0; i < arity(p.kind); ++i) {
            if (p.kind == PrimKind::IfEq && i == 1 && rng_.coin())
                p.operands.push_back(Operand::symbol("ab+'\\"[rng_.below(5)]));
            else
                p.operands.push_back(Operand::var(rng_.pick(vars)));
        }
        return p;
    }

    Macro macro(std::size_t i) {
        Macro m;
        m.name = "m" + std::to_string(i);
        const std::size_t params = 1 + rng_.below(2);
        for (std::size_t k = 0; k < params; ++k) m.params.push_back("p" + std::to_string(k));
        const std::size_t items = 1 + rng_.below(2);
        for (std::size_t k = 0; k < items; ++k) m.body.emplace_back(prim(m.params));
        // may use an earlier macro, never a later one, so expansion terminates
        if (i > 0 && rng_.coin()) {
            const std::size_t inner = rng_.below(i);
            MacroUse use{"m" + std::to_string(inner), {}};
            for (std::size_t k = 0; k < macro_params_[inner]; ++k)
                use.args.push_back(Actual::variable(rng_.pick(m.params)));
            m.body.emplace_back(std::move(use));
        }
        macro_params_.push_back(m.params.size());
        return m;
    }

    Value constant() {
        if (o_.mode == Mode::Nat) return Value(Nat(rng_.below(4)));
        static const std::vector<std::string> strings = {"", "a", "ab", "+", "x\"y", "\\"};
        return Value(rng_.pick(strings));
    }

    LabelItem item(const Cinnamon& c, const Subnet& s, const std::vector<std::string>& vars) {
        const std::size_t r = rng_.below(10);
        if (r == 0 && o_.calls) {
            const Subnet& callee = rng_.pick(c.subnets);
            Call call{callee.name, {}};
            for (std::size_t k = 0; k < callee.formals.size(); ++k) {
                if (rng_.below(4) == 0) call.actuals.push_back(Actual::value(constant()));
                else call.actuals.push_back(Actual::variable(rng_.pick(vars)));
            }
            return call;
        }
        if (r == 1 && !macros_->empty()) {
            const Macro& m = rng_.pick(*macros_);
            MacroUse use{m.name, {}};
            for (std::size_t k = 0; k < m.params.size(); ++k) use.args.push_back(Actual::variable(rng_.pick(vars)));
            return use;
        }
        (void)s;
        return prim(vars);
    }

    void body(const Cinnamon& c, Subnet& s, bool is_main) {
        std::vector<std::string> vars = s.formals;
        vars.insert(vars.end(), s.locals.begin(), s.locals.end());
        const bool has_vars = !vars.empty();

        const std::size_t nstates = 1 + rng_.below(o_.max_states);
        std::vector<std::string> states;
        for (std::size_t k = 0; k < nstates; ++k) states.push_back(s.name + "s" + std::to_string(k));
        s.init = states[0];

        const std::size_t narrows = 1 + rng_.below(o_.max_arrows);
        for (std::size_t k = 0; k < narrows; ++k) {
            Arrow a;
            a.source = k == 0 ? states[0] : rng_.pick(states);
            const std::size_t t = rng_.below(nstates + 2);
            if (t < nstates) a.target = NodeRef::ordinary(states[t]);
            else if (t == nstates || is_main) a.target = NodeRef::finish();
            else a.target = NodeRef::ret();
            const std::size_t len = has_vars ? rng_.below(o_.max_label + 1) : 0;
            for (std::size_t i = 0; i < len; ++i) a.label.push_back(item(c, s, vars));
            s.arrows.push_back(std::move(a));
        }
        finalize(s);
    }

    Rng rng_;
    RandomCinnamonOptions o_;
    const std::vector<Macro>* macros_ = nullptr;
    std::vector<std::size_t> macro_params_;
};

} // namespace

Cinnamon random_cinnamon(std::uint64_t seed, const RandomCinnamonOptions& options) {
    return CinnamonGen(seed, options).run();
}

namespace whilelang {

namespace {

class ProgramGen {
public:
    explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

    WhileProgram gen(std::size_t budget) {
        if (budget < 2) return atom();
        std::vector<int> choices = {0, 0, 0, 3, 3, 4, 4}; // atom, for, while
        if (budget >= 3) choices.insert(choices.end(), {1, 1, 1, 2});
        switch (rng_.pick(choices)) {
        case 1: {
            const std::size_t left = 1 + rng_.below(budget - 2);
            WhileProgram p = gen(left);
            return WhileProgram::seq(std::move(p), gen(budget - 1 - left));
        }
        case 2: {
            const unsigned x = var(), y = var();
            const std::size_t left = 1 + rng_.below(budget - 2);
            WhileProgram p = gen(left);
            return WhileProgram::if_less(x, y, std::move(p), gen(budget - 1 - left));
        }
        case 3: {
            const unsigned y = var();
            return WhileProgram::for_loop(y, gen(budget - 1));
        }
        case 4: {
            const unsigned x = var(), y = var();
            return WhileProgram::while_less(x, y, loop_body(x, budget - 1));
        }
        default: return atom();
        }
    }

private:
    unsigned var() { return static_cast<unsigned>(rng_.below(5)); }

    WhileProgram atom() {
        const unsigned x = var(), y = var();
        switch (rng_.below(3)) {
        case 0: return WhileProgram::zero(x);
        case 1: return WhileProgram::succ(x, y);
        default: return WhileProgram::copy(x, y);
        }
    }

    // Half of all while bodies end with x := x + 1 on the loop's left variable.
    WhileProgram loop_body(unsigned x, std::size_t budget) {
        if (!rng_.coin()) return gen(budget);
        if (budget < 3) return WhileProgram::succ(x, x);
        return WhileProgram::seq(gen(budget - 2), WhileProgram::succ(x, x));
    }

    Rng rng_;
};

} // namespace

WhileProgram gen_random(std::uint64_t seed, std::size_t max_size) {
    return ProgramGen(seed).gen(std::max<std::size_t>(max_size, 1));
}

bool CampaignCase::agree() const {
    for (const auto& v : verdicts)
        if (!v.agree) return false;
    return true;
}

CampaignSummary run_campaign(const CampaignOptions& options, const std::function<void(const CampaignCase&)>& on_case) {
    CampaignSummary summary;
    Rng inputs(options.seed);
    for (std::size_t k = 0; k < options.count; ++k) {
        CampaignCase c;
        c.index = k;
        c.program_seed = campaign_program_seed(options.seed, k);
        const WhileProgram p = gen_random(c.program_seed, options.size);
        for (std::size_t v = 0; v < options.vectors; ++v) {
            std::vector<Nat> args;
            for (std::size_t i = 0; i < options.arity; ++i) args.emplace_back(inputs.below(options.max_input + 1));
            c.verdicts.push_back(differential_check(p, args, options.fuel));
            if (c.verdicts.back().compiled_cause == OutcomeKind::Failure) ++summary.compiled_failures;
        }
        if (c.agree()) {
            ++summary.agree;
        } else {
            ++summary.disagree;
            summary.disagreements.push_back(c);
        }
        if (on_case) on_case(c);
    }
    return summary;
}

} // namespace whilelang

} // namespace cinnamon
