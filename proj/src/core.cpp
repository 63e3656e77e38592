#include "cinnamon/core.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cinnamon {

namespace {

bool is_system_name(const std::string& s) { return s == "FINISH" || s == "RETURN"; }

class Validator {
public:
    explicit Validator(const Cinnamon& c) : c_(c) {}

    ValidationReport run() {
        check_main();
        check_uniqueness();
        check_macros();
        for (const auto& s : c_.subnets) check_subnet(s);
        return std::move(report_);
    }

private:
    void add(std::string rule, std::string message, const Subnet* s = nullptr, const Arrow* a = nullptr,
             std::string var = {}) {
        Violation v;
        v.rule = std::move(rule);
        v.message = std::move(message);
        if (s) {
            v.subnet = s->name;
            v.span = s->span;
        }
        if (a) {
            v.arrow = a->id;
            v.span = a->span;
        }
        v.variable = std::move(var);
        report_.push_back(std::move(v));
    }

    void check_main() {
        auto n = std::count_if(c_.subnets.begin(), c_.subnets.end(),
                               [&](const Subnet& s) { return s.name == c_.main; });
        if (n != 1) add("main-count", "main subnet '" + c_.main + "' must name exactly one subnet");
    }

    void check_uniqueness() {
        std::map<std::string, const Subnet*> names, states, vars;
        for (const auto& s : c_.subnets) {
            if (!names.emplace(s.name, &s).second)
                add("duplicate-subnet", "subnet '" + s.name + "' declared more than once", &s);
            for (const auto& st : s.states) {
                auto [it, fresh] = states.emplace(st, &s);
                if (!fresh && it->second != &s)
                    add("disjoint-states",
                        "state '" + st + "' occurs in subnets '" + it->second->name + "' and '" + s.name + "'", &s);
            }
            std::set<std::string> own;
            auto declare = [&](const std::string& v) {
                if (!own.insert(v).second) {
                    add("duplicate-variable", "variable '" + v + "' declared twice in subnet '" + s.name + "'", &s,
                        nullptr, v);
                    return;
                }
                auto [it, fresh] = vars.emplace(v, &s);
                if (!fresh)
                    add("disjoint-vars",
                        "variable '" + v + "' declared in subnets '" + it->second->name + "' and '" + s.name + "'",
                        &s, nullptr, v);
            };
            for (const auto& v : s.formals) declare(v);
            for (const auto& v : s.locals) declare(v);
        }
        std::set<std::string> macros;
        for (const auto& m : c_.macros)
            if (!macros.insert(m.name).second) {
                add("duplicate-macro", "macro '" + m.name + "' declared twice");
                report_.back().span = m.span;
            }
    }

    void check_macros() {
        for (const auto& m : c_.macros)
            for (const auto& item : m.body)
                if (std::holds_alternative<Call>(item)) {
                    add("macro-call", "macro '" + m.name + "' contains a subnet call");
                    report_.back().span = m.span;
                }
    }

    void check_subnet(const Subnet& s) {
        if (is_system_name(s.init))
            add("init-ordinary", "initial state of '" + s.name + "' must be an ordinary state", &s);
        else if (!s.has_state(s.init))
            add("init-unknown", "initial state '" + s.init + "' of '" + s.name + "' is not a state", &s);

        for (const auto& a : s.arrows) {
            if (!s.has_state(a.source))
                add("arrow-source", "arrow source '" + a.source + "' is not a state of '" + s.name + "'", &s, &a);
            if (a.target.is_ordinary() && !s.has_state(a.target.state))
                add("arrow-target", "arrow target '" + a.target.state + "' is not a state of '" + s.name + "'", &s,
                    &a);
            for (const auto& item : a.label) check_item(s, a, item);
        }
    }

    void check_item(const Subnet& s, const Arrow& a, const LabelItem& item) {
        if (const auto* p = std::get_if<Primitive>(&item)) {
            check_primitive(s, a, *p);
        } else if (const auto* call = std::get_if<Call>(&item)) {
            const Subnet* callee = c_.find_subnet(call->subnet);
            if (!callee) {
                add("unknown-subnet", "call to unknown subnet '" + call->subnet + "'", &s, &a);
            } else if (callee->formals.size() != call->actuals.size()) {
                add("arity",
                    "call " + call->subnet + " passes " + std::to_string(call->actuals.size()) +
                        " actuals, subnet declares " + std::to_string(callee->formals.size()) + " formals",
                    &s, &a);
            }
            for (const auto& act : call->actuals) check_actual(s, a, act);
        } else {
            const auto& use = std::get<MacroUse>(item);
            for (const auto& act : use.args) check_actual(s, a, act);
            try {
                for (const auto& p : expand_use(c_, use)) check_primitive(s, a, p);
            } catch (const MacroError& e) {
                // already reported once at the macro definition
                if (e.kind() == MacroError::Kind::CallInMacro) return;
                static const char* rules[] = {"unknown-macro", "macro-arity", "recursive-macro", "macro-call",
                                              "macro-argument"};
                add(rules[static_cast<int>(e.kind())], e.what(), &s, &a);
            }
        }
    }

    void check_actual(const Subnet& s, const Arrow& a, const Actual& act) {
        if (act.is_var()) {
            if (!s.declares(act.var))
                add("undeclared-variable", "variable '" + act.var + "' is not declared in '" + s.name + "'", &s, &a,
                    act.var);
        } else if (act.constant.mode() != c_.mode) {
            add("mode-mismatch", "constant " + to_string(act) + " does not match mode " + to_string(c_.mode), &s, &a);
        }
    }

    void check_primitive(const Subnet& s, const Arrow& a, const Primitive& p) {
        if ((c_.mode == Mode::Nat && is_str_only(p.kind)) || (c_.mode == Mode::Str && is_nat_only(p.kind)))
            add("mode-mismatch", std::string(to_string(p.kind)) + " is not a " + to_string(c_.mode) + "-mode primitive",
                &s, &a);
        if (p.operands.size() != arity(p.kind))
            add("prim-arity", std::string(to_string(p.kind)) + " takes " + std::to_string(arity(p.kind)) + " operands",
                &s, &a);
        for (const auto& op : p.operands) {
            if (op.is_var()) {
                if (!s.declares(op.text))
                    add("undeclared-variable", "variable '" + op.text + "' is not declared in '" + s.name + "'", &s,
                        &a, op.text);
            } else if (p.kind != PrimKind::IfEq || op.text.size() != 1) {
                add("symbol-operand", "symbol literals are only allowed in if eq", &s, &a);
            }
        }
    }

    const Cinnamon& c_;
    ValidationReport report_;
};

Operand substitute(const Operand& op, const std::map<std::string, Actual>& binding, PrimKind kind,
                   const std::string& macro) {
    if (!op.is_var()) return op;
    auto it = binding.find(op.text);
    if (it == binding.end()) return op;
    const Actual& act = it->second;
    if (act.is_var()) return Operand::var(act.var);
    if (kind == PrimKind::IfEq && act.constant.is_str() && act.constant.str().size() == 1)
        return Operand::symbol(act.constant.str()[0]);
    throw MacroError(MacroError::Kind::InvalidArgument, macro,
                     "constant " + to_string(act) + " cannot stand for operand '" + op.text + "' of macro '" +
                         macro + "'");
}

void expand_into(const Cinnamon& c, const MacroUse& use, std::vector<std::string>& active,
                 std::vector<Primitive>& out) {
    const Macro* m = c.find_macro(use.macro);
    if (!m) throw MacroError(MacroError::Kind::UnknownMacro, use.macro, "unknown macro '" + use.macro + "'");
    if (m->params.size() != use.args.size())
        throw MacroError(MacroError::Kind::MacroArityMismatch, use.macro,
                         "macro '" + use.macro + "' takes " + std::to_string(m->params.size()) + " arguments, got " +
                             std::to_string(use.args.size()));
    if (std::find(active.begin(), active.end(), m->name) != active.end())
        throw MacroError(MacroError::Kind::RecursiveMacro, use.macro, "macro '" + use.macro + "' is recursive");

    std::map<std::string, Actual> binding;
    for (std::size_t i = 0; i < m->params.size(); ++i) binding.emplace(m->params[i], use.args[i]);

    active.push_back(m->name);
    for (const auto& item : m->body) {
        if (const auto* p = std::get_if<Primitive>(&item)) {
            Primitive q{p->kind, {}};
            for (const auto& op : p->operands) q.operands.push_back(substitute(op, binding, p->kind, m->name));
            out.push_back(std::move(q));
        } else if (const auto* inner = std::get_if<MacroUse>(&item)) {
            MacroUse bound{inner->macro, {}};
            for (const auto& a : inner->args) {
                auto it = a.is_var() ? binding.find(a.var) : binding.end();
                bound.args.push_back(it == binding.end() ? a : it->second);
            }
            expand_into(c, bound, active, out);
        } else {
            throw MacroError(MacroError::Kind::CallInMacro, m->name, "macro '" + m->name + "' contains a subnet call");
        }
    }
    active.pop_back();
}

} // namespace

ValidationReport validate(const Cinnamon& c) { return Validator(c).run(); }

std::vector<Primitive> expand_use(const Cinnamon& c, const MacroUse& use) {
    std::vector<std::string> active;
    std::vector<Primitive> out;
    expand_into(c, use, active, out);
    return out;
}

Cinnamon expand_macros(const Cinnamon& c) {
    Cinnamon result = c;
    for (auto& s : result.subnets) {
        for (auto& a : s.arrows) {
            std::vector<LabelItem> label;
            for (auto& item : a.label) {
                if (const auto* use = std::get_if<MacroUse>(&item)) {
                    for (auto& p : expand_use(c, *use)) label.emplace_back(std::move(p));
                } else {
                    label.push_back(std::move(item));
                }
            }
            a.label = std::move(label);
        }
    }
    result.macros.clear();
    return result;
}

bool is_fresh_state(const std::string& state) { return state.find('~') != std::string::npos; }

Cinnamon normalize(const Cinnamon& c) {
    Cinnamon result = c;
    for (auto& s : result.subnets) {
        std::vector<Arrow> arrows;
        for (const auto& a : s.arrows) {
            if (a.label.size() <= 1) {
                arrows.push_back(a);
                continue;
            }
            const std::size_t k = a.label.size();
            for (std::size_t i = 0; i < k; ++i) {
                if (std::holds_alternative<MacroUse>(a.label[i]))
                    throw std::logic_error("normalize: arrow " + a.id + " still contains a macro use");
                Arrow link;
                link.id = a.id + "/" + std::to_string(i + 1);
                link.source = i == 0 ? a.source : a.id + "~" + std::to_string(i);
                link.target = i + 1 == k ? a.target : NodeRef::ordinary(a.id + "~" + std::to_string(i + 1));
                link.label = {a.label[i]};
                link.span = a.span;
                arrows.push_back(std::move(link));
            }
        }
        s.arrows = std::move(arrows);
        rebuild_states(s);
    }
    return result;
}

std::vector<std::string> variable_order(const Cinnamon& c) {
    std::vector<std::string> order;
    auto append = [&](const Subnet& s) {
        order.insert(order.end(), s.formals.begin(), s.formals.end());
        order.insert(order.end(), s.locals.begin(), s.locals.end());
    };
    const Subnet* main = c.find_subnet(c.main);
    if (main) append(*main);
    for (const auto& s : c.subnets)
        if (&s != main) append(s);
    return order;
}

} // namespace cinnamon
