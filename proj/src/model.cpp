#include "cinnamon/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace cinnamon {

const char* to_string(Mode mode) { return mode == Mode::Nat ? "nat" : "str"; }

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string Value::to_string() const {
    if (is_nat()) return nat().str();
    return quote(str());
}

const char* to_string(PrimKind kind) {
    switch (kind) {
    case PrimKind::Clear: return "clear";
    case PrimKind::Copy: return "copy";
    case PrimKind::Inc: return "inc";
    case PrimKind::IfNonEq: return "if nonEq";
    case PrimKind::Sep: return "sep";
    case PrimKind::Cons: return "cons";
    case PrimKind::IfEq: return "if eq";
    case PrimKind::IfEmpty: return "if empty";
    }
    return "?";
}

bool is_test(PrimKind kind) {
    return kind == PrimKind::IfNonEq || kind == PrimKind::IfEq || kind == PrimKind::IfEmpty;
}

bool is_str_only(PrimKind kind) {
    return kind == PrimKind::Sep || kind == PrimKind::Cons || kind == PrimKind::IfEq ||
           kind == PrimKind::IfEmpty;
}

bool is_nat_only(PrimKind kind) { return kind == PrimKind::Inc || kind == PrimKind::IfNonEq; }

std::size_t arity(PrimKind kind) {
    switch (kind) {
    case PrimKind::Clear:
    case PrimKind::Inc:
    case PrimKind::IfEmpty: return 1;
    case PrimKind::Copy:
    case PrimKind::IfNonEq:
    case PrimKind::IfEq: return 2;
    case PrimKind::Sep:
    case PrimKind::Cons: return 3;
    }
    return 0;
}

Primitive clear(std::string x) { return {PrimKind::Clear, {Operand::var(std::move(x))}}; }
Primitive copy(std::string from, std::string to) {
    return {PrimKind::Copy, {Operand::var(std::move(from)), Operand::var(std::move(to))}};
}
Primitive inc(std::string x) { return {PrimKind::Inc, {Operand::var(std::move(x))}}; }
Primitive if_non_eq(std::string x, std::string y) {
    return {PrimKind::IfNonEq, {Operand::var(std::move(x)), Operand::var(std::move(y))}};
}

std::string NodeRef::to_string() const {
    switch (kind) {
    case Kind::Finish: return "FINISH";
    case Kind::Return: return "RETURN";
    case Kind::Ordinary: break;
    }
    return state;
}

std::vector<const Arrow*> Subnet::out(const std::string& state) const {
    std::vector<const Arrow*> result;
    for (const auto& a : arrows)
        if (a.source == state) result.push_back(&a);
    return result;
}

bool Subnet::declares(const std::string& var) const {
    return std::find(formals.begin(), formals.end(), var) != formals.end() ||
           std::find(locals.begin(), locals.end(), var) != locals.end();
}

bool Subnet::has_state(const std::string& state) const {
    return std::find(states.begin(), states.end(), state) != states.end();
}

const Subnet* Cinnamon::find_subnet(const std::string& n) const {
    for (const auto& s : subnets)
        if (s.name == n) return &s;
    return nullptr;
}

Subnet* Cinnamon::find_subnet(const std::string& n) {
    for (auto& s : subnets)
        if (s.name == n) return &s;
    return nullptr;
}

const Macro* Cinnamon::find_macro(const std::string& n) const {
    for (const auto& m : macros)
        if (m.name == n) return &m;
    return nullptr;
}

const Subnet& Cinnamon::main_subnet() const {
    const Subnet* s = find_subnet(main);
    if (!s) throw std::logic_error("cinnamon '" + name + "' has no main subnet '" + main + "'");
    return *s;
}

void rebuild_states(Subnet& subnet) {
    std::vector<std::string> states;
    auto add = [&](const std::string& s) {
        if (std::find(states.begin(), states.end(), s) == states.end()) states.push_back(s);
    };
    if (subnet.init != "FINISH" && subnet.init != "RETURN") add(subnet.init);
    for (const auto& a : subnet.arrows) {
        add(a.source);
        if (a.target.is_ordinary()) add(a.target.state);
    }
    subnet.states = std::move(states);
}

void finalize(Subnet& subnet) {
    rebuild_states(subnet);

    std::vector<std::pair<std::string, int>> counts;
    for (auto& a : subnet.arrows) {
        auto it = std::find_if(counts.begin(), counts.end(),
                               [&](const auto& p) { return p.first == a.source; });
        if (it == counts.end()) {
            counts.emplace_back(a.source, 0);
            it = counts.end() - 1;
        }
        a.id = a.source + "." + std::to_string(++it->second);
    }
}

std::string symbol_literal(char c) {
    if (c == '\'' || c == '\\') return std::string("'\\") + c + "'";
    return std::string("'") + c + "'";
}

std::string to_string(const Actual& actual) {
    if (actual.is_var()) return actual.var;
    if (actual.constant.is_str() && actual.constant.str().size() == 1)
        return symbol_literal(actual.constant.str()[0]);
    return actual.constant.to_string();
}

namespace {

std::string operand_text(const Operand& op) {
    return op.is_var() ? op.text : symbol_literal(op.text.at(0));
}

std::string actual_list(const std::vector<Actual>& actuals) {
    std::string out;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (i) out += ", ";
        out += to_string(actuals[i]);
    }
    return out;
}

} // namespace

std::string to_string(const LabelItem& item) {
    if (const auto* p = std::get_if<Primitive>(&item)) {
        std::string out;
        switch (p->kind) {
        case PrimKind::IfNonEq: out = "if nonEq("; break;
        case PrimKind::IfEq: out = "if eq("; break;
        case PrimKind::IfEmpty: out = "if empty("; break;
        default: out = std::string(to_string(p->kind)) + "("; break;
        }
        for (std::size_t i = 0; i < p->operands.size(); ++i) {
            if (i) out += ", ";
            out += operand_text(p->operands[i]);
        }
        return out + ")";
    }
    if (const auto* c = std::get_if<Call>(&item)) return "call " + c->subnet + "(" + actual_list(c->actuals) + ")";
    const auto& m = std::get<MacroUse>(item);
    return m.macro + "(" + actual_list(m.args) + ")";
}

std::string label_text(const std::vector<LabelItem>& label) {
    std::string out;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (i) out += ", ";
        out += to_string(label[i]);
    }
    return out;
}

} // namespace cinnamon
