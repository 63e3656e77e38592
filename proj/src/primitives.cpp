#include "kernel.hpp"

#include <array>

namespace cinnamon {

namespace detail {

namespace {

const Nat& nat_of(const Value& v) {
    if (!v.is_nat()) throw PrimitiveError(RuntimeErrorKind::ModeMismatch, "expected a natural number, got " + v.to_string());
    return v.nat();
}

const std::string& str_of(const Value& v) {
    if (!v.is_str()) throw PrimitiveError(RuntimeErrorKind::ModeMismatch, "expected a string, got " + v.to_string());
    return v.str();
}

void assign(Value* const* ops, std::size_t i, Value v, OperandWrites* writes) {
    if (writes) writes->emplace_back(i, *ops[i]);
    *ops[i] = std::move(v);
}

void check_same_mode(const Value& a, const Value& b) {
    if (a.mode() != b.mode())
        throw PrimitiveError(RuntimeErrorKind::ModeMismatch, "cannot compare " + a.to_string() + " with " + b.to_string());
}

// operands already agree in mode
bool same(const Value& a, const Value& b) { return a.is_nat() ? a.nat() == b.nat() : a.str() == b.str(); }

} // namespace

bool forward(PrimKind kind, Value* const* ops, OperandWrites* writes) {
    switch (kind) {
    case PrimKind::Clear:
        if (!writes && ops[0]->is_nat()) {
            ops[0]->nat() = 0;
            return false;
        }
        assign(ops, 0, Value::zero(ops[0]->mode()), writes);
        return false;
    case PrimKind::Copy:
        if (ops[0] == ops[1]) {
            if (writes) writes->emplace_back(1, *ops[1]);
            return false;
        }
        if (!writes && ops[0]->is_nat() && ops[1]->is_nat()) {
            ops[1]->nat() = ops[0]->nat();
            return false;
        }
        assign(ops, 1, *ops[0], writes);
        return false;
    case PrimKind::Inc:
        nat_of(*ops[0]);
        if (writes) writes->emplace_back(0, *ops[0]);
        ++ops[0]->nat();
        return false;
    case PrimKind::IfNonEq:
        check_same_mode(*ops[0], *ops[1]);
        return same(*ops[0], *ops[1]);
    case PrimKind::Sep: {
        const std::string l = str_of(*ops[0]);
        if (l.empty()) return true;
        assign(ops, 1, Value(l.substr(0, 1)), writes);
        assign(ops, 2, Value(l.substr(1)), writes);
        return false;
    }
    case PrimKind::Cons: {
        const std::string& h = str_of(*ops[0]);
        if (h.size() != 1)
            throw PrimitiveError(RuntimeErrorKind::ConsNonSymbolHead,
                                 "cons head must be a single symbol, got " + ops[0]->to_string());
        assign(ops, 2, Value(h + str_of(*ops[1])), writes);
        return false;
    }
    case PrimKind::IfEq:
        check_same_mode(*ops[0], *ops[1]);
        return !same(*ops[0], *ops[1]);
    case PrimKind::IfEmpty:
        return !str_of(*ops[0]).empty();
    }
    return false;
}

void backward(PrimKind kind, Value* const* ops, OperandWrites* writes) {
    if (kind != PrimKind::Inc) return;
    const Nat& x = nat_of(*ops[0]);
    if (x == 0)
        throw PrimitiveError(RuntimeErrorKind::IrreversibleHistory,
                             "backward inc on a variable holding 0: its history was destroyed");
    if (writes) writes->emplace_back(0, *ops[0]);
    --ops[0]->nat();
}

} // namespace detail

namespace {

struct Bound {
    std::array<Value*, 3> ptrs{};
    std::array<Value, 3> literals;
};

void bind(const Primitive& p, Environment& env, Bound& b) {
    if (p.operands.size() != arity(p.kind))
        throw std::invalid_argument(std::string(to_string(p.kind)) + " expects " + std::to_string(arity(p.kind)) +
                                    " operands");
    for (std::size_t i = 0; i < p.operands.size(); ++i) {
        const Operand& op = p.operands[i];
        if (op.is_var()) {
            auto slot = env.slot(op.text);
            if (!slot) throw std::invalid_argument("variable '" + op.text + "' is not in the environment");
            b.ptrs[i] = &env.at(*slot);
        } else {
            b.literals[i] = Value(op.text);
            b.ptrs[i] = &b.literals[i];
        }
    }
}

} // namespace

const char* to_string(RuntimeErrorKind kind) {
    switch (kind) {
    case RuntimeErrorKind::IrreversibleHistory: return "IrreversibleHistory";
    case RuntimeErrorKind::TopLevelReturn: return "TopLevelReturn";
    case RuntimeErrorKind::ConsNonSymbolHead: return "ConsNonSymbolHead";
    case RuntimeErrorKind::ModeMismatch: return "ModeMismatch";
    }
    return "?";
}

Environment::Environment(std::vector<std::string> names, Mode mode) {
    auto index = std::make_shared<std::unordered_map<std::string, std::size_t>>();
    for (std::size_t i = 0; i < names.size(); ++i) index->emplace(names[i], i);
    values_.assign(names.size(), Value::zero(mode));
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
    index_ = std::move(index);
}

std::optional<std::size_t> Environment::slot(const std::string& name) const {
    auto it = index_->find(name);
    if (it == index_->end()) return std::nullopt;
    return it->second;
}

const Value& Environment::get(const std::string& name) const {
    auto s = slot(name);
    if (!s) throw std::out_of_range("no variable '" + name + "'");
    return values_[*s];
}

void Environment::set(const std::string& name, Value v) {
    auto s = slot(name);
    if (!s) throw std::out_of_range("no variable '" + name + "'");
    values_[*s] = std::move(v);
}

bool Environment::same_values(const Environment& other) const {
    if (size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
        auto s = other.slot(names()[i]);
        if (!s || !(other.at(*s) == values_[i])) return false;
    }
    return true;
}

Environment exec_forward_prim(const Primitive& p, Environment env) {
    if (!env.forw) throw std::invalid_argument("exec_forward_prim requires FORW = 1");
    Bound b;
    bind(p, env, b);
    if (detail::forward(p.kind, b.ptrs.data(), nullptr)) env.failure = true;
    return env;
}

Environment exec_backward_prim(const Primitive& p, Environment env) {
    if (env.forw) throw std::invalid_argument("exec_backward_prim requires FORW = 0");
    Bound b;
    bind(p, env, b);
    detail::backward(p.kind, b.ptrs.data(), nullptr);
    return env;
}

} // namespace cinnamon
