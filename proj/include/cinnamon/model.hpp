#pragma once

#include "cinnamon/value.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cinnamon {

struct SourceSpan {
    std::string file;
    int line = 0;
    int column = 0;
    int length = 0;

    // Spans are bookkeeping, not structure: two spans always compare equal so
    // that structural equality of models ignores where they came from.
    friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

enum class PrimKind { Clear, Copy, Inc, IfNonEq, Sep, Cons, IfEq, IfEmpty };

const char* to_string(PrimKind kind);

/// Action primitives change the environment; test primitives only raise FAILURE.
bool is_test(PrimKind kind);
bool is_str_only(PrimKind kind);
bool is_nat_only(PrimKind kind);
std::size_t arity(PrimKind kind);

struct Operand {
    enum class Kind { Variable, Symbol };
    Kind kind = Kind::Variable;
    std::string text; // variable name, or the single symbol of a literal

    static Operand var(std::string name) { return {Kind::Variable, std::move(name)}; }
    static Operand symbol(char c) { return {Kind::Symbol, std::string(1, c)}; }
    bool is_var() const { return kind == Kind::Variable; }

    friend bool operator==(const Operand&, const Operand&) = default;
};

struct Primitive {
    PrimKind kind = PrimKind::Clear;
    std::vector<Operand> operands;

    bool is_test() const { return cinnamon::is_test(kind); }
    friend bool operator==(const Primitive&, const Primitive&) = default;
};

Primitive clear(std::string x);
Primitive copy(std::string from, std::string to);
Primitive inc(std::string x);
Primitive if_non_eq(std::string x, std::string y);

struct Actual {
    enum class Kind { Variable, Constant };
    Kind kind = Kind::Variable;
    std::string var;
    Value constant;

    static Actual variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
    static Actual value(Value v) { return {Kind::Constant, {}, std::move(v)}; }
    bool is_var() const { return kind == Kind::Variable; }

    friend bool operator==(const Actual&, const Actual&) = default;
};

struct Call {
    std::string subnet;
    std::vector<Actual> actuals;
    friend bool operator==(const Call&, const Call&) = default;
};

/// Surface-only: a use of a macro, removed by expand_macros.
struct MacroUse {
    std::string macro;
    std::vector<Actual> args;
    friend bool operator==(const MacroUse&, const MacroUse&) = default;
};

using LabelItem = std::variant<Primitive, Call, MacroUse>;

struct NodeRef {
    enum class Kind { Ordinary, Finish, Return };
    Kind kind = Kind::Ordinary;
    std::string state;

    static NodeRef ordinary(std::string s) { return {Kind::Ordinary, std::move(s)}; }
    static NodeRef finish() { return {Kind::Finish, {}}; }
    static NodeRef ret() { return {Kind::Return, {}}; }
    bool is_ordinary() const { return kind == Kind::Ordinary; }
    std::string to_string() const;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct Arrow {
    std::string id;
    std::string source;
    NodeRef target;
    std::vector<LabelItem> label; // empty = lambda
    SourceSpan span;

    friend bool operator==(const Arrow&, const Arrow&) = default;
};

struct Subnet {
    std::string name;
    std::vector<std::string> formals;
    std::vector<std::string> locals; // non-parameter variables of the subnet
    std::vector<std::string> states; // ordinary states: init first, then order of appearance
    std::string init;
    std::vector<Arrow> arrows;
    SourceSpan span;

    /// out(s) in declared order.
    std::vector<const Arrow*> out(const std::string& state) const;
    bool declares(const std::string& var) const;
    bool has_state(const std::string& state) const;

    friend bool operator==(const Subnet&, const Subnet&) = default;
};

struct Macro {
    std::string name;
    std::vector<std::string> params;
    std::vector<LabelItem> body;
    SourceSpan span;

    friend bool operator==(const Macro&, const Macro&) = default;
};

struct Cinnamon {
    std::string name;
    Mode mode = Mode::Nat;
    std::vector<Subnet> subnets; // file order
    std::string main;
    std::vector<Macro> macros;

    const Subnet* find_subnet(const std::string& name) const;
    Subnet* find_subnet(const std::string& name);
    const Macro* find_macro(const std::string& name) const;
    const Subnet& main_subnet() const;

    friend bool operator==(const Cinnamon&, const Cinnamon&) = default;
};

/// Recomputes the state list (init first, then order of appearance in arrows).
void rebuild_states(Subnet& subnet);

/// Recomputes the canonical state list and arrow ids ("<source>.<k>", k the
/// 1-based position in out(source)). Builders call this once arrows are in place.
void finalize(Subnet& subnet);

/// Text of a label item as written in the DSL ("inc(x)", "call f(a, 5)").
std::string to_string(const LabelItem& item);
std::string to_string(const Actual& actual);
std::string label_text(const std::vector<LabelItem>& label);
/// 'c' with backslash escapes for quote and backslash.
std::string symbol_literal(char c);

} // namespace cinnamon
