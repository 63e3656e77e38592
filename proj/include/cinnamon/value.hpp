#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <variant>

namespace cinnamon {

/// Unbounded natural number.
using Nat = boost::multiprecision::cpp_int;

enum class Mode { Nat, Str };

const char* to_string(Mode mode);

/// A cinnamon value: a natural number (nat mode) or a string of symbols (str mode).
class Value {
public:
    Value() : data_(Nat(0)) {}
    Value(Nat n) : data_(std::move(n)) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(int n) : data_(Nat(n)) {}
    Value(const char* s) : data_(std::string(s)) {}

    static Value zero(Mode mode) { return mode == Mode::Nat ? Value(Nat(0)) : Value(std::string()); }

    bool is_nat() const { return std::holds_alternative<Nat>(data_); }
    bool is_str() const { return std::holds_alternative<std::string>(data_); }
    Mode mode() const { return is_nat() ? Mode::Nat : Mode::Str; }

    const Nat& nat() const { return std::get<Nat>(data_); }
    Nat& nat() { return std::get<Nat>(data_); }
    const std::string& str() const { return std::get<std::string>(data_); }
    std::string& str() { return std::get<std::string>(data_); }

    /// Decimal for naturals, double-quoted with escapes for strings.
    std::string to_string() const;

    friend bool operator==(const Value&, const Value&) = default;

private:
    std::variant<Nat, std::string> data_;
};

/// Double-quoted, backslash-escaped rendering of a string literal.
std::string quote(const std::string& s);

} // namespace cinnamon
