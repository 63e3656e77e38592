#pragma once

#include "cinnamon/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace cinnamon {

struct Violation {
    std::string rule;
    std::string message;
    std::string subnet;
    std::string arrow;
    std::string variable;
    SourceSpan span;
};

using ValidationReport = std::vector<Violation>;

/// Checks every well-formedness rule of the model. Violations are data; an
/// empty report means the cinnamon is well formed.
ValidationReport validate(const Cinnamon& c);

class MacroError : public std::runtime_error {
public:
    enum class Kind { UnknownMacro, MacroArityMismatch, RecursiveMacro, CallInMacro, InvalidArgument };

    MacroError(Kind kind, std::string macro, const std::string& what)
        : std::runtime_error(what), kind_(kind), macro_(std::move(macro)) {}

    Kind kind() const { return kind_; }
    const std::string& macro() const { return macro_; }

private:
    Kind kind_;
    std::string macro_;
};

/// Replaces every macro use by its (recursively expanded) body with formals
/// substituted by actuals. The result carries no macro definitions.
Cinnamon expand_macros(const Cinnamon& c);

/// Expands a single macro use to primitives.
std::vector<Primitive> expand_use(const Cinnamon& c, const MacroUse& use);

/// Rewrites labels with k >= 2 items into chains of single-item arrows through
/// fresh states "<arrow id>~<n>"; chain arrows are "<arrow id>/<n>".
Cinnamon normalize(const Cinnamon& c);

/// True for states introduced by normalize.
bool is_fresh_state(const std::string& state);

/// x_0, x_1, ...: main formals, main locals, then the other subnets in file
/// order (formals then locals).
std::vector<std::string> variable_order(const Cinnamon& c);

} // namespace cinnamon
