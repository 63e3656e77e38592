#pragma once

#include "cinnamon/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cinnamon {

struct ParseDiagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
    std::string rule;

    /// "file:line:col: rule: message"
    std::string to_string() const;
};

struct ParseResult {
    std::optional<Cinnamon> cinnamon;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return cinnamon.has_value(); }
};

/// Parses the .cin text format. On failure the result holds no cinnamon and at
/// least one error diagnostic.
ParseResult parse(std::string_view text, const std::string& file = "<input>");

/// Reads and parses a file; unreadable files yield an "io" diagnostic.
ParseResult parse_file(const std::filesystem::path& path);

/// Canonical text; parse(print(c)) is structurally identical to c.
std::string print(const Cinnamon& c);

/// Graphviz rendering: one cluster per subnet, edges annotated "k: label".
std::string export_dot(const Cinnamon& c);

} // namespace cinnamon
