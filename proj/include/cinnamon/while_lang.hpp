#pragma once

#include "cinnamon/dsl.hpp"
#include "cinnamon/interp.hpp"
#include "cinnamon/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cinnamon::whilelang {

/// AST of while-programs over variables x0, x1, ... (x0 is the output).
struct WhileProgram {
    enum class Kind { AssignZero, AssignSucc, AssignCopy, Seq, If, For, While };

    Kind kind = Kind::AssignZero;
    unsigned x = 0; // assigned variable; left side of x < y
    unsigned y = 0; // source variable; right side of x < y; trip count of for
    std::vector<WhileProgram> body; // Seq: {p, q}; If: {then, else}; For/While: {p}

    static WhileProgram zero(unsigned x) { return {Kind::AssignZero, x, 0, {}}; }
    static WhileProgram succ(unsigned x, unsigned y) { return {Kind::AssignSucc, x, y, {}}; }
    static WhileProgram copy(unsigned x, unsigned y) { return {Kind::AssignCopy, x, y, {}}; }
    static WhileProgram seq(WhileProgram p, WhileProgram q) { return {Kind::Seq, 0, 0, {std::move(p), std::move(q)}}; }
    static WhileProgram if_less(unsigned x, unsigned y, WhileProgram p, WhileProgram q) {
        return {Kind::If, x, y, {std::move(p), std::move(q)}};
    }
    static WhileProgram for_loop(unsigned y, WhileProgram p) { return {Kind::For, 0, y, {std::move(p)}}; }
    static WhileProgram while_less(unsigned x, unsigned y, WhileProgram p) {
        return {Kind::While, x, y, {std::move(p)}};
    }

    std::size_t node_count() const;
    /// Highest variable index mentioned anywhere.
    unsigned max_variable() const;

    friend bool operator==(const WhileProgram&, const WhileProgram&) = default;
};

/// Canonical text in the .wh grammar.
std::string print(const WhileProgram& p);

struct WhileParseResult {
    std::optional<WhileProgram> program;
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const { return program.has_value(); }
};

WhileParseResult parse_while(std::string_view text, const std::string& file = "<input>");

/// Reference semantics. `fuel` bounds executed assignments plus while iterations;
/// running out yields an empty result (Diverged).
std::optional<Nat> eval_while(const WhileProgram& p, const std::vector<Nat>& args, std::uint64_t fuel);

/// Monus subnet subtr(x, y, z): z = max(x - y, 0), using core primitives only.
Subnet build_subtr();

/// A cinnamon whose main subnet m(z, x, y) calls subtr(x, y, z).
Cinnamon monus_cinnamon();

/// Translates a while-program into a nat-mode cinnamon computing the same
/// partial function.
Cinnamon compile_while(const WhileProgram& p);

/// Deterministic random program: node_count <= max_size, variables x0..x4.
WhileProgram gen_random(std::uint64_t seed, std::size_t max_size);

inline constexpr std::uint64_t kStepsPerFuel = 64;

struct Verdict {
    WhileProgram program;
    std::vector<Nat> inputs;
    std::optional<Nat> oracle;  // empty: Diverged(fuel)
    std::optional<Nat> compiled; // empty: undefined
    OutcomeKind compiled_cause = OutcomeKind::Success;
    bool agree = false;
};

/// Runs the oracle and the compiled cinnamon (step limit 64 x fuel) on the same inputs.
Verdict differential_check(const WhileProgram& p, const std::vector<Nat>& inputs, std::uint64_t fuel,
                           const EventSink& sink = {});

struct CampaignCase {
    std::size_t index = 0;
    std::uint64_t program_seed = 0;
    std::vector<Verdict> verdicts; // one per input vector
    bool agree() const;
};

struct CampaignSummary {
    std::size_t agree = 0;
    std::size_t disagree = 0;
    std::size_t compiled_failures = 0; // verdicts whose compiled run ended in Failure
    std::vector<CampaignCase> disagreements;
};

inline std::uint64_t campaign_program_seed(std::uint64_t seed, std::size_t k) { return seed * 1000003 + k; }

/// Differential campaign: program k is gen_random(campaign_program_seed(seed, k), size),
/// checked on `vectors` input vectors of `arity` values drawn from [0, max_input].
struct CampaignOptions {
    std::uint64_t seed = 42;
    std::size_t count = 200;
    std::size_t size = 12;
    std::uint64_t fuel = 100000;
    std::size_t vectors = 3;
    std::size_t arity = 4;
    unsigned max_input = 5;
};

CampaignSummary run_campaign(const CampaignOptions& options,
                             const std::function<void(const CampaignCase&)>& on_case = {});

} // namespace cinnamon::whilelang
