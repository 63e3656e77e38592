#include "cinnamon/core.hpp"
#include "cinnamon/dsl.hpp"
#include "cinnamon/interp.hpp"
#include "cinnamon/while_lang.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cinnamon;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kRuntime = 3, kLimit = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::Success: return kOk;
    case OutcomeKind::Failure: return kFailure;
    case OutcomeKind::RuntimeError: return kRuntime;
    case OutcomeKind::StepLimit: return kLimit;
    }
    return kRuntime;
}

std::string format(const Violation& v) {
    std::ostringstream os;
    os << (v.span.file.empty() ? "<input>" : v.span.file) << ":" << v.span.line << ":" << v.span.column << ": "
       << v.rule << ": " << v.message;
    return os.str();
}

// Parses and validates; prints diagnostics and returns nullopt on any error.
std::optional<Cinnamon> load(const std::string& file) {
    ParseResult r = parse_file(file);
    for (const auto& d : r.diagnostics) std::cerr << d.to_string() << "\n";
    if (!r.ok()) return std::nullopt;
    const ValidationReport report = validate(*r.cinnamon);
    for (const auto& v : report) std::cerr << format(v) << "\n";
    if (!report.empty()) return std::nullopt;
    return std::move(r.cinnamon);
}

Nat parse_nat(const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError("not a natural number: '" + text + "'");
    return Nat(text);
}

std::vector<Nat> parse_args(const std::string& csv) {
    std::vector<Nat> out;
    if (csv.empty()) return out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_nat(item));
    if (csv.back() == ',') throw UsageError("trailing comma in argument list");
    return out;
}

Value parse_value(const std::string& text, Mode mode) {
    if (mode == Mode::Nat) return Value(parse_nat(text));
    if (!text.empty() && text.front() == '"') {
        try {
            return Value(nlohmann::json::parse(text).get<std::string>());
        } catch (const std::exception&) {
            throw UsageError("malformed string literal " + text);
        }
    }
    return Value(text);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(path + ": cannot read file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError(path + ": cannot write file");
}

std::optional<whilelang::WhileProgram> load_while(const std::string& file) {
    auto r = whilelang::parse_while(read_file(file), file);
    for (const auto& d : r.diagnostics) std::cerr << d.to_string() << "\n";
    return r.program;
}

void report_outcome(const Outcome& o) {
    if (o.kind == OutcomeKind::RuntimeError)
        std::cerr << "runtime error: " << to_string(o.error) << " at " << o.location << ": " << o.message << "\n";
    else if (o.kind == OutcomeKind::StepLimit)
        std::cerr << "step limit reached\n";
    else if (o.kind == OutcomeKind::Failure)
        std::cerr << "no solution\n";
}

struct RunFlags {
    std::string file;
    std::vector<std::string> vars;
    std::uint64_t limit = 1'000'000;
    std::string undo = "paper";
    std::string trace;
};

int cmd_run(const RunFlags& f) {
    auto c = load(f.file);
    if (!c) return kInvalid;
    RunOptions options;
    options.step_limit = f.limit;
    options.undo_mode = f.undo == "journal" ? UndoMode::Journal : UndoMode::Paper;

    std::vector<std::pair<std::string, Value>> initial;
    for (const auto& binding : f.vars) {
        const auto eq = binding.find('=');
        if (eq == std::string::npos) throw UsageError("expected name=value, got '" + binding + "'");
        initial.emplace_back(binding.substr(0, eq), parse_value(binding.substr(eq + 1), c->mode));
    }

    std::ofstream trace;
    if (!f.trace.empty()) {
        trace.open(f.trace, std::ios::binary);
        if (!trace) throw UsageError(f.trace + ": cannot write file");
    }
    Outcome o;
    try {
        // flushed per event so a killed run still leaves a readable prefix
        o = run(*c, initial, options, [&](const TraceEvent& e) {
            if (trace.is_open()) trace << to_json(e) << "\n" << std::flush;
        });
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (o.success()) {
        const Subnet& main = c->main_subnet();
        for (const auto* list : {&main.formals, &main.locals})
            for (const auto& name : *list) std::cout << name << "=" << o.env.get(name).to_string() << "\n";
    }
    report_outcome(o);
    return exit_code(o.kind);
}

int cmd_compute(const std::string& file, const std::string& args, std::uint64_t limit) {
    auto c = load(file);
    if (!c) return kInvalid;
    if (c->mode != Mode::Nat) throw UsageError("compute requires a nat-mode cinnamon");
    RunOptions options;
    options.step_limit = limit;
    const ComputeResult r = compute(*c, parse_args(args), options);
    if (r.defined()) {
        std::cout << r.value->str() << "\n";
        return kOk;
    }
    if (!r.message.empty()) std::cerr << r.message << "\n";
    return exit_code(r.cause);
}

int cmd_fuzz(const whilelang::CampaignOptions& options) {
    const auto summary = whilelang::run_campaign(options);
    for (const auto& c : summary.disagreements) {
        for (const auto& v : c.verdicts) {
            if (v.agree) continue;
            std::cout << "disagreement: seed=" << options.seed << " index=" << c.index << " inputs=";
            for (std::size_t i = 0; i < v.inputs.size(); ++i) std::cout << (i ? "," : "") << v.inputs[i].str();
            std::cout << " oracle=" << (v.oracle ? v.oracle->str() : "diverged")
                      << " compiled=" << (v.compiled ? v.compiled->str() : to_string(v.compiled_cause))
                      << " program=" << whilelang::print(v.program) << "\n";
        }
    }
    std::cout << "agree=" << summary.agree << " disagree=" << summary.disagree << "\n";
    return summary.disagree == 0 && summary.compiled_failures == 0 ? kOk : kRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cinnamon toolkit: validate, run and compile cinnamon programs"};
    app.require_subcommand(1);
    int code = kOk;

    std::string file, out, args;
    std::uint64_t limit = 1'000'000;

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a .cin file");
    validate_cmd->add_option("file", file, "Input .cin file")->required();
    validate_cmd->callback([&] { code = load(file) ? kOk : kInvalid; });

    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run a cinnamon and print the main subnet's variables");
    run_cmd->add_option("file", run_flags.file, "Input .cin file")->required();
    run_cmd->add_option("--var", run_flags.vars, "Initial value, name=value (repeatable)");
    run_cmd->add_option("--limit", run_flags.limit, "Step limit")->capture_default_str();
    run_cmd->add_option("--undo", run_flags.undo, "Undo mode")
        ->check(CLI::IsMember({"paper", "journal"}))
        ->capture_default_str();
    run_cmd->add_option("--trace", run_flags.trace, "Write a JSONL trace to this path");
    run_cmd->callback([&] { code = cmd_run(run_flags); });

    auto* compute_cmd = app.add_subcommand("compute", "Compute the j-ary function of a nat-mode cinnamon");
    compute_cmd->add_option("file", file, "Input .cin file")->required();
    compute_cmd->add_option("--args", args, "Comma-separated naturals");
    compute_cmd->add_option("--limit", limit, "Step limit")->capture_default_str();
    compute_cmd->callback([&] { code = cmd_compute(file, args, limit); });

    auto* dot_cmd = app.add_subcommand("dot", "Export Graphviz DOT");
    dot_cmd->add_option("file", file, "Input .cin file")->required();
    dot_cmd->add_option("-o,--output", out, "Output path (default: standard output)");
    dot_cmd->callback([&] {
        auto c = load(file);
        if (!c) {
            code = kInvalid;
            return;
        }
        write_file(out, export_dot(*c));
    });

    auto* compile_cmd = app.add_subcommand("compile-while", "Compile a .wh program to a .cin file");
    compile_cmd->add_option("file", file, "Input .wh file")->required();
    compile_cmd->add_option("-o,--output", out, "Output path (default: standard output)");
    compile_cmd->callback([&] {
        auto p = load_while(file);
        if (!p) {
            code = kInvalid;
            return;
        }
        write_file(out, print(whilelang::compile_while(*p)));
    });

    std::uint64_t fuel = 100'000;
    auto* run_while_cmd = app.add_subcommand("run-while", "Evaluate a .wh program with the reference interpreter");
    run_while_cmd->add_option("file", file, "Input .wh file")->required();
    run_while_cmd->add_option("--args", args, "Comma-separated naturals");
    run_while_cmd->add_option("--fuel", fuel, "Fuel: executed assignments plus while iterations")->capture_default_str();
    run_while_cmd->callback([&] {
        auto p = load_while(file);
        if (!p) {
            code = kInvalid;
            return;
        }
        auto v = whilelang::eval_while(*p, parse_args(args), fuel);
        if (v) {
            std::cout << v->str() << "\n";
        } else {
            std::cerr << "fuel exhausted\n";
            code = kLimit;
        }
    });

    whilelang::CampaignOptions campaign;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Differential test of the while compiler against the interpreter");
    fuzz_cmd->add_option("--seed", campaign.seed)->capture_default_str();
    fuzz_cmd->add_option("--count", campaign.count)->capture_default_str();
    fuzz_cmd->add_option("--size", campaign.size)->check(CLI::PositiveNumber)->capture_default_str();
    fuzz_cmd->add_option("--fuel", campaign.fuel)->capture_default_str();
    fuzz_cmd->callback([&] { code = cmd_fuzz(campaign); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return code;
}
