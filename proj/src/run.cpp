#include "cinnamon/interp.hpp"

#include "json.hpp"

#include <sstream>

namespace cinnamon {

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::TryArrow: return "try_arrow";
    case EventKind::PrimFwd: return "prim_fwd";
    case EventKind::PrimBwd: return "prim_bwd";
    case EventKind::PrimFail: return "prim_fail";
    case EventKind::Call: return "call";
    case EventKind::Return: return "return";
    case EventKind::ReenterBwd: return "reenter_bwd";
    case EventKind::UncallBwd: return "uncall_bwd";
    case EventKind::HaltSuccess: return "halt_success";
    case EventKind::HaltFailure: return "halt_failure";
    case EventKind::HaltLimit: return "halt_limit";
    case EventKind::RuntimeError: return "runtime_error";
    }
    return "?";
}

const char* to_string(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::Success: return "Success";
    case OutcomeKind::Failure: return "Failure";
    case OutcomeKind::StepLimit: return "StepLimit";
    case OutcomeKind::RuntimeError: return "RuntimeError";
    }
    return "?";
}

namespace {

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Naturals are written as bare JSON numbers of any length.
std::string json_value(const Value& v) { return v.is_nat() ? v.nat().str() : json_string(v.str()); }

} // namespace

std::string to_json(const TraceEvent& e) {
    std::ostringstream os;
    os << "{\"step\":" << e.step << ",\"mode\":\"" << (e.forward ? "fwd" : "bwd") << "\",\"kind\":\""
       << to_string(e.kind) << "\",\"subnet\":" << json_string(e.subnet);
    if (e.arrow) os << ",\"arrow\":" << json_string(*e.arrow);
    os << ",\"from\":" << json_string(e.from);
    if (e.to) os << ",\"to\":" << json_string(*e.to);
    os << ",\"writes\":[";
    for (std::size_t i = 0; i < e.writes.size(); ++i) {
        if (i) os << ",";
        const auto& w = e.writes[i];
        os << "{\"var\":" << json_string(w.var) << ",\"old\":" << json_value(w.old_value)
           << ",\"new\":" << json_value(w.new_value) << "}";
    }
    os << "]}";
    return os.str();
}

namespace {

Environment initial_env(const Program& p, const std::vector<std::pair<std::string, Value>>& initial) {
    Environment env = p.initial_environment();
    for (const auto& [name, value] : initial) {
        if (!env.contains(name)) throw std::invalid_argument("unknown variable '" + name + "'");
        if (value.mode() != p.mode())
            throw std::invalid_argument("value for '" + name + "' does not match mode " + to_string(p.mode()));
        env.set(name, value);
    }
    return env;
}

} // namespace

Outcome run(const Cinnamon& c, const std::vector<std::pair<std::string, Value>>& initial, const RunOptions& options,
            const EventSink& sink) {
    auto program = Program::load(c);
    Machine m(program, initial_env(*program, initial), options);
    return m.run(sink);
}

RunResult run(const Cinnamon& c, const std::vector<std::pair<std::string, Value>>& initial,
              const RunOptions& options) {
    RunResult r;
    r.outcome = run(c, initial, options, [&](const TraceEvent& e) { r.trace.push_back(e); });
    return r;
}

ComputeResult compute(const std::shared_ptr<const Program>& program, const std::vector<Nat>& args,
                      const RunOptions& options, const EventSink& sink) {
    if (program->mode() != Mode::Nat) throw std::invalid_argument("compute requires a nat-mode cinnamon");
    Environment env = program->initial_environment();
    const std::size_t n = env.size();
    for (std::size_t i = 1; i <= args.size() && i + 1 <= n; ++i) env.at(i) = Value(args[i - 1]);

    Machine m(program, std::move(env), options);
    const Outcome& out = m.run(sink);
    ComputeResult r;
    r.cause = out.kind;
    r.message = out.message;
    if (out.success() && n > 0) r.value = out.env.at(0).nat();
    else if (out.success()) r.value = Nat(0);
    return r;
}

ComputeResult compute(const Cinnamon& c, const std::vector<Nat>& args, const RunOptions& options) {
    return compute(Program::load(c), args, options);
}

} // namespace cinnamon
