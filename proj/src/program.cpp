#include "cinnamon/interp.hpp"

#include <map>

namespace cinnamon {

namespace {

std::string summarize(const ValidationReport& report) {
    std::string msg = "cinnamon is ill formed";
    for (const auto& v : report) msg += "\n  " + v.rule + ": " + v.message;
    return msg;
}

} // namespace

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error(summarize(report)), report_(std::move(report)) {}

std::shared_ptr<const Program> Program::load(const Cinnamon& c) {
    if (auto report = validate(c); !report.empty()) throw ValidationError(std::move(report));

    std::shared_ptr<Program> p(new Program());
    p->source_ = c;
    p->normalized_ = normalize(expand_macros(c));
    p->variables_ = variable_order(c);

    std::map<std::string, int> slot_of, subnet_of, state_of;
    for (std::size_t i = 0; i < p->variables_.size(); ++i) slot_of[p->variables_[i]] = static_cast<int>(i);

    const auto& subnets = p->normalized_.subnets;
    for (std::size_t i = 0; i < subnets.size(); ++i) {
        subnet_of[subnets[i].name] = static_cast<int>(i);
        for (const auto& st : subnets[i].states) {
            state_of[st] = static_cast<int>(p->states_.size());
            p->states_.push_back({st, static_cast<int>(i), {}});
        }
    }
    p->main_ = subnet_of.at(c.main);

    auto operand_slot = [&](const std::string& var) { return Program::OperandSlot{slot_of.at(var), {}}; };

    for (std::size_t i = 0; i < subnets.size(); ++i) {
        const Subnet& s = subnets[i];
        SubnetInfo info{s.name, {}, state_of.at(s.init)};
        for (const auto& f : s.formals) info.formals.push_back(slot_of.at(f));
        p->subnets_.push_back(std::move(info));

        for (const auto& a : s.arrows) {
            ArrowInfo info_a;
            info_a.id = a.id;
            info_a.text = label_text(a.label);
            info_a.subnet = static_cast<int>(i);
            info_a.source = state_of.at(a.source);
            info_a.target.kind = a.target.kind;
            if (a.target.is_ordinary()) info_a.target.state = state_of.at(a.target.state);
            if (!a.label.empty()) {
                const LabelItem& item = a.label.front();
                if (const auto* prim = std::get_if<Primitive>(&item)) {
                    info_a.item.kind = Item::Kind::Prim;
                    info_a.item.prim = prim->kind;
                    for (const auto& op : prim->operands)
                        info_a.item.operands.push_back(op.is_var() ? operand_slot(op.text)
                                                                   : OperandSlot{-1, Value(op.text)});
                } else {
                    const auto& call = std::get<Call>(item);
                    info_a.item.kind = Item::Kind::Call;
                    info_a.item.callee = subnet_of.at(call.subnet);
                    for (const auto& act : call.actuals)
                        info_a.item.actuals.push_back(act.is_var() ? operand_slot(act.var)
                                                                   : OperandSlot{-1, act.constant});
                }
            }
            const int id = static_cast<int>(p->arrows_.size());
            p->states_[static_cast<std::size_t>(info_a.source)].out.push_back(id);
            p->arrows_.push_back(std::move(info_a));
        }
    }

    const std::size_t n = p->subnets_.size();
    p->reaches_.assign(n * n, false);
    for (std::size_t i = 0; i < n; ++i) p->reaches_[i * n + i] = true;
    for (const auto& a : p->arrows_)
        if (a.item.kind == Item::Kind::Call)
            p->reaches_[static_cast<std::size_t>(a.subnet) * n + static_cast<std::size_t>(a.item.callee)] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (p->reaches_[i * n + k])
                for (std::size_t j = 0; j < n; ++j)
                    if (p->reaches_[k * n + j]) p->reaches_[i * n + j] = true;
    return p;
}

Environment Program::initial_environment() const { return Environment(variables_, source_.mode); }

std::string Program::target_name(const Target& t) const {
    switch (t.kind) {
    case NodeRef::Kind::Finish: return "FINISH";
    case NodeRef::Kind::Return: return "RETURN";
    case NodeRef::Kind::Ordinary: break;
    }
    return states_[static_cast<std::size_t>(t.state)].id;
}

} // namespace cinnamon
