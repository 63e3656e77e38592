#include "cinnamon/dsl.hpp"

#include <map>
#include <sstream>

namespace cinnamon {

namespace {

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += xs[i];
    }
    return out;
}

std::string dot_id(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string print(const Cinnamon& c) {
    std::ostringstream os;
    os << "cinnamon " << c.name << " mode " << to_string(c.mode) << "\n";
    if (!c.macros.empty()) os << "\n";
    for (const auto& m : c.macros) os << "macro " << m.name << "(" << join(m.params) << ") = " << label_text(m.body) << "\n";
    for (const auto& s : c.subnets) {
        os << "\n";
        if (s.name == c.main) os << "main ";
        os << "subnet " << s.name << "(" << join(s.formals) << ") {\n";
        if (!s.locals.empty()) os << "  vars " << join(s.locals) << "\n";
        os << "  init " << s.init << "\n";
        for (const auto& a : s.arrows) {
            os << "  " << a.source << " -> " << a.target.to_string() << " :";
            if (!a.label.empty()) os << " " << label_text(a.label);
            os << "\n";
        }
        os << "}\n";
    }
    return os.str();
}

std::string export_dot(const Cinnamon& c) {
    std::ostringstream os;
    os << "digraph " << dot_id(c.name) << " {\n";
    os << "  compound=true;\n";
    for (const auto& s : c.subnets) {
        const std::string prefix = s.name + "::";
        os << "  subgraph " << dot_id("cluster_" + s.name) << " {\n";
        os << "    label=" << dot_id(s.name + "(" + join(s.formals) + ")" + (s.name == c.main ? " [main]" : "")) << ";\n";
        for (const auto& st : s.states)
            os << "    " << dot_id(prefix + st) << " [label=" << dot_id(st)
               << ", shape=" << (st == s.init ? "doublecircle" : "circle") << "];\n";

        std::map<std::string, int> position;
        int system_nodes = 0;
        for (const auto& a : s.arrows) {
            std::string target;
            if (a.target.is_ordinary()) {
                target = dot_id(prefix + a.target.state);
            } else {
                // one system node per arrow that reaches it
                const bool finish = a.target.kind == NodeRef::Kind::Finish;
                target = dot_id(prefix + a.target.to_string() + "#" + std::to_string(++system_nodes));
                os << "    " << target << " [label=" << dot_id(a.target.to_string())
                   << (finish ? ", shape=box" : ", shape=box3d") << "];\n";
            }
            const int k = ++position[a.source];
            std::string text = std::to_string(k) + ":";
            if (!a.label.empty()) text += " " + label_text(a.label);
            os << "    " << dot_id(prefix + a.source) << " -> " << target << " [label=" << dot_id(text) << "];\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace cinnamon
