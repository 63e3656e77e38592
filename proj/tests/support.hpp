#pragma once

#include "cinnamon/core.hpp"
#include "cinnamon/dsl.hpp"
#include "cinnamon/interp.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path fixture_path(const std::string& name) { return std::filesystem::path(FIXTURES_DIR) / name; }
inline std::filesystem::path golden_path(const std::string& name) { return std::filesystem::path(GOLDEN_DIR) / name; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline cinnamon::Cinnamon load_fixture(const std::string& name) {
    auto r = cinnamon::parse_file(fixture_path(name));
    if (!r.ok()) {
        std::string msg;
        for (const auto& d : r.diagnostics) msg += d.to_string() + "\n";
        throw std::runtime_error("fixture " + name + " does not parse:\n" + msg);
    }
    return *r.cinnamon;
}

inline const std::vector<std::string>& valid_fixtures() {
    static const std::vector<std::string> names = {"systems.cin", "subtract.cin", "compose.cin",
                                                   "recognizer.cin", "recognizer_expanded.cin", "backtrack.cin"};
    return names;
}

// Event kinds and arrow ids, e.g. "prim_fwd 10.2".
inline std::vector<std::string> projection(const std::vector<cinnamon::TraceEvent>& trace) {
    std::vector<std::string> out;
    for (const auto& e : trace) out.push_back(std::string(to_string(e.kind)) + (e.arrow ? " " + *e.arrow : ""));
    return out;
}

// Recursive-descent checker for the DOT language (graph, subgraph, node,
// edge and attribute statements). Returns an empty string when well formed.
class DotChecker {
public:
    explicit DotChecker(std::string text) : text_(std::move(text)) {}

    std::string check() {
        try {
            lex();
            graph();
            if (pos_ != toks_.size()) fail("trailing input");
        } catch (const std::runtime_error& e) {
            return e.what();
        }
        return {};
    }

    std::size_t clusters() const { return clusters_; }
    const std::vector<std::string>& node_ids() const { return nodes_; }
    std::size_t edges() const { return edges_; }

private:
    struct Tok {
        enum Kind { Id, Punct, Edge } kind;
        std::string text;
        bool keyword_ok = true; // false for quoted strings
    };

    [[noreturn]] void fail(const std::string& why) const {
        throw std::runtime_error(why + " at token " + std::to_string(pos_));
    }

    void lex() {
        std::size_t i = 0;
        while (i < text_.size()) {
            const char c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '/' && i + 1 < text_.size() && text_[i + 1] == '/') {
                while (i < text_.size() && text_[i] != '\n') ++i;
            } else if (c == '"') {
                std::string s;
                ++i;
                while (true) {
                    if (i >= text_.size()) throw std::runtime_error("unterminated string");
                    if (text_[i] == '\\' && i + 1 < text_.size()) {
                        s += text_[i];
                        s += text_[i + 1];
                        i += 2;
                    } else if (text_[i] == '"') {
                        ++i;
                        break;
                    } else {
                        s += text_[i++];
                    }
                }
                toks_.push_back({Tok::Id, s, false});
            } else if (c == '-' && i + 1 < text_.size() && (text_[i + 1] == '>' || text_[i + 1] == '-')) {
                toks_.push_back({Tok::Edge, text_.substr(i, 2)});
                i += 2;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
                std::size_t j = i;
                while (j < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_' || text_[j] == '.'))
                    ++j;
                if (j == i) ++j;
                toks_.push_back({Tok::Id, text_.substr(i, j - i)});
                i = j;
            } else if (std::string_view("{}[]=;,:").find(c) != std::string_view::npos) {
                toks_.push_back({Tok::Punct, std::string(1, c)});
                ++i;
            } else {
                throw std::runtime_error(std::string("unexpected character '") + c + "'");
            }
        }
    }

    bool at_punct(const char* p) const { return pos_ < toks_.size() && toks_[pos_].kind == Tok::Punct && toks_[pos_].text == p; }
    bool at_keyword(const char* k) const {
        return pos_ < toks_.size() && toks_[pos_].kind == Tok::Id && toks_[pos_].keyword_ok && toks_[pos_].text == k;
    }
    bool at_id() const { return pos_ < toks_.size() && toks_[pos_].kind == Tok::Id; }
    void expect_punct(const char* p) {
        if (!at_punct(p)) fail(std::string("expected '") + p + "'");
        ++pos_;
    }
    std::string id() {
        if (!at_id()) fail("expected an ID");
        return toks_[pos_++].text;
    }

    void graph() {
        if (at_keyword("strict")) ++pos_;
        if (at_keyword("digraph")) directed_ = true;
        else if (!at_keyword("graph")) fail("expected 'graph' or 'digraph'");
        ++pos_;
        if (at_id()) ++pos_;
        expect_punct("{");
        stmt_list();
        expect_punct("}");
    }

    void stmt_list() {
        while (pos_ < toks_.size() && !at_punct("}")) {
            stmt();
            if (at_punct(";")) ++pos_;
        }
    }

    void attr_list() {
        while (at_punct("[")) {
            ++pos_;
            while (!at_punct("]")) {
                id();
                expect_punct("=");
                id();
                if (at_punct(";") || at_punct(",")) ++pos_;
            }
            ++pos_;
        }
    }

    void subgraph() {
        if (at_keyword("subgraph")) {
            ++pos_;
            if (at_id()) {
                if (toks_[pos_].text.rfind("cluster", 0) == 0) ++clusters_;
                ++pos_;
            }
        }
        expect_punct("{");
        stmt_list();
        expect_punct("}");
    }

    void node_id() {
        nodes_.push_back(id());
        if (at_punct(":")) {
            ++pos_;
            id();
            if (at_punct(":")) {
                ++pos_;
                id();
            }
        }
    }

    void stmt() {
        if (at_keyword("graph") || at_keyword("node") || at_keyword("edge")) {
            ++pos_;
            if (!at_punct("[")) fail("expected attribute list");
            attr_list();
            return;
        }
        if (at_keyword("subgraph") || at_punct("{")) {
            subgraph();
        } else {
            const std::size_t before = pos_;
            id();
            if (at_punct("=")) {
                ++pos_;
                id();
                return;
            }
            pos_ = before;
            node_id();
        }
        while (pos_ < toks_.size() && toks_[pos_].kind == Tok::Edge) {
            if ((toks_[pos_].text == "->") != directed_) fail("edge operator does not match graph kind");
            ++pos_;
            ++edges_;
            if (at_keyword("subgraph") || at_punct("{")) subgraph();
            else node_id();
        }
        attr_list();
    }

    std::string text_;
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    std::size_t clusters_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::string> nodes_;
};

// All sentences of E -> E + E | E * E | a | b | c up to a length bound, by
// breadth-first expansion of leftmost nonterminals.
inline std::set<std::string> expression_language(std::size_t max_len) {
    std::set<std::string> sentences;
    std::set<std::string> seen;
    std::vector<std::string> frontier = {"E"};
    static const std::vector<std::string> rules = {"E+E", "E*E", "a", "b", "c"};
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const auto& form : frontier) {
            const auto at = form.find('E');
            if (at == std::string::npos) {
                sentences.insert(form);
                continue;
            }
            for (const auto& r : rules) {
                std::string derived = form.substr(0, at) + r + form.substr(at + 1);
                // every symbol, E included, yields at least one terminal
                if (derived.size() > max_len) continue;
                if (seen.insert(derived).second) next.push_back(std::move(derived));
            }
        }
        frontier = std::move(next);
    }
    return sentences;
}

} // namespace testing
