#include "cinnamon/while_lang.hpp"

#include <algorithm>
#include <cctype>

namespace cinnamon::whilelang {

using Kind = WhileProgram::Kind;

std::size_t WhileProgram::node_count() const {
    std::size_t n = 1;
    for (const auto& b : body) n += b.node_count();
    return n;
}

unsigned WhileProgram::max_variable() const {
    unsigned m = 0;
    switch (kind) {
    case Kind::AssignZero: m = x; break;
    case Kind::AssignSucc:
    case Kind::AssignCopy:
    case Kind::If:
    case Kind::While: m = std::max(x, y); break;
    case Kind::For: m = y; break;
    case Kind::Seq: break;
    }
    for (const auto& b : body) m = std::max(m, b.max_variable());
    return m;
}

namespace {

std::string var(unsigned i) { return "x" + std::to_string(i); }

} // namespace

std::string print(const WhileProgram& p) {
    switch (p.kind) {
    case Kind::AssignZero: return var(p.x) + " := 0";
    case Kind::AssignSucc: return var(p.x) + " := " + var(p.y) + " + 1";
    case Kind::AssignCopy: return var(p.x) + " := " + var(p.y);
    case Kind::Seq: return "{ " + print(p.body[0]) + " ; " + print(p.body[1]) + " }";
    case Kind::If:
        return "if " + var(p.x) + " < " + var(p.y) + " then " + print(p.body[0]) + " else " + print(p.body[1]);
    case Kind::For: return "for " + var(p.y) + " do " + print(p.body[0]);
    case Kind::While: return "while " + var(p.x) + " < " + var(p.y) + " do " + print(p.body[0]);
    }
    return {};
}

namespace {

struct WToken {
    enum class Kind { Var, Num, Word, Punct, End } kind = Kind::End;
    std::string text;
    unsigned index = 0;
    int line = 1;
    int column = 1;
};

struct WSyntaxError {
    ParseDiagnostic diagnostic;
};

class WhileParser {
public:
    WhileParser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) { lex(); }

    WhileProgram run() {
        WhileProgram p = prog();
        if (peek().kind != WToken::Kind::End) fail(peek(), "expected end of program");
        return p;
    }

private:
    void lex() {
        std::size_t i = 0;
        int line = 1, col = 1;
        auto bump = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k) {
                if (text_[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
                ++i;
            }
        };
        while (true) {
            while (i < text_.size()) {
                if (text_[i] == '#') {
                    while (i < text_.size() && text_[i] != '\n') bump(1);
                } else if (std::isspace(static_cast<unsigned char>(text_[i]))) {
                    bump(1);
                } else {
                    break;
                }
            }
            WToken t;
            t.line = line;
            t.column = col;
            if (i >= text_.size()) {
                toks_.push_back(t);
                return;
            }
            const char c = text_[i];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < text_.size() && std::isalnum(static_cast<unsigned char>(text_[j]))) ++j;
                t.text = std::string(text_.substr(i, j - i));
                t.kind = WToken::Kind::Word;
                if (t.text.size() > 1 && t.text[0] == 'x' &&
                    std::all_of(t.text.begin() + 1, t.text.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
                    t.kind = WToken::Kind::Var;
                    try {
                        t.index = static_cast<unsigned>(std::stoul(t.text.substr(1)));
                    } catch (const std::exception&) {
                        fail(t, "variable index out of range");
                    }
                }
                bump(j - i);
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                t.kind = WToken::Kind::Num;
                t.text = std::string(text_.substr(i, j - i));
                bump(j - i);
            } else if (c == ':' && i + 1 < text_.size() && text_[i + 1] == '=') {
                t.kind = WToken::Kind::Punct;
                t.text = ":=";
                bump(2);
            } else if (std::string_view("{};<+").find(c) != std::string_view::npos) {
                t.kind = WToken::Kind::Punct;
                t.text = std::string(1, c);
                bump(1);
            } else {
                t.text = std::string(1, c);
                fail(t, "unexpected character");
            }
            toks_.push_back(std::move(t));
        }
    }

    const WToken& peek() const { return toks_[pos_]; }
    const WToken& next() {
        const WToken& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const WToken& t, const std::string& message) {
        std::string found = t.kind == WToken::Kind::End ? "end of input" : "'" + t.text + "'";
        throw WSyntaxError{{ParseDiagnostic::Severity::Error,
                            {file_, t.line, t.column, static_cast<int>(std::max<std::size_t>(t.text.size(), 1))},
                            message + ", found " + found,
                            "syntax"}};
    }

    bool at(WToken::Kind k, const char* text = nullptr) const {
        return peek().kind == k && (!text || peek().text == text);
    }
    void expect(WToken::Kind k, const char* text) {
        if (!at(k, text)) fail(peek(), std::string("expected '") + text + "'");
        next();
    }
    unsigned variable() {
        if (!at(WToken::Kind::Var)) fail(peek(), "expected a variable x<n>");
        return next().index;
    }

    WhileProgram prog() {
        if (at(WToken::Kind::Var)) {
            unsigned x = next().index;
            expect(WToken::Kind::Punct, ":=");
            if (at(WToken::Kind::Num)) {
                if (peek().text != "0") fail(peek(), "only the constant 0 can be assigned");
                next();
                return WhileProgram::zero(x);
            }
            unsigned y = variable();
            if (at(WToken::Kind::Punct, "+")) {
                next();
                if (!at(WToken::Kind::Num) || peek().text != "1") fail(peek(), "expected '1'");
                next();
                return WhileProgram::succ(x, y);
            }
            return WhileProgram::copy(x, y);
        }
        if (at(WToken::Kind::Punct, "{")) {
            next();
            std::vector<WhileProgram> parts;
            parts.push_back(prog());
            while (at(WToken::Kind::Punct, ";")) {
                next();
                parts.push_back(prog());
            }
            if (parts.size() < 2) fail(peek(), "expected ';'");
            expect(WToken::Kind::Punct, "}");
            WhileProgram p = std::move(parts.back());
            for (std::size_t i = parts.size() - 1; i-- > 0;) p = WhileProgram::seq(std::move(parts[i]), std::move(p));
            return p;
        }
        if (at(WToken::Kind::Word, "if")) {
            next();
            unsigned x = variable();
            expect(WToken::Kind::Punct, "<");
            unsigned y = variable();
            expect(WToken::Kind::Word, "then");
            WhileProgram p = prog();
            expect(WToken::Kind::Word, "else");
            WhileProgram q = prog();
            return WhileProgram::if_less(x, y, std::move(p), std::move(q));
        }
        if (at(WToken::Kind::Word, "for")) {
            next();
            unsigned y = variable();
            expect(WToken::Kind::Word, "do");
            return WhileProgram::for_loop(y, prog());
        }
        if (at(WToken::Kind::Word, "while")) {
            next();
            unsigned x = variable();
            expect(WToken::Kind::Punct, "<");
            unsigned y = variable();
            expect(WToken::Kind::Word, "do");
            return WhileProgram::while_less(x, y, prog());
        }
        fail(peek(), "expected a statement");
    }

    std::string_view text_;
    std::string file_;
    std::vector<WToken> toks_;
    std::size_t pos_ = 0;
};

class Evaluator {
public:
    Evaluator(std::vector<Nat> vars, std::uint64_t fuel) : vars_(std::move(vars)), fuel_(fuel) {}

    bool exec(const WhileProgram& p) {
        switch (p.kind) {
        case Kind::AssignZero: return tick() && (vars_[p.x] = 0, true);
        case Kind::AssignSucc: return tick() && (vars_[p.x] = vars_[p.y] + 1, true);
        case Kind::AssignCopy: return tick() && (vars_[p.x] = vars_[p.y], true);
        case Kind::Seq: return exec(p.body[0]) && exec(p.body[1]);
        case Kind::If: return vars_[p.x] < vars_[p.y] ? exec(p.body[0]) : exec(p.body[1]);
        case Kind::For:
            for (Nat n = vars_[p.y]; n > 0; --n)
                if (!exec(p.body[0])) return false;
            return true;
        case Kind::While:
            // each iteration is charged too, so loops whose bodies assign nothing still run out
            while (vars_[p.x] < vars_[p.y])
                if (!tick() || !exec(p.body[0])) return false;
            return true;
        }
        return false;
    }

    const Nat& output() const { return vars_[0]; }

private:
    bool tick() {
        if (used_ == fuel_) return false;
        ++used_;
        return true;
    }

    std::vector<Nat> vars_;
    std::uint64_t fuel_;
    std::uint64_t used_ = 0;
};

} // namespace

WhileParseResult parse_while(std::string_view text, const std::string& file) {
    WhileParseResult r;
    try {
        r.program = WhileParser(text, file).run();
    } catch (const WSyntaxError& e) {
        r.diagnostics.push_back(e.diagnostic);
    }
    return r;
}

std::optional<Nat> eval_while(const WhileProgram& p, const std::vector<Nat>& args, std::uint64_t fuel) {
    std::vector<Nat> vars(p.max_variable() + 1, Nat(0));
    for (std::size_t i = 1; i < vars.size() && i <= args.size(); ++i) vars[i] = args[i - 1];
    Evaluator ev(std::move(vars), fuel);
    if (!ev.exec(p)) return std::nullopt;
    return ev.output();
}

} // namespace cinnamon::whilelang
