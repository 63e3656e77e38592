#include "cinnamon/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace cinnamon {

std::string ParseDiagnostic::to_string() const {
    std::ostringstream os;
    os << span.file << ":" << span.line << ":" << span.column << ": " << rule << ": " << message;
    return os.str();
}

namespace {

enum class Tok { Word, Symlit, Strlit, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text; // word, punctuation, or the decoded literal
    int line = 1;
    int column = 1;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct SyntaxError {
    ParseDiagnostic diagnostic;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {"cinnamon", "mode",  "nat",    "str",   "macro", "main",
                                             "subnet",   "vars",  "init",   "call",  "FINISH", "RETURN",
                                             "clear",    "copy",  "inc",    "if",    "sep",   "cons"};
    return kw;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

class Lexer {
public:
    Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            t.offset = pos_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Word;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    t.text += advance();
            } else if (c == '\'') {
                t.kind = Tok::Symlit;
                advance();
                if (pos_ >= text_.size() || text_[pos_] == '\n') fail(t, "unterminated symbol literal");
                if (text_[pos_] == '\\') advance();
                if (pos_ >= text_.size()) fail(t, "unterminated symbol literal");
                t.text = std::string(1, advance());
                if (pos_ >= text_.size() || text_[pos_] != '\'') fail(t, "symbol literal must hold exactly one symbol");
                advance();
            } else if (c == '"') {
                t.kind = Tok::Strlit;
                advance();
                for (;;) {
                    if (pos_ >= text_.size() || text_[pos_] == '\n') fail(t, "unterminated string literal");
                    char ch = advance();
                    if (ch == '"') break;
                    if (ch == '\\') {
                        if (pos_ >= text_.size()) fail(t, "unterminated string literal");
                        ch = advance();
                    }
                    t.text += ch;
                }
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                t.kind = Tok::Punct;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view("(){},:=").find(c) != std::string_view::npos) {
                t.kind = Tok::Punct;
                t.text = std::string(1, advance());
            } else {
                fail(t, std::string("unexpected character '") + c + "'");
            }
            t.length = pos_ - t.offset;
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) {
        throw SyntaxError{{ParseDiagnostic::Severity::Error, {file_, at.line, at.column, 1}, message, "syntax"}};
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string file) : toks_(std::move(tokens)), file_(std::move(file)) {}

    ParseResult run() {
        ParseResult result;
        Cinnamon c;
        expect_word("cinnamon");
        c.name = name("cinnamon name");
        expect_word("mode");
        const Token& m = next();
        if (m.kind == Tok::Word && m.text == "nat")
            c.mode = Mode::Nat;
        else if (m.kind == Tok::Word && m.text == "str")
            c.mode = Mode::Str;
        else
            syntax(m, "expected 'nat' or 'str'");
        mode_ = c.mode;

        while (is_word("macro")) c.macros.push_back(macro(c));
        const Token* first_main = nullptr;
        while (peek().kind != Tok::End) {
            bool is_main = false;
            const Token& start = peek();
            if (is_word("main")) {
                next();
                is_main = true;
            }
            Subnet s = subnet();
            if (c.find_subnet(s.name))
                error(start, "duplicate-decl", "subnet '" + s.name + "' is already declared");
            if (is_main) {
                if (first_main)
                    error(start, "main-count", "more than one subnet is marked main");
                else {
                    first_main = &start;
                    c.main = s.name;
                }
            }
            c.subnets.push_back(std::move(s));
        }
        if (c.subnets.empty()) syntax(peek(), "expected at least one subnet");
        if (!first_main) error(peek(), "main-count", "no subnet is marked main");

        result.diagnostics = std::move(diags_);
        if (result.diagnostics.empty()) result.cinnamon = std::move(c);
        return result;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool is_word(const char* w, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Word && peek(ahead).text == w;
    }
    bool is_punct(const char* p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }

    SourceSpan span_of(const Token& t) const {
        return {file_, t.line, t.column, static_cast<int>(std::max<std::size_t>(t.length, 1))};
    }

    [[noreturn]] void syntax(const Token& t, const std::string& message) {
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError{{ParseDiagnostic::Severity::Error, span_of(t), message + ", found " + found, "syntax"}};
    }

    void error(const Token& t, std::string rule, std::string message) {
        diags_.push_back({ParseDiagnostic::Severity::Error, span_of(t), std::move(message), std::move(rule)});
    }

    void expect_word(const char* w) {
        if (!is_word(w)) syntax(peek(), std::string("expected '") + w + "'");
        next();
    }
    void expect_punct(const char* p) {
        if (!is_punct(p)) syntax(peek(), std::string("expected '") + p + "'");
        next();
    }

    std::string name(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Word) syntax(t, std::string("expected ") + what);
        if (keywords().count(t.text)) syntax(t, std::string("reserved word cannot be used as ") + what);
        next();
        return t.text;
    }

    std::string variable_name() {
        const Token& t = peek();
        std::string n = name("variable name");
        if (all_digits(n)) error(t, "syntax", "variable name '" + n + "' must not be numeric");
        return n;
    }

    std::vector<std::string> params(std::vector<const Token*>* where = nullptr) {
        std::vector<std::string> out;
        if (peek().kind != Tok::Word) return out;
        for (;;) {
            if (where) where->push_back(&peek());
            out.push_back(variable_name());
            if (!is_punct(",")) break;
            next();
        }
        return out;
    }

    Macro macro(const Cinnamon& c) {
        const Token& start = next();
        Macro m;
        m.span = span_of(start);
        m.name = name("macro name");
        if (c.find_macro(m.name)) error(start, "duplicate-decl", "macro '" + m.name + "' is already declared");
        expect_punct("(");
        m.params = params();
        expect_punct(")");
        expect_punct("=");
        m.body.push_back(item(nullptr));
        while (is_punct(",")) {
            next();
            m.body.push_back(item(nullptr));
        }
        return m;
    }

    Subnet subnet() {
        const Token& start = peek();
        expect_word("subnet");
        Subnet s;
        s.span = span_of(start);
        s.name = name("subnet name");
        expect_punct("(");
        std::vector<const Token*> where;
        s.formals = params(&where);
        expect_punct(")");
        expect_punct("{");
        if (is_word("vars")) {
            next();
            s.locals = params(&where);
        }
        std::set<std::string> seen;
        std::size_t i = 0;
        for (const auto* v : {&s.formals, &s.locals})
            for (const auto& n : *v) {
                if (!seen.insert(n).second)
                    error(*where[i], "duplicate-decl", "variable '" + n + "' is already declared in '" + s.name + "'");
                ++i;
            }
        expect_word("init");
        const Token& init = peek();
        if (init.kind != Tok::Word) syntax(init, "expected initial state");
        if (keywords().count(init.text) && init.text != "FINISH" && init.text != "RETURN")
            syntax(init, "reserved word cannot be used as a state");
        s.init = next().text;

        current_ = &s;
        while (!is_punct("}")) s.arrows.push_back(arrow());
        next();
        current_ = nullptr;
        finalize(s);
        return s;
    }

    Arrow arrow() {
        const Token& start = peek();
        Arrow a;
        a.source = name("state name");
        expect_punct("->");
        const Token& t = peek();
        if (t.kind != Tok::Word) syntax(t, "expected target state");
        if (t.text == "FINISH")
            a.target = NodeRef::finish();
        else if (t.text == "RETURN")
            a.target = NodeRef::ret();
        else
            a.target = NodeRef::ordinary(name("state name"));
        if (a.target.kind != NodeRef::Kind::Ordinary) next();
        expect_punct(":");
        if (label_follows()) {
            a.label.push_back(item(current_));
            while (is_punct(",")) {
                next();
                a.label.push_back(item(current_));
            }
        }
        const Token& last = toks_[pos_ - 1];
        a.span = span_of(start);
        a.span.length = static_cast<int>(last.offset + last.length - start.offset);
        return a;
    }

    bool label_follows() const {
        if (is_punct("}") || peek().kind == Tok::End) return false;
        if (peek().kind == Tok::Word && is_punct("->", 1)) return false;
        return true;
    }

    void check_declared(const Token& t, const std::string& var, const Subnet* scope) {
        if (scope && !scope->declares(var))
            error(t, "undeclared-variable", "variable '" + var + "' is not declared in subnet '" + scope->name + "'");
    }

    Operand operand(const Subnet* scope, bool allow_symbol) {
        const Token& t = peek();
        if (t.kind == Tok::Symlit) {
            if (!allow_symbol) syntax(t, "symbol literal not allowed here");
            next();
            return Operand::symbol(t.text[0]);
        }
        std::string v = variable_name();
        check_declared(t, v, scope);
        return Operand::var(v);
    }

    Actual actual(const Subnet* scope) {
        const Token& t = peek();
        if (t.kind == Tok::Symlit || t.kind == Tok::Strlit) {
            next();
            if (mode_ != Mode::Str) error(t, "mode-mismatch", "string constant in a nat-mode cinnamon");
            return Actual::value(Value(t.text));
        }
        if (t.kind == Tok::Word && all_digits(t.text)) {
            next();
            if (mode_ != Mode::Nat) error(t, "mode-mismatch", "numeric constant in a str-mode cinnamon");
            return Actual::value(Value(Nat(t.text)));
        }
        std::string v = variable_name();
        check_declared(t, v, scope);
        return Actual::variable(v);
    }

    std::vector<Actual> actuals(const Subnet* scope) {
        std::vector<Actual> out;
        expect_punct("(");
        if (!is_punct(")")) {
            out.push_back(actual(scope));
            while (is_punct(",")) {
                next();
                out.push_back(actual(scope));
            }
        }
        expect_punct(")");
        return out;
    }

    Primitive primitive(const Token& at, PrimKind kind, const Subnet* scope) {
        if ((mode_ == Mode::Nat && is_str_only(kind)) || (mode_ == Mode::Str && is_nat_only(kind)))
            error(at, "mode-mismatch",
                  std::string(to_string(kind)) + " is not available in " + to_string(mode_) + " mode");
        Primitive p{kind, {}};
        expect_punct("(");
        for (std::size_t i = 0; i < arity(kind); ++i) {
            if (i) expect_punct(",");
            p.operands.push_back(operand(scope, kind == PrimKind::IfEq));
        }
        expect_punct(")");
        return p;
    }

    LabelItem item(const Subnet* scope) {
        const Token& t = peek();
        if (t.kind != Tok::Word) syntax(t, "expected a primitive, call or macro use");
        const std::string& w = t.text;
        if (w == "clear") return next(), primitive(t, PrimKind::Clear, scope);
        if (w == "copy") return next(), primitive(t, PrimKind::Copy, scope);
        if (w == "inc") return next(), primitive(t, PrimKind::Inc, scope);
        if (w == "sep") return next(), primitive(t, PrimKind::Sep, scope);
        if (w == "cons") return next(), primitive(t, PrimKind::Cons, scope);
        if (w == "if") {
            next();
            const Token& which = peek();
            if (which.kind == Tok::Word && which.text == "nonEq") return next(), primitive(t, PrimKind::IfNonEq, scope);
            if (which.kind == Tok::Word && which.text == "eq") return next(), primitive(t, PrimKind::IfEq, scope);
            if (which.kind == Tok::Word && which.text == "empty") return next(), primitive(t, PrimKind::IfEmpty, scope);
            syntax(which, "expected 'nonEq', 'eq' or 'empty' after 'if'");
        }
        if (w == "call") {
            next();
            Call c;
            c.subnet = name("subnet name");
            c.actuals = actuals(scope);
            return c;
        }
        MacroUse use;
        use.macro = name("macro name");
        use.args = actuals(scope);
        return use;
    }

    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
    Mode mode_ = Mode::Nat;
    const Subnet* current_ = nullptr;
    std::vector<ParseDiagnostic> diags_;
};

} // namespace

ParseResult parse(std::string_view text, const std::string& file) {
    try {
        return Parser(Lexer(text, file).run(), file).run();
    } catch (const SyntaxError& e) {
        ParseResult r;
        r.diagnostics.push_back(e.diagnostic);
        return r;
    }
}

ParseResult parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back(
            {ParseDiagnostic::Severity::Error, {path.string(), 0, 0, 0}, "cannot read file", "io"});
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

} // namespace cinnamon
