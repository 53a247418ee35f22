#ifndef TABADV_CONSTRAINTS_PARSER_HPP
#define TABADV_CONSTRAINTS_PARSER_HPP

// Constraint language, one constraint per line:
//
//   [name ':'] or_expr
//   or_expr   := and_expr ('or' and_expr)*
//   and_expr  := atom ('and' atom)*
//   atom      := '(' or_expr ')' | sum REL sum | sum 'in' '{' sum (',' sum)* '}'
//   sum       := product (('+' | '-') product)*
//   product   := unary (('*' | '/') unary)*
//   unary     := '-' unary | NUMBER | 'F[' name ']' | 'X0[' name ']' | '(' sum ')'
//
// '#' starts a comment. Unnamed constraints are called c1, c2, ... by position.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tabadv/constraints/constraint_set.hpp"

namespace tabadv {

namespace detail {

enum class Tok {
    number, ident, feature, original,
    plus, minus, star, slash,
    rel, kw_and, kw_or, kw_in,
    lparen, rparen, lbrace, rbrace, comma, colon,
    newline, end
};

struct Token {
    Tok kind;
    std::string text; ///< identifier / feature name / raw number
    double number = 0.0;
    Relation rel = Relation::eq;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blanks();
            Token t{Tok::end, {}, 0.0, Relation::eq, line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (c == '\n') {
                advance();
                t.kind = Tok::newline;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                                       std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_word(t);
            } else if (!lex_symbol(t)) {
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
                ++col_;
            }
            ++pos_;
        }
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_blanks() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                advance(look - pos_);
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            }
        }
        t.kind = Tok::number;
        t.text = std::string(src_.substr(start, pos_ - start));
        auto v = parse_double(t.text);
        if (!v) {
            throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
        }
        t.number = *v;
    }

    void lex_word(Token& t) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            advance();
        }
        const std::string word(src_.substr(start, pos_ - start));
        if ((word == "F" || word == "X0") && pos_ < src_.size() && src_[pos_] == '[') {
            advance();
            const std::size_t name_start = pos_;
            while (pos_ < src_.size() && src_[pos_] != ']' && src_[pos_] != '\n') advance();
            if (pos_ >= src_.size() || src_[pos_] != ']') {
                throw ParseError("unterminated feature reference", t.line, t.column);
            }
            std::string name(src_.substr(name_start, pos_ - name_start));
            advance();
            while (!name.empty() && name.front() == ' ') name.erase(name.begin());
            while (!name.empty() && name.back() == ' ') name.pop_back();
            t.kind = word == "F" ? Tok::feature : Tok::original;
            t.text = std::move(name);
            return;
        }
        t.text = word;
        if (word == "and") t.kind = Tok::kw_and;
        else if (word == "or") t.kind = Tok::kw_or;
        else if (word == "in") t.kind = Tok::kw_in;
        else t.kind = Tok::ident;
    }

    bool lex_symbol(Token& t) {
        struct Sym {
            std::string_view text;
            Tok kind;
            Relation rel;
        };
        // Longest match first.
        static constexpr Sym table[] = {
            {"<=", Tok::rel, Relation::le}, {">=", Tok::rel, Relation::ge}, {"!=", Tok::rel, Relation::ne},
            {"==", Tok::rel, Relation::eq}, {"≤", Tok::rel, Relation::le}, {"≥", Tok::rel, Relation::ge},
            {"≠", Tok::rel, Relation::ne}, {"∧", Tok::kw_and, Relation::eq},
            {"∨", Tok::kw_or, Relation::eq}, {"∈", Tok::kw_in, Relation::eq},
            {"<", Tok::rel, Relation::lt}, {">", Tok::rel, Relation::gt}, {"=", Tok::rel, Relation::eq},
            {"+", Tok::plus, Relation::eq}, {"-", Tok::minus, Relation::eq}, {"*", Tok::star, Relation::eq},
            {"/", Tok::slash, Relation::eq}, {"(", Tok::lparen, Relation::eq}, {")", Tok::rparen, Relation::eq},
            {"{", Tok::lbrace, Relation::eq}, {"}", Tok::rbrace, Relation::eq}, {",", Tok::comma, Relation::eq},
            {":", Tok::colon, Relation::eq},
        };
        for (const auto& s : table) {
            if (starts_with(s.text)) {
                t.kind = s.kind;
                t.rel = s.rel;
                t.text = std::string(s.text);
                advance(s.text.size());
                return true;
            }
        }
        return false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const Schema& schema) : toks_(std::move(tokens)), schema_(schema) {}

    std::vector<NamedConstraint> run() {
        std::vector<NamedConstraint> out;
        for (;;) {
            while (peek().kind == Tok::newline) ++pos_;
            if (peek().kind == Tok::end) return out;
            std::string name;
            if (peek().kind == Tok::ident && peek(1).kind == Tok::colon) {
                name = peek().text;
                pos_ += 2;
            } else {
                name = "c" + std::to_string(out.size() + 1);
            }
            auto expr = parse_or();
            if (peek().kind != Tok::newline && peek().kind != Tok::end) {
                fail("expected end of constraint");
            }
            out.push_back({std::move(name), std::move(expr), false});
        }
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string where;
        switch (t.kind) {
        case Tok::end: where = " at end of input"; break;
        case Tok::newline: where = " at end of line"; break;
        default: where = " near '" + t.text + "'"; break;
        }
        throw ParseError(what + where, t.line, t.column);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what);
        ++pos_;
    }

    ConstraintPtr parse_or() {
        auto lhs = parse_and();
        while (peek().kind == Tok::kw_or) {
            ++pos_;
            lhs = disj(lhs, parse_and());
        }
        return lhs;
    }

    ConstraintPtr parse_and() {
        auto lhs = parse_atom();
        while (peek().kind == Tok::kw_and) {
            ++pos_;
            lhs = conj(lhs, parse_atom());
        }
        return lhs;
    }

    /// True when the parenthesis at pos_ opens a constraint group rather
    /// than a numeric sub-expression.
    bool paren_is_group() const {
        int depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            const Tok k = toks_[i].kind;
            if (k == Tok::lparen) ++depth;
            else if (k == Tok::rparen && --depth == 0) return false;
            else if (k == Tok::newline || k == Tok::end) return false;
            else if (k == Tok::rel || k == Tok::kw_and || k == Tok::kw_or || k == Tok::kw_in) return true;
        }
        return false;
    }

    ConstraintPtr parse_atom() {
        if (peek().kind == Tok::lparen && paren_is_group()) {
            ++pos_;
            auto inner = parse_or();
            expect(Tok::rparen, "')'");
            return inner;
        }
        auto lhs = parse_sum();
        if (peek().kind == Tok::rel) {
            const Relation rel = peek().rel;
            ++pos_;
            return compare(rel, lhs, parse_sum());
        }
        if (peek().kind == Tok::kw_in) {
            ++pos_;
            expect(Tok::lbrace, "'{'");
            std::vector<NumericPtr> set;
            set.push_back(parse_sum());
            while (peek().kind == Tok::comma) {
                ++pos_;
                set.push_back(parse_sum());
            }
            expect(Tok::rbrace, "'}'");
            return membership(lhs, std::move(set));
        }
        fail("expected comparison operator or 'in'");
    }

    NumericPtr parse_sum() {
        auto lhs = parse_product();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const ArithOp op = peek().kind == Tok::plus ? ArithOp::add : ArithOp::sub;
            ++pos_;
            lhs = binary(op, lhs, parse_product());
        }
        return lhs;
    }

    NumericPtr parse_product() {
        auto lhs = parse_unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const ArithOp op = peek().kind == Tok::star ? ArithOp::mul : ArithOp::div;
            ++pos_;
            lhs = binary(op, lhs, parse_unary());
        }
        return lhs;
    }

    NumericPtr parse_unary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::minus:
            ++pos_;
            if (peek().kind == Tok::number) {
                const double v = peek().number;
                ++pos_;
                return constant(-v);
            }
            return binary(ArithOp::sub, constant(0.0), parse_unary());
        case Tok::number:
            ++pos_;
            return constant(t.number);
        case Tok::feature:
        case Tok::original: {
            auto idx = schema_.find(t.text);
            if (!idx) {
                throw ParseError("unknown feature '" + t.text + "'", t.line, t.column);
            }
            ++pos_;
            return t.kind == Tok::feature ? feature(*idx) : original(*idx);
        }
        case Tok::lparen: {
            ++pos_;
            auto inner = parse_sum();
            expect(Tok::rparen, "')'");
            return inner;
        }
        default:
            fail("expected expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Schema& schema_;
};

} // namespace detail

/// Parses constraint source text against `schema` and links the result.
inline ConstraintSet parse_constraints(std::string_view text, SchemaPtr schema,
                                       double strict_margin = default_strict_margin,
                                       double satisfaction_tol = default_satisfaction_tol) {
    auto tokens = detail::Lexer(text).run();
    auto constraints = detail::Parser(std::move(tokens), *schema).run();
    return ConstraintSet(std::move(schema), std::move(constraints), strict_margin, satisfaction_tol);
}

inline ConstraintSet load_constraints(const std::filesystem::path& path, SchemaPtr schema,
                                      double strict_margin = default_strict_margin,
                                      double satisfaction_tol = default_satisfaction_tol) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open constraint file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_constraints(buf.str(), std::move(schema), strict_margin, satisfaction_tol);
    } catch (const ParseError& e) {
        throw ParseError(path.string(), e);
    }
}

/// Canonical source form: one "name: constraint" per line.
inline std::string to_source(const ConstraintSet& set) {
    std::string out;
    for (const auto& c : set.constraints()) {
        out += c.name + ": " + to_string(*c.expr, set.schema()) + "\n";
    }
    return out;
}

} // namespace tabadv

#endif
