#pragma once

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyrank/program.hpp"

namespace polyrank {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int col, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + message),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_, col_;
};

namespace detail {

struct Token {
    enum class Type { Ident, Number, Symbol, End };
    Type type = Type::End;
    std::string text;
    Rational value;
    int line = 0, col = 0;
};

inline std::vector<Token> lex(const std::string& source) {
    std::vector<Token> tokens;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (source[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < source.size()) {
        char c = source[i];
        if (c == '#') {
            while (i < source.size() && source[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < source.size() &&
                   (std::isalnum(static_cast<unsigned char>(source[j])) || source[j] == '_'))
                ++j;
            tok.type = Token::Type::Ident;
            tok.text = source.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < source.size() && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            if (j < source.size() && (source[j] == '.' || source[j] == '/')) {
                std::size_t k = j + 1;
                while (k < source.size() && std::isdigit(static_cast<unsigned char>(source[k])))
                    ++k;
                if (k > j + 1) j = k;
            }
            tok.type = Token::Type::Number;
            tok.text = source.substr(i, j - i);
            try {
                tok.value = parse_rational(tok.text);
            } catch (const std::exception& e) {
                throw ParseError(line, col, e.what());
            }
            advance(j - i);
        } else {
            static const char* two_char[] = {":=", "<=", ">="};
            std::string pair = source.substr(i, 2);
            bool matched = false;
            for (const char* t : two_char) {
                if (pair == t) {
                    tok.type = Token::Type::Symbol;
                    tok.text = t;
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                static const std::string singles = "<>=()[]{},;:+-*^";
                if (singles.find(c) == std::string::npos)
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
                tok.type = Token::Type::Symbol;
                tok.text = std::string(1, c);
                advance(1);
            }
        }
        tokens.push_back(std::move(tok));
    }
    Token end;
    end.type = Token::Type::End;
    end.line = line;
    end.col = col;
    tokens.push_back(end);
    return tokens;
}

class ProgramParser {
public:
    explicit ProgramParser(const std::string& source) : tokens_(lex(source)) {}

    Program parse() {
        while (is_keyword("dist") || is_keyword("init")) parse_header();
        if (program_.variables.empty()) fail("program declares no variables (use 'init x = c')");
        program_.body = parse_seq();
        expect_end();
        return program_;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Program program_;
    std::set<std::string> pvars_, rvars_;

    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = tokens_[pos_];
        throw ParseError(t.line, t.col, message);
    }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    bool is_symbol(const std::string& s) const {
        return peek().type == Token::Type::Symbol && peek().text == s;
    }

    bool is_keyword(const std::string& kw) const {
        return peek().type == Token::Type::Ident && peek().text == kw;
    }

    bool accept_symbol(const std::string& s) {
        if (!is_symbol(s)) return false;
        ++pos_;
        return true;
    }

    bool accept_keyword(const std::string& kw) {
        if (!is_keyword(kw)) return false;
        ++pos_;
        return true;
    }

    void expect_symbol(const std::string& s) {
        if (!accept_symbol(s)) fail("expected '" + s + "'");
    }

    void expect_keyword(const std::string& kw) {
        if (!accept_keyword(kw)) fail("expected '" + kw + "'");
    }

    void expect_end() {
        if (peek().type != Token::Type::End) fail("unexpected trailing input");
    }

    std::string expect_ident() {
        if (peek().type != Token::Type::Ident) fail("expected identifier");
        return next().text;
    }

    Rational expect_signed_number() {
        bool negative = accept_symbol("-");
        if (peek().type != Token::Type::Number) fail("expected number");
        Rational v = next().value;
        return negative ? Rational(-v) : v;
    }

    void parse_header() {
        if (accept_keyword("dist")) {
            std::string name = expect_ident();
            if (pvars_.count(name) || rvars_.count(name))
                fail("duplicate declaration of '" + name + "'");
            expect_symbol("=");
            Distribution d = parse_distribution();
            rvars_.insert(name);
            program_.samplings.emplace_back(name, std::move(d));
            return;
        }
        expect_keyword("init");
        std::string name = expect_ident();
        if (pvars_.count(name) || rvars_.count(name))
            fail("duplicate declaration of '" + name + "'");
        expect_symbol("=");
        Rational v = expect_signed_number();
        pvars_.insert(name);
        program_.variables.push_back(name);
        program_.initial.emplace(name, std::move(v));
    }

    Distribution parse_distribution() {
        if (accept_keyword("uniform")) {
            expect_symbol("(");
            Rational lo = expect_signed_number();
            expect_symbol(",");
            Rational hi = expect_signed_number();
            expect_symbol(")");
            if (!(lo < hi)) fail("uniform distribution requires lo < hi");
            return Distribution::uniform(lo, hi);
        }
        if (accept_keyword("discrete")) {
            expect_symbol("{");
            std::vector<std::pair<Rational, Rational>> outcomes;
            do {
                Rational v = expect_signed_number();
                expect_symbol(":");
                Rational p = expect_signed_number();
                outcomes.emplace_back(std::move(v), std::move(p));
            } while (accept_symbol(","));
            expect_symbol("}");
            try {
                return Distribution::point_masses(std::move(outcomes));
            } catch (const std::exception& e) {
                fail(e.what());
            }
        }
        fail("expected 'uniform' or 'discrete'");
    }

    static bool is_terminator(const Token& t) {
        return t.type == Token::Type::End ||
               (t.type == Token::Type::Ident &&
                (t.text == "else" || t.text == "fi" || t.text == "od"));
    }

    Stmt parse_seq() {
        std::vector<Stmt> stmts;
        while (true) {
            while (accept_symbol(";")) {
            }
            if (is_terminator(peek())) break;
            stmts.push_back(parse_annotated_stmt());
        }
        if (stmts.empty()) fail("expected statement");
        return Stmt::seq(std::move(stmts));
    }

    Stmt parse_annotated_stmt() {
        std::optional<Predicate> inv;
        if (accept_symbol("[")) {
            inv = parse_predicate(false);
            expect_symbol("]");
        }
        Stmt s = parse_stmt();
        if (inv) s.invariant = std::move(inv);
        return s;
    }

    Stmt parse_stmt() {
        if (accept_keyword("skip")) return Stmt::skip();
        if (accept_keyword("while")) {
            Predicate guard = parse_predicate(false);
            expect_keyword("do");
            Stmt body = parse_seq();
            expect_keyword("od");
            return Stmt::while_loop(std::move(guard), std::move(body));
        }
        if (accept_keyword("if")) {
            Stmt s;
            if (accept_keyword("star") || accept_symbol("*")) {
                expect_keyword("then");
                Stmt t = parse_seq();
                expect_keyword("else");
                Stmt e = parse_seq();
                expect_keyword("fi");
                return Stmt::if_star(std::move(t), std::move(e));
            }
            if (accept_keyword("prob")) {
                expect_symbol("(");
                Rational p = expect_signed_number();
                expect_symbol(")");
                if (!(p > 0 && p < 1)) fail("prob(p) requires p strictly between 0 and 1");
                expect_keyword("then");
                Stmt t = parse_seq();
                expect_keyword("else");
                Stmt e = parse_seq();
                expect_keyword("fi");
                return Stmt::if_prob(std::move(p), std::move(t), std::move(e));
            }
            Predicate guard = parse_predicate(false);
            expect_keyword("then");
            Stmt t = parse_seq();
            expect_keyword("else");
            Stmt e = parse_seq();
            expect_keyword("fi");
            return Stmt::if_pred(std::move(guard), std::move(t), std::move(e));
        }
        // assignment
        if (peek().type != Token::Type::Ident) fail("expected statement");
        std::vector<std::string> targets;
        do {
            std::string name = expect_ident();
            if (rvars_.count(name)) fail("cannot assign to sampling variable '" + name + "'");
            if (!pvars_.count(name)) fail("undeclared variable '" + name + "'");
            for (const auto& t : targets)
                if (t == name) fail("duplicate assignment target '" + name + "'");
            targets.push_back(std::move(name));
        } while (accept_symbol(","));
        expect_symbol(":=");
        std::vector<Polynomial> values;
        do {
            values.push_back(parse_expr(true));
        } while (accept_symbol(","));
        if (targets.size() != values.size())
            fail("assignment lists have mismatched lengths");
        return Stmt::assign(std::move(targets), std::move(values));
    }

    // Predicates: 'and' binds tighter than 'or'; comparisons may be chained
    // (a <= b <= c abbreviates the conjunction of adjacent comparisons).
    Predicate parse_predicate(bool allow_sampling) {
        Predicate p = parse_and_pred(allow_sampling);
        while (accept_keyword("or"))
            p = Predicate::disjunction(std::move(p), parse_and_pred(allow_sampling));
        return p;
    }

    Predicate parse_and_pred(bool allow_sampling) {
        Predicate p = parse_atom_pred(allow_sampling);
        while (accept_keyword("and"))
            p = Predicate::conjunction(std::move(p), parse_atom_pred(allow_sampling));
        return p;
    }

    bool next_continues_expression() const {
        if (peek().type != Token::Type::Symbol) return false;
        const std::string& s = peek().text;
        return s == "+" || s == "-" || s == "*" || s == "^" || s == "<" || s == ">" ||
               s == "<=" || s == ">=";
    }

    Predicate parse_atom_pred(bool allow_sampling) {
        if (accept_keyword("true")) return Predicate::truth();
        if (accept_keyword("false")) return Predicate::falsity();
        if (accept_keyword("not")) return Predicate::negation(parse_atom_pred(allow_sampling));
        if (is_symbol("(")) {
            std::size_t save = pos_;
            ++pos_;
            try {
                Predicate p = parse_predicate(allow_sampling);
                expect_symbol(")");
                if (!next_continues_expression()) return p;
            } catch (const ParseError&) {
            }
            pos_ = save;  // it was a parenthesized expression after all
        }
        return parse_comparison(allow_sampling);
    }

    Predicate parse_comparison(bool allow_sampling) {
        Polynomial lhs = parse_expr(allow_sampling);
        std::string rel = expect_relation();
        Polynomial mid = parse_expr(allow_sampling);
        Predicate p = Predicate::compare(lhs, rel, mid);
        while (peek().type == Token::Type::Symbol &&
               (peek().text == "<" || peek().text == ">" || peek().text == "<=" ||
                peek().text == ">=")) {
            std::string rel2 = expect_relation();
            Polynomial rhs = parse_expr(allow_sampling);
            p = Predicate::conjunction(std::move(p), Predicate::compare(mid, rel2, rhs));
            mid = std::move(rhs);
        }
        return p;
    }

    std::string expect_relation() {
        if (peek().type == Token::Type::Symbol) {
            const std::string& s = peek().text;
            if (s == "<" || s == ">" || s == "<=" || s == ">=") return next().text;
            if (s == "=") fail("equality is not a primitive; write 'a <= b and b <= a'");
        }
        fail("expected comparison operator");
    }

    Polynomial parse_expr(bool allow_sampling) {
        Polynomial p = parse_term(allow_sampling);
        while (true) {
            if (accept_symbol("+"))
                p += parse_term(allow_sampling);
            else if (accept_symbol("-"))
                p -= parse_term(allow_sampling);
            else
                break;
        }
        return p;
    }

    Polynomial parse_term(bool allow_sampling) {
        Polynomial p = parse_factor(allow_sampling);
        while (accept_symbol("*")) p *= parse_factor(allow_sampling);
        return p;
    }

    unsigned parse_exponent() {
        if (peek().type != Token::Type::Number) fail("expected integer exponent");
        Rational e = next().value;
        if (e.get_den() != 1 || e < 0) fail("exponent must be a nonnegative integer");
        return static_cast<unsigned>(e.get_num().get_ui());
    }

    Polynomial parse_factor(bool allow_sampling) {
        if (accept_symbol("-")) return -parse_factor(allow_sampling);
        Polynomial base;
        if (peek().type == Token::Type::Number) {
            base = Polynomial::constant(next().value);
        } else if (peek().type == Token::Type::Ident) {
            std::string name = expect_ident();
            if (rvars_.count(name)) {
                if (!allow_sampling)
                    fail("sampling variable '" + name +
                         "' may only appear on assignment right-hand sides");
                base = Polynomial::variable(name);
            } else if (pvars_.count(name)) {
                base = Polynomial::variable(name);
            } else {
                fail("undeclared variable '" + name + "'");
            }
        } else if (accept_symbol("(")) {
            base = parse_expr(allow_sampling);
            expect_symbol(")");
        } else {
            fail("expected expression");
        }
        if (accept_symbol("^")) base = base.pow(parse_exponent());
        return base;
    }
};

}  // namespace detail

/// Parses a probabilistic program source file: header directives (`dist`,
/// `init`) followed by the statement grammar, with bracketed `[...]` invariant
/// annotations and `#` line comments.
inline Program parse(const std::string& source) {
    return detail::ProgramParser(source).parse();
}

}  // namespace polyrank
