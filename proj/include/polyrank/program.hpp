#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyrank/distribution.hpp"
#include "polyrank/predicate.hpp"

namespace polyrank {

/// Statement AST. Each statement may carry a bracketed invariant annotation
/// that later becomes the invariant of the label owning the statement.
struct Stmt {
    enum class Kind { Skip, Assign, If, While, Seq };
    enum class GuardKind { Star, Prob, Predicate };

    Kind kind = Kind::Skip;
    std::optional<Predicate> invariant;

    // Assign: simultaneous update targets := values.
    std::vector<std::string> targets;
    std::vector<Polynomial> values;

    // If guard; While uses `guard` with GuardKind::Predicate.
    GuardKind guard_kind = GuardKind::Predicate;
    Rational prob;
    Predicate guard;

    // If: {then, else}; While: {body}; Seq: the statement list.
    std::vector<Stmt> children;

    static Stmt skip() { return Stmt{}; }

    static Stmt assign(std::vector<std::string> tgts, std::vector<Polynomial> vals) {
        Stmt s;
        s.kind = Kind::Assign;
        s.targets = std::move(tgts);
        s.values = std::move(vals);
        return s;
    }

    static Stmt if_star(Stmt then_branch, Stmt else_branch) {
        Stmt s;
        s.kind = Kind::If;
        s.guard_kind = GuardKind::Star;
        s.children = {std::move(then_branch), std::move(else_branch)};
        return s;
    }

    static Stmt if_prob(Rational p, Stmt then_branch, Stmt else_branch) {
        Stmt s;
        s.kind = Kind::If;
        s.guard_kind = GuardKind::Prob;
        s.prob = std::move(p);
        s.children = {std::move(then_branch), std::move(else_branch)};
        return s;
    }

    static Stmt if_pred(Predicate g, Stmt then_branch, Stmt else_branch) {
        Stmt s;
        s.kind = Kind::If;
        s.guard_kind = GuardKind::Predicate;
        s.guard = std::move(g);
        s.children = {std::move(then_branch), std::move(else_branch)};
        return s;
    }

    static Stmt while_loop(Predicate g, Stmt body) {
        Stmt s;
        s.kind = Kind::While;
        s.guard = std::move(g);
        s.children = {std::move(body)};
        return s;
    }

    static Stmt seq(std::vector<Stmt> stmts) {
        if (stmts.size() == 1) return std::move(stmts.front());
        Stmt s;
        s.kind = Kind::Seq;
        s.children = std::move(stmts);
        return s;
    }

    Stmt with_invariant(Predicate inv) const {
        Stmt s = *this;
        s.invariant = std::move(inv);
        return s;
    }

    bool operator==(const Stmt& other) const = default;
};

struct Program {
    std::vector<std::string> variables;  // ordered program variables
    std::vector<std::pair<std::string, Distribution>> samplings;  // ordered sampling variables
    std::map<std::string, Rational> initial;  // initial valuation
    Stmt body;

    std::map<std::string, Distribution> distribution_map() const {
        std::map<std::string, Distribution> m;
        for (const auto& [name, d] : samplings) m.emplace(name, d);
        return m;
    }

    bool is_sampling_variable(const std::string& name) const {
        for (const auto& [n, _] : samplings)
            if (n == name) return true;
        return false;
    }

    bool operator==(const Program& other) const = default;
};

namespace detail {

inline std::string print_polynomial(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a < 0 ? " - " : " + ";
            if (a < 0) a = -a;
        }
        if (m.is_unit())
            out += a.get_str();
        else if (a == 1)
            out += m.to_string();
        else
            out += a.get_str() + "*" + m.to_string();
        first = false;
    }
    return out;
}

inline std::string print_predicate(const Predicate& p) {
    switch (p.kind()) {
        case Predicate::Kind::True: return "true";
        case Predicate::Kind::False: return "false";
        case Predicate::Kind::Constraint: {
            const auto& c = p.as_constraint();
            return print_polynomial(c.poly) + (c.strict ? " > 0" : " >= 0");
        }
        case Predicate::Kind::Not: return "not (" + print_predicate(p.children()[0]) + ")";
        case Predicate::Kind::And:
            return "(" + print_predicate(p.children()[0]) + " and " +
                   print_predicate(p.children()[1]) + ")";
        case Predicate::Kind::Or:
            return "(" + print_predicate(p.children()[0]) + " or " +
                   print_predicate(p.children()[1]) + ")";
    }
    return "";
}

inline void print_stmt(const Stmt& s, int indent, std::string& out) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (s.invariant) out += pad + "[" + print_predicate(*s.invariant) + "]\n";
    switch (s.kind) {
        case Stmt::Kind::Skip:
            out += pad + "skip\n";
            break;
        case Stmt::Kind::Assign: {
            std::string lhs, rhs;
            for (std::size_t i = 0; i < s.targets.size(); ++i) {
                if (i) {
                    lhs += ", ";
                    rhs += ", ";
                }
                lhs += s.targets[i];
                rhs += print_polynomial(s.values[i]);
            }
            out += pad + lhs + " := " + rhs + "\n";
            break;
        }
        case Stmt::Kind::If: {
            std::string head;
            switch (s.guard_kind) {
                case Stmt::GuardKind::Star: head = "star"; break;
                case Stmt::GuardKind::Prob: head = "prob(" + s.prob.get_str() + ")"; break;
                case Stmt::GuardKind::Predicate: head = print_predicate(s.guard); break;
            }
            out += pad + "if " + head + " then\n";
            print_stmt(s.children[0], indent + 1, out);
            out += pad + "else\n";
            print_stmt(s.children[1], indent + 1, out);
            out += pad + "fi\n";
            break;
        }
        case Stmt::Kind::While:
            out += pad + "while " + print_predicate(s.guard) + " do\n";
            print_stmt(s.children[0], indent + 1, out);
            out += pad + "od\n";
            break;
        case Stmt::Kind::Seq:
            for (std::size_t i = 0; i < s.children.size(); ++i) {
                print_stmt(s.children[i], indent, out);
                if (i + 1 < s.children.size()) {
                    // separator between sequenced statements
                    out.insert(out.size() - 1, ";");
                }
            }
            break;
    }
}

}  // namespace detail

/// Renders a program back into the concrete syntax accepted by parse().
inline std::string print_program(const Program& prog) {
    std::string out;
    for (const auto& [name, d] : prog.samplings) {
        out += "dist " + name + " = ";
        if (d.kind() == Distribution::Kind::Uniform) {
            out += "uniform(" + d.support_lo().get_str() + ", " + d.support_hi().get_str() + ")";
        } else {
            out += "discrete { ";
            bool first = true;
            for (const auto& [v, p] : d.outcomes()) {
                if (!first) out += ", ";
                out += v.get_str() + ": " + p.get_str();
                first = false;
            }
            out += " }";
        }
        out += "\n";
    }
    for (const auto& v : prog.variables)
        out += "init " + v + " = " + prog.initial.at(v).get_str() + "\n";
    out += "\n";
    detail::print_stmt(prog.body, 0, out);
    return out;
}

}  // namespace polyrank
