#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyrank/polynomial.hpp"

namespace polyrank {

/// Normalized polynomial constraint: poly >= 0, or poly > 0 when strict.
struct PolyConstraint {
    Polynomial poly;
    bool strict = false;

    static PolyConstraint nonneg(Polynomial p) { return {std::move(p), false}; }
    static PolyConstraint positive(Polynomial p) { return {std::move(p), true}; }

    /// Logical negation: not(g >= 0) is -g > 0, not(g > 0) is -g >= 0.
    PolyConstraint negated() const { return {-poly, !strict}; }

    bool holds_at(const std::map<std::string, Rational>& point) const {
        Rational v = evaluate(poly, point);
        return strict ? v > 0 : v >= 0;
    }

    bool operator==(const PolyConstraint& other) const = default;
    auto operator<=>(const PolyConstraint& other) const = default;

    std::string to_string() const { return poly.to_string() + (strict ? " > 0" : " >= 0"); }
};

/// Propositional polynomial predicate: tree of true/false/constraint/not/and/or.
class Predicate {
public:
    enum class Kind { True, False, Constraint, Not, And, Or };

    Predicate() : kind_(Kind::True) {}

    static Predicate truth() { return Predicate(); }

    static Predicate falsity() {
        Predicate p;
        p.kind_ = Kind::False;
        return p;
    }

    static Predicate constraint(PolyConstraint c) {
        Predicate p;
        p.kind_ = Kind::Constraint;
        p.constraint_ = std::move(c);
        return p;
    }

    /// Convenience for lhs relation rhs with relation one of <, <=, >, >=.
    static Predicate compare(const Polynomial& lhs, const std::string& relation,
                             const Polynomial& rhs) {
        if (relation == "<=") return constraint(PolyConstraint::nonneg(rhs - lhs));
        if (relation == "<") return constraint(PolyConstraint::positive(rhs - lhs));
        if (relation == ">=") return constraint(PolyConstraint::nonneg(lhs - rhs));
        if (relation == ">") return constraint(PolyConstraint::positive(lhs - rhs));
        throw std::invalid_argument("unknown relation " + relation);
    }

    static Predicate negation(Predicate p) {
        Predicate result;
        result.kind_ = Kind::Not;
        result.children_.push_back(std::move(p));
        return result;
    }

    static Predicate conjunction(Predicate a, Predicate b) {
        Predicate result;
        result.kind_ = Kind::And;
        result.children_.push_back(std::move(a));
        result.children_.push_back(std::move(b));
        return result;
    }

    static Predicate disjunction(Predicate a, Predicate b) {
        Predicate result;
        result.kind_ = Kind::Or;
        result.children_.push_back(std::move(a));
        result.children_.push_back(std::move(b));
        return result;
    }

    Kind kind() const { return kind_; }
    const PolyConstraint& as_constraint() const { return constraint_; }
    const std::vector<Predicate>& children() const { return children_; }

    bool operator==(const Predicate& other) const = default;

    std::string to_string() const {
        switch (kind_) {
            case Kind::True: return "true";
            case Kind::False: return "false";
            case Kind::Constraint: return constraint_.to_string();
            case Kind::Not: return "not (" + children_[0].to_string() + ")";
            case Kind::And:
                return "(" + children_[0].to_string() + " and " + children_[1].to_string() + ")";
            case Kind::Or:
                return "(" + children_[0].to_string() + " or " + children_[1].to_string() + ")";
        }
        return "";
    }

private:
    Kind kind_;
    PolyConstraint constraint_;
    std::vector<Predicate> children_;
};

inline bool eval_predicate(const Predicate& p, const std::map<std::string, Rational>& point) {
    switch (p.kind()) {
        case Predicate::Kind::True: return true;
        case Predicate::Kind::False: return false;
        case Predicate::Kind::Constraint: return p.as_constraint().holds_at(point);
        case Predicate::Kind::Not: return !eval_predicate(p.children()[0], point);
        case Predicate::Kind::And:
            return eval_predicate(p.children()[0], point) &&
                   eval_predicate(p.children()[1], point);
        case Predicate::Kind::Or:
            return eval_predicate(p.children()[0], point) ||
                   eval_predicate(p.children()[1], point);
    }
    return false;
}

/// A conjunction of normalized constraints.
using DnfClause = std::vector<PolyConstraint>;
/// Disjunction of conjunctions; true is [[]] and false is [].
using Dnf = std::vector<DnfClause>;

namespace detail {

inline void append_constraint(DnfClause& clause, const PolyConstraint& c, bool& clause_false) {
    if (c.poly.is_constant()) {
        Rational v = c.poly.constant_value();
        bool holds = c.strict ? v > 0 : v >= 0;
        if (!holds) clause_false = true;
        return;  // constant constraints carry no information beyond truth
    }
    for (const auto& existing : clause)
        if (existing == c) return;
    clause.push_back(c);
}

inline Dnf conjoin(const Dnf& a, const Dnf& b) {
    Dnf result;
    for (const auto& ca : a)
        for (const auto& cb : b) {
            DnfClause clause;
            bool clause_false = false;
            for (const auto& c : ca) append_constraint(clause, c, clause_false);
            for (const auto& c : cb) append_constraint(clause, c, clause_false);
            if (!clause_false) result.push_back(std::move(clause));
        }
    return result;
}

inline Dnf to_dnf_impl(const Predicate& p, bool negate) {
    switch (p.kind()) {
        case Predicate::Kind::True: return negate ? Dnf{} : Dnf{{}};
        case Predicate::Kind::False: return negate ? Dnf{{}} : Dnf{};
        case Predicate::Kind::Constraint: {
            PolyConstraint c = negate ? p.as_constraint().negated() : p.as_constraint();
            DnfClause clause;
            bool clause_false = false;
            append_constraint(clause, c, clause_false);
            if (clause_false) return {};
            return {clause};
        }
        case Predicate::Kind::Not: return to_dnf_impl(p.children()[0], !negate);
        case Predicate::Kind::And: {
            Dnf left = to_dnf_impl(p.children()[0], negate);
            Dnf right = to_dnf_impl(p.children()[1], negate);
            if (negate) {  // De Morgan: negated conjunction is a disjunction
                left.insert(left.end(), right.begin(), right.end());
                return left;
            }
            return conjoin(left, right);
        }
        case Predicate::Kind::Or: {
            Dnf left = to_dnf_impl(p.children()[0], negate);
            Dnf right = to_dnf_impl(p.children()[1], negate);
            if (negate) return conjoin(left, right);
            left.insert(left.end(), right.begin(), right.end());
            return left;
        }
    }
    return {};
}

}  // namespace detail

/// Disjunctive normal form with negation pushed into the literals.
inline Dnf to_dnf(const Predicate& p) { return detail::to_dnf_impl(p, false); }

/// Reassembles a DNF into a predicate (used to cross-check to_dnf).
inline Predicate dnf_to_predicate(const Dnf& dnf) {
    if (dnf.empty()) return Predicate::falsity();
    Predicate result = Predicate::falsity();
    bool first = true;
    for (const auto& clause : dnf) {
        Predicate conj = Predicate::truth();
        bool first_c = true;
        for (const auto& c : clause) {
            Predicate atom = Predicate::constraint(c);
            conj = first_c ? atom : Predicate::conjunction(conj, atom);
            first_c = false;
        }
        result = first ? conj : Predicate::disjunction(result, conj);
        first = false;
    }
    return result;
}

}  // namespace polyrank
