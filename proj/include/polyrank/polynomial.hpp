#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyrank/monomial.hpp"
#include "polyrank/rational.hpp"

namespace polyrank {

/// Multivariate polynomial with exact rational coefficients, kept in canonical
/// form (no zero coefficients), so equality is map equality.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(const Rational& c) {
        if (c != 0) terms_[Monomial::unit()] = c;
    }

    static Polynomial constant(const Rational& c) { return Polynomial(c); }
    static Polynomial constant(long c) { return Polynomial(Rational(c)); }

    static Polynomial variable(const std::string& name) {
        Polynomial p;
        p.terms_[Monomial::var(name)] = 1;
        return p;
    }

    static Polynomial monomial(const Monomial& m, const Rational& c = Rational(1)) {
        Polynomial p;
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
    }

    Rational constant_value() const {
        auto it = terms_.find(Monomial::unit());
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Total degree; -1 for the zero polynomial.
    int degree() const {
        int d = -1;
        for (const auto& [m, _] : terms_) d = std::max(d, static_cast<int>(m.degree()));
        return d;
    }

    Rational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial operator+(const Polynomial& other) const {
        Polynomial result = *this;
        for (const auto& [m, c] : other.terms_) result.add_term(m, c);
        return result;
    }

    Polynomial operator-() const {
        Polynomial result;
        for (const auto& [m, c] : terms_) result.terms_[m] = -c;
        return result;
    }

    Polynomial operator-(const Polynomial& other) const { return *this + (-other); }

    Polynomial operator*(const Polynomial& other) const {
        Polynomial result;
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : other.terms_) result.add_term(m1 * m2, c1 * c2);
        return result;
    }

    Polynomial operator*(const Rational& c) const {
        Polynomial result;
        if (c == 0) return result;
        for (const auto& [m, coef] : terms_) result.terms_[m] = coef * c;
        return result;
    }

    Polynomial& operator+=(const Polynomial& other) { return *this = *this + other; }
    Polynomial& operator-=(const Polynomial& other) { return *this = *this - other; }
    Polynomial& operator*=(const Polynomial& other) { return *this = *this * other; }

    Polynomial pow(unsigned e) const {
        Polynomial result = constant(1);
        for (unsigned i = 0; i < e; ++i) result *= *this;
        return result;
    }

    std::set<std::string> variables() const {
        std::set<std::string> vars;
        for (const auto& [m, _] : terms_)
            for (const auto& [v, __] : m.exponents()) vars.insert(v);
        return vars;
    }

    bool operator==(const Polynomial& other) const = default;
    auto operator<=>(const Polynomial& other) const = default;

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : terms_) {
            if (!out.empty()) out += " + ";
            if (m.is_unit())
                out += c.get_str();
            else if (c == 1)
                out += m.to_string();
            else if (c == -1)
                out += "-" + m.to_string();
            else
                out += c.get_str() + "*" + m.to_string();
        }
        return out;
    }

private:
    std::map<Monomial, Rational> terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

/// Composition: every variable in `subst` is replaced by its polynomial; other
/// variables are untouched. Substituted polynomials may introduce fresh
/// variables (sampling variables in update functions do).
inline Polynomial substitute(const Polynomial& p,
                             const std::map<std::string, Polynomial>& subst) {
    Polynomial result;
    for (const auto& [m, c] : p.terms()) {
        Polynomial term = Polynomial::constant(c);
        for (const auto& [v, e] : m.exponents()) {
            auto it = subst.find(v);
            Polynomial base = it == subst.end() ? Polynomial::variable(v) : it->second;
            term *= base.pow(e);
        }
        result += term;
    }
    return result;
}

/// Exact evaluation. Every variable of `p` must be bound in `point`.
inline Rational evaluate(const Polynomial& p, const std::map<std::string, Rational>& point) {
    Rational result(0);
    for (const auto& [m, c] : p.terms()) {
        Rational term = c;
        for (const auto& [v, e] : m.exponents()) {
            auto it = point.find(v);
            if (it == point.end())
                throw std::invalid_argument("evaluate: unbound variable " + v);
            term *= rational_pow(it->second, e);
        }
        result += term;
    }
    return result;
}

}  // namespace polyrank
