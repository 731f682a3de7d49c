#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyrank/distribution.hpp"
#include "polyrank/polynomial.hpp"

namespace polyrank {

using UnknownId = unsigned;

/// Affine expression c0 + sum c_i * u_i over unknown template coefficients.
class AffineExpr {
public:
    AffineExpr() = default;
    explicit AffineExpr(const Rational& c) : constant_(c) {}

    static AffineExpr unknown(UnknownId id, const Rational& coeff = Rational(1)) {
        AffineExpr e;
        if (coeff != 0) e.coeffs_[id] = coeff;
        return e;
    }

    bool is_zero() const { return constant_ == 0 && coeffs_.empty(); }
    bool is_constant() const { return coeffs_.empty(); }
    const Rational& constant_part() const { return constant_; }
    const std::map<UnknownId, Rational>& coefficients() const { return coeffs_; }

    AffineExpr operator+(const AffineExpr& other) const {
        AffineExpr result = *this;
        result.constant_ += other.constant_;
        for (const auto& [id, c] : other.coeffs_) {
            auto [it, inserted] = result.coeffs_.emplace(id, c);
            if (!inserted) {
                it->second += c;
                if (it->second == 0) result.coeffs_.erase(it);
            }
        }
        return result;
    }

    AffineExpr operator-() const {
        AffineExpr result;
        result.constant_ = -constant_;
        for (const auto& [id, c] : coeffs_) result.coeffs_[id] = -c;
        return result;
    }

    AffineExpr operator-(const AffineExpr& other) const { return *this + (-other); }

    AffineExpr operator*(const Rational& c) const {
        AffineExpr result;
        if (c == 0) return result;
        result.constant_ = constant_ * c;
        for (const auto& [id, coef] : coeffs_) result.coeffs_[id] = coef * c;
        return result;
    }

    Rational evaluate(const std::map<UnknownId, Rational>& assignment) const {
        Rational value = constant_;
        for (const auto& [id, c] : coeffs_) {
            auto it = assignment.find(id);
            if (it == assignment.end())
                throw std::invalid_argument("unassigned template unknown #" + std::to_string(id));
            value += c * it->second;
        }
        return value;
    }

    bool operator==(const AffineExpr& other) const = default;

    std::string to_string(const std::vector<std::string>* names = nullptr) const {
        std::string out = constant_.get_str();
        for (const auto& [id, c] : coeffs_) {
            std::string name = names && id < names->size() ? (*names)[id]
                                                           : "u" + std::to_string(id);
            out += (c < 0 ? " - " : " + ");
            Rational a = c < 0 ? Rational(-c) : c;
            if (a != 1) out += a.get_str() + "*";
            out += name;
        }
        return out;
    }

private:
    Rational constant_;
    std::map<UnknownId, Rational> coeffs_;
};

/// Polynomial whose coefficients are affine in the template unknowns. This is
/// the synthesis template shape: products keep at most one unknown-carrying
/// factor so the generated constraint systems stay linear.
class SymbolicPolynomial {
public:
    SymbolicPolynomial() = default;

    explicit SymbolicPolynomial(const Polynomial& p) {
        for (const auto& [m, c] : p.terms()) terms_[m] = AffineExpr(c);
    }

    static SymbolicPolynomial term(const Monomial& m, const AffineExpr& coeff) {
        SymbolicPolynomial p;
        if (!coeff.is_zero()) p.terms_[m] = coeff;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }

    bool carries_unknowns() const {
        for (const auto& [_, a] : terms_)
            if (!a.is_constant()) return true;
        return false;
    }

    const std::map<Monomial, AffineExpr>& terms() const { return terms_; }

    AffineExpr coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? AffineExpr() : it->second;
    }

    void add_term(const Monomial& m, const AffineExpr& coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.emplace(m, coeff);
        if (!inserted) {
            it->second = it->second + coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    SymbolicPolynomial operator+(const SymbolicPolynomial& other) const {
        SymbolicPolynomial result = *this;
        for (const auto& [m, a] : other.terms_) result.add_term(m, a);
        return result;
    }

    SymbolicPolynomial operator-() const {
        SymbolicPolynomial result;
        for (const auto& [m, a] : terms_) result.terms_[m] = -a;
        return result;
    }

    SymbolicPolynomial operator-(const SymbolicPolynomial& other) const {
        return *this + (-other);
    }

    SymbolicPolynomial operator*(const Rational& c) const {
        SymbolicPolynomial result;
        if (c == 0) return result;
        for (const auto& [m, a] : terms_) result.terms_[m] = a * c;
        return result;
    }

    /// Multiplication by a concrete polynomial. General symbolic x symbolic
    /// products are rejected via the overload below.
    SymbolicPolynomial operator*(const Polynomial& p) const {
        SymbolicPolynomial result;
        for (const auto& [m1, a] : terms_)
            for (const auto& [m2, c] : p.terms()) result.add_term(m1 * m2, a * c);
        return result;
    }

    SymbolicPolynomial operator*(const SymbolicPolynomial& other) const {
        if (carries_unknowns() && other.carries_unknowns())
            throw std::invalid_argument(
                "product of two unknown-carrying symbolic polynomials is not affine");
        if (other.carries_unknowns()) return other * to_polynomial();
        return *this * other.to_polynomial();
    }

    SymbolicPolynomial& operator+=(const SymbolicPolynomial& other) {
        return *this = *this + other;
    }

    /// Lowers to a concrete polynomial; every coefficient must be constant.
    Polynomial to_polynomial() const {
        Polynomial p;
        for (const auto& [m, a] : terms_) {
            if (!a.is_constant())
                throw std::invalid_argument("symbolic polynomial still carries unknowns");
            p.add_term(m, a.constant_part());
        }
        return p;
    }

    Polynomial instantiate(const std::map<UnknownId, Rational>& assignment) const {
        Polynomial p;
        for (const auto& [m, a] : terms_) p.add_term(m, a.evaluate(assignment));
        return p;
    }

    std::set<UnknownId> unknowns() const {
        std::set<UnknownId> ids;
        for (const auto& [_, a] : terms_)
            for (const auto& [id, __] : a.coefficients()) ids.insert(id);
        return ids;
    }

    std::set<std::string> variables() const {
        std::set<std::string> vars;
        for (const auto& [m, _] : terms_)
            for (const auto& [v, __] : m.exponents()) vars.insert(v);
        return vars;
    }

    bool operator==(const SymbolicPolynomial& other) const = default;

private:
    std::map<Monomial, AffineExpr> terms_;
};

inline SymbolicPolynomial operator*(const Polynomial& p, const SymbolicPolynomial& q) {
    return q * p;
}

inline SymbolicPolynomial substitute(const SymbolicPolynomial& p,
                                     const std::map<std::string, Polynomial>& subst) {
    SymbolicPolynomial result;
    for (const auto& [m, a] : p.terms()) {
        Polynomial expanded = Polynomial::constant(1);
        for (const auto& [v, e] : m.exponents()) {
            auto it = subst.find(v);
            Polynomial base = it == subst.end() ? Polynomial::variable(v) : it->second;
            expanded *= base.pow(e);
        }
        result += SymbolicPolynomial::term(Monomial::unit(), a) * expanded;
    }
    return result;
}

/// Integrates out the sampling variables: each monomial x^a * r^b becomes
/// x^a * prod_i E[r_i^{b_i}], using independence of the sampling variables.
inline SymbolicPolynomial expect_samplings(const SymbolicPolynomial& p,
                                           const std::map<std::string, Distribution>& dists,
                                           const std::set<std::string>& sampling_vars) {
    SymbolicPolynomial result;
    for (const auto& [m, a] : p.terms()) {
        Rational factor(1);
        Monomial reduced;
        for (const auto& [v, e] : m.exponents()) {
            if (sampling_vars.count(v)) {
                auto it = dists.find(v);
                if (it == dists.end())
                    throw std::invalid_argument("no distribution for sampling variable " + v);
                factor *= moment(it->second, e);
            } else {
                reduced = reduced * Monomial::var(v, e);
            }
        }
        result.add_term(reduced, a * factor);
    }
    return result;
}

inline SymbolicPolynomial expect_samplings(const SymbolicPolynomial& p,
                                           const std::map<std::string, Distribution>& dists) {
    std::set<std::string> vars;
    for (const auto& [name, _] : dists) vars.insert(name);
    return expect_samplings(p, dists, vars);
}

inline Polynomial expect_samplings(const Polynomial& p,
                                   const std::map<std::string, Distribution>& dists,
                                   const std::set<std::string>& sampling_vars) {
    return expect_samplings(SymbolicPolynomial(p), dists, sampling_vars).to_polynomial();
}

inline Polynomial expect_samplings(const Polynomial& p,
                                   const std::map<std::string, Distribution>& dists) {
    return expect_samplings(SymbolicPolynomial(p), dists).to_polynomial();
}

}  // namespace polyrank
