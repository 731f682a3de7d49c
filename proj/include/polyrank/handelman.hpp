#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "polyrank/lp.hpp"
#include "polyrank/monoid.hpp"
#include "polyrank/pattern.hpp"

namespace polyrank {

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Representation target = sum a_i * u_i with u_i from the monoid of gamma
/// and a_i >= 0. With exact coefficients this is a self-contained proof that
/// the target is nonnegative wherever every gamma member is.
struct HandelmanWitness {
    std::vector<Polynomial> monoid;
    std::vector<Rational> coefficients;
};

/// LP fragment produced for one instance: the monoid elements and the LP
/// columns holding their nonnegative coefficients.
struct HandelmanEncoding {
    std::vector<Polynomial> monoid;
    std::vector<int> coefficient_vars;
};

/// Encodes one pattern instance: a fresh nonnegative unknown per monoid
/// element and one linear equality per monomial, equating the target
/// coefficient (affine in template unknowns) with the combination of monoid
/// coefficients. Gamma members must be linear.
inline HandelmanEncoding handelman_encode(const PatternInstance& inst, int k, LpProblem& lp,
                                          const std::map<UnknownId, int>& unknown_vars,
                                          const std::string& name_prefix) {
    for (const auto& g : inst.gamma)
        if (g.degree() > 1)
            throw EncodingError("instance " + inst.describe() +
                                ": constraint polynomial of degree " +
                                std::to_string(g.degree()) +
                                " (this path handles linear constraints only)");

    HandelmanEncoding enc;
    enc.monoid = monoid_elements(inst.gamma, k);
    for (std::size_t i = 0; i < enc.monoid.size(); ++i)
        enc.coefficient_vars.push_back(
            lp.add_variable(name_prefix + ".u" + std::to_string(i), true));

    std::set<Monomial> support;
    for (const auto& [m, _] : inst.target.terms()) support.insert(m);
    for (const auto& u : enc.monoid)
        for (const auto& [m, _] : u.terms()) support.insert(m);

    for (const Monomial& m : support) {
        std::map<int, Rational> row;
        for (std::size_t i = 0; i < enc.monoid.size(); ++i) {
            Rational c = enc.monoid[i].coefficient(m);
            if (c != 0) row[enc.coefficient_vars[i]] = c;
        }
        AffineExpr target_coef = inst.target.coefficient(m);
        for (const auto& [unknown, c] : target_coef.coefficients()) {
            auto it = unknown_vars.find(unknown);
            if (it == unknown_vars.end())
                throw EncodingError("instance " + inst.describe() +
                                    ": target references an unregistered unknown");
            row[it->second] -= c;
        }
        lp.add_equality(std::move(row), target_coef.constant_part());
    }
    return enc;
}

/// Exact check of the identity target = sum a_i u_i with a_i >= 0.
inline bool check_handelman_witness(const Polynomial& target, const HandelmanWitness& w) {
    if (w.monoid.size() != w.coefficients.size()) return false;
    Polynomial sum;
    for (std::size_t i = 0; i < w.monoid.size(); ++i) {
        if (w.coefficients[i] < 0) return false;
        sum += w.monoid[i] * w.coefficients[i];
    }
    return sum == target;
}

/// Variant taking the instance directly; the target must be fully
/// instantiated (no remaining unknowns).
inline bool check_handelman_witness(const PatternInstance& inst, const HandelmanWitness& w) {
    return check_handelman_witness(inst.target.to_polynomial(), w);
}

}  // namespace polyrank
