#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyrank/cfg.hpp"
#include "polyrank/symbolic.hpp"

namespace polyrank {

/// Per-label polynomial template for a ranking supermartingale: one fresh
/// unknown coefficient per monomial of degree <= degree at every non-terminal
/// label, and the fixed constant K at the terminal label. epsilon and K are
/// fixed up front (the normalization epsilon = 1, K = -1 is not restrictive;
/// scaling a valid eta recovers any other pair).
struct RankingTemplate {
    int degree = 0;
    Rational epsilon{1};
    Rational K{-1};
    std::map<int, SymbolicPolynomial> eta;  // all labels including terminal
    std::vector<std::string> unknown_names;  // registry: UnknownId -> display name

    UnknownId fresh_unknown(const std::string& name) {
        unknown_names.push_back(name);
        return static_cast<UnknownId>(unknown_names.size() - 1);
    }

    std::size_t unknown_count() const { return unknown_names.size(); }

    const SymbolicPolynomial& at(int label) const { return eta.at(label); }

    std::map<int, Polynomial> instantiate(const std::map<UnknownId, Rational>& assignment) const {
        std::map<int, Polynomial> result;
        for (const auto& [label, sym] : eta) result.emplace(label, sym.instantiate(assignment));
        return result;
    }
};

inline RankingTemplate make_template(const ControlFlowGraph& g, int degree,
                                     const Rational& epsilon = Rational(1),
                                     const Rational& K = Rational(-1)) {
    RankingTemplate t;
    t.degree = degree;
    t.epsilon = epsilon;
    t.K = K;
    std::vector<Monomial> basis = monomials_up_to_degree(g.program_vars, degree);
    for (const auto& [label, kind] : g.labels) {
        if (kind == LabelKind::Terminal) {
            t.eta[label] = SymbolicPolynomial(Polynomial::constant(K));
            continue;
        }
        SymbolicPolynomial sym;
        for (const Monomial& m : basis) {
            UnknownId id =
                t.fresh_unknown("a(" + std::to_string(label) + "," + m.to_string() + ")");
            sym.add_term(m, AffineExpr::unknown(id));
        }
        t.eta[label] = std::move(sym);
    }
    return t;
}

/// Wraps an already concrete eta (e.g. a hand-written certificate) in a
/// template so the same extraction and checking paths apply.
inline RankingTemplate template_from_concrete(const ControlFlowGraph& g,
                                              const std::map<int, Polynomial>& eta,
                                              const Rational& epsilon, const Rational& K) {
    RankingTemplate t;
    t.epsilon = epsilon;
    t.K = K;
    for (const auto& [label, kind] : g.labels) {
        if (kind == LabelKind::Terminal) {
            t.eta[label] = SymbolicPolynomial(Polynomial::constant(K));
            continue;
        }
        auto it = eta.find(label);
        if (it == eta.end())
            throw std::invalid_argument("no eta supplied for label " + std::to_string(label));
        t.degree = std::max(t.degree, it->second.degree());
        t.eta[label] = SymbolicPolynomial(it->second);
    }
    return t;
}

}  // namespace polyrank
