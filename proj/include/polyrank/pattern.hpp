#pragma once

#include <string>
#include <vector>

#include "polyrank/preexpectation.hpp"

namespace polyrank {

/// One universally quantified implication
///     (g_1 >= 0 and ... and g_m >= 0)  ->  target >= 0
/// with concrete gamma polynomials and a target affine in the template
/// unknowns. Strict constraints have already been relaxed to non-strict; the
/// relaxation only enlarges the quantification domain.
struct PatternInstance {
    enum class Tag { C2, C4, DiffLo, DiffHi };

    Tag tag = Tag::C2;
    int label = 0;
    int branch = 0;  // pre-expectation branch / transition index
    int clause = 0;  // DNF clause index
    std::vector<Polynomial> gamma;
    SymbolicPolynomial target;

    std::string describe() const {
        static const char* names[] = {"C2", "C4", "DIFF_LO", "DIFF_HI"};
        return std::string(names[static_cast<int>(tag)]) + " label " + std::to_string(label) +
               " branch " + std::to_string(branch) + " clause " + std::to_string(clause);
    }
};

inline std::string to_string(PatternInstance::Tag tag) {
    switch (tag) {
        case PatternInstance::Tag::C2: return "C2";
        case PatternInstance::Tag::C4: return "C4";
        case PatternInstance::Tag::DiffLo: return "DIFF_LO";
        case PatternInstance::Tag::DiffHi: return "DIFF_HI";
    }
    return "?";
}

inline PatternInstance::Tag tag_from_string(const std::string& s) {
    if (s == "C2") return PatternInstance::Tag::C2;
    if (s == "C4") return PatternInstance::Tag::C4;
    if (s == "DIFF_LO") return PatternInstance::Tag::DiffLo;
    if (s == "DIFF_HI") return PatternInstance::Tag::DiffHi;
    throw std::invalid_argument("unknown instance tag " + s);
}

namespace detail {

/// Clause constraints as nonneg polynomials, duplicates removed.
inline std::vector<Polynomial> clause_gamma(const DnfClause& clause) {
    std::vector<Polynomial> gamma;
    for (const auto& c : clause) {
        bool seen = false;
        for (const auto& g : gamma)
            if (g == c.poly) {
                seen = true;
                break;
            }
        if (!seen) gamma.push_back(c.poly);
    }
    return gamma;
}

}  // namespace detail

/// Decomposes the nonnegativity condition (C2) and the expected-decrease
/// condition (C4) into pattern instances. At a conditional label the branch
/// guard is conjoined with the invariant; the branch into the terminal label
/// yields no C4 instance (the guard disjunction excludes it).
inline std::vector<PatternInstance> extract_instances(const ControlFlowGraph& g,
                                                      const RankingTemplate& t) {
    std::vector<PatternInstance> instances;

    for (int label : g.nonterminal_labels()) {
        if (g.kind(label) == LabelKind::Conditional) {
            int branch = 0;
            for (const Transition* tr : g.out(label)) {
                if (tr->target == g.terminal) {
                    ++branch;
                    continue;
                }
                SymbolicPolynomial target =
                    t.at(label) - t.at(tr->target) -
                    SymbolicPolynomial(Polynomial::constant(t.epsilon));
                Dnf clauses =
                    to_dnf(Predicate::conjunction(g.invariant(label), tr->guard()));
                int clause_idx = 0;
                for (const auto& clause : clauses)
                    instances.push_back(PatternInstance{PatternInstance::Tag::C4, label, branch,
                                                        clause_idx++,
                                                        detail::clause_gamma(clause), target});
                ++branch;
            }
        } else {
            Dnf clauses = to_dnf(g.invariant(label));
            int branch = 0;
            for (const PreBranch& pre : pre_expectation(g, t, label)) {
                SymbolicPolynomial target =
                    t.at(label) - pre.value - SymbolicPolynomial(Polynomial::constant(t.epsilon));
                int clause_idx = 0;
                for (const auto& clause : clauses)
                    instances.push_back(PatternInstance{PatternInstance::Tag::C4, label, branch,
                                                        clause_idx++,
                                                        detail::clause_gamma(clause), target});
                ++branch;
            }
        }
    }

    for (int label : g.nonterminal_labels()) {
        Dnf clauses = to_dnf(g.invariant(label));
        int clause_idx = 0;
        for (const auto& clause : clauses)
            instances.push_back(PatternInstance{PatternInstance::Tag::C2, label, 0, clause_idx++,
                                                detail::clause_gamma(clause), t.at(label)});
    }
    return instances;
}

/// Difference-boundedness instances: a <= eta(l') - eta(l) <= b along every
/// transition, quantified over the invariant (conjoined with the guard at
/// conditional labels) and, for assignments, over the supports of the
/// sampling variables occurring in the update. The unknowns `a` and `b` enter
/// the targets affinely.
inline std::vector<PatternInstance> extract_diff_bounded(const ControlFlowGraph& g,
                                                         const RankingTemplate& t, UnknownId a,
                                                         UnknownId b) {
    std::vector<PatternInstance> instances;
    auto emit = [&](int label, int branch, const Dnf& clauses,
                    const std::vector<Polynomial>& extra_gamma,
                    const SymbolicPolynomial& difference) {
        SymbolicPolynomial lo =
            difference - SymbolicPolynomial::term(Monomial::unit(), AffineExpr::unknown(a));
        SymbolicPolynomial hi =
            SymbolicPolynomial::term(Monomial::unit(), AffineExpr::unknown(b)) - difference;
        int clause_idx = 0;
        for (const auto& clause : clauses) {
            std::vector<Polynomial> gamma = detail::clause_gamma(clause);
            for (const auto& supp : extra_gamma) {
                bool seen = false;
                for (const auto& existing : gamma)
                    if (existing == supp) {
                        seen = true;
                        break;
                    }
                if (!seen) gamma.push_back(supp);
            }
            instances.push_back(PatternInstance{PatternInstance::Tag::DiffLo, label, branch,
                                                clause_idx, gamma, lo});
            instances.push_back(PatternInstance{PatternInstance::Tag::DiffHi, label, branch,
                                                clause_idx, gamma, hi});
            ++clause_idx;
        }
    };

    for (int label : g.nonterminal_labels()) {
        int branch = 0;
        for (const Transition* tr : g.out(label)) {
            switch (g.kind(label)) {
                case LabelKind::Demonic:
                case LabelKind::Probabilistic: {
                    SymbolicPolynomial diff = t.at(tr->target) - t.at(label);
                    emit(label, branch, to_dnf(g.invariant(label)), {}, diff);
                    break;
                }
                case LabelKind::Conditional: {
                    SymbolicPolynomial diff = t.at(tr->target) - t.at(label);
                    emit(label, branch,
                         to_dnf(Predicate::conjunction(g.invariant(label), tr->guard())), {},
                         diff);
                    break;
                }
                case LabelKind::Assignment: {
                    SymbolicPolynomial moved =
                        substitute(t.at(tr->target), tr->update().substitution());
                    SymbolicPolynomial diff = moved - t.at(label);
                    std::vector<Polynomial> support;
                    auto diff_vars = diff.variables();
                    for (const auto& [r, dist] : g.samplings) {
                        if (!diff_vars.count(r)) continue;
                        support.push_back(Polynomial::variable(r) -
                                          Polynomial::constant(dist.support_lo()));
                        support.push_back(Polynomial::constant(dist.support_hi()) -
                                          Polynomial::variable(r));
                    }
                    emit(label, branch, to_dnf(g.invariant(label)), support, diff);
                    break;
                }
                case LabelKind::Terminal: break;
            }
            ++branch;
        }
    }
    return instances;
}

}  // namespace polyrank
