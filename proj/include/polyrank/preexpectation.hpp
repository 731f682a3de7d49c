#pragma once

#include <optional>
#include <vector>

#include "polyrank/ranking_template.hpp"

namespace polyrank {

/// One branch of the one-step expected value of eta at a label.
///   probabilistic: a single branch, the probability-weighted sum;
///   demonic:       one branch per successor (together they encode the max);
///   conditional:   one branch per guard, carrying that guard;
///   assignment:    a single branch, the expectation of eta(target) after the
///                  update, with sampling variables integrated out.
struct PreBranch {
    SymbolicPolynomial value;
    std::optional<Predicate> guard;  // set only for conditional labels
    int target = 0;
};

inline std::vector<PreBranch> pre_expectation(const ControlFlowGraph& g,
                                              const RankingTemplate& t, int label) {
    if (label == g.terminal)
        throw std::invalid_argument("pre-expectation is not generated at the terminal label");
    std::vector<PreBranch> branches;
    auto out = g.out(label);
    switch (g.kind(label)) {
        case LabelKind::Probabilistic: {
            SymbolicPolynomial sum;
            for (const Transition* tr : out)
                sum += t.at(tr->target) * tr->probability();
            branches.push_back(PreBranch{std::move(sum), std::nullopt, -1});
            break;
        }
        case LabelKind::Demonic:
            for (const Transition* tr : out)
                branches.push_back(PreBranch{t.at(tr->target), std::nullopt, tr->target});
            break;
        case LabelKind::Conditional:
            for (const Transition* tr : out)
                branches.push_back(PreBranch{t.at(tr->target), tr->guard(), tr->target});
            break;
        case LabelKind::Assignment: {
            const Transition* tr = out.at(0);
            SymbolicPolynomial substituted =
                substitute(t.at(tr->target), tr->update().substitution());
            SymbolicPolynomial expected =
                expect_samplings(substituted, g.distribution_map(), g.sampling_names());
            branches.push_back(PreBranch{std::move(expected), std::nullopt, tr->target});
            break;
        }
        case LabelKind::Terminal:
            break;
    }
    return branches;
}

/// Concrete pre-expectation for an instantiated eta.
struct ConcretePreBranch {
    Polynomial value;
    std::optional<Predicate> guard;
    int target = 0;
};

inline std::vector<ConcretePreBranch> pre_expectation(const ControlFlowGraph& g,
                                                      const std::map<int, Polynomial>& eta,
                                                      const Rational& K, int label) {
    RankingTemplate t = template_from_concrete(g, eta, Rational(1), K);
    std::vector<ConcretePreBranch> result;
    for (auto& branch : pre_expectation(g, t, label))
        result.push_back(
            ConcretePreBranch{branch.value.to_polynomial(), std::move(branch.guard), branch.target});
    return result;
}

/// Pointwise pre-expectation value (demonic labels take the max over
/// successors, conditional labels follow the unique enabled guard).
inline Rational pre_expectation_value(const ControlFlowGraph& g,
                                      const std::map<int, Polynomial>& eta, const Rational& K,
                                      int label, const std::map<std::string, Rational>& point) {
    auto eta_at = [&](int l) -> Polynomial {
        if (l == g.terminal) return Polynomial::constant(K);
        return eta.at(l);
    };
    if (label == g.terminal) return K;
    auto out = g.out(label);
    switch (g.kind(label)) {
        case LabelKind::Probabilistic: {
            Rational sum(0);
            for (const Transition* tr : out)
                sum += tr->probability() * evaluate(eta_at(tr->target), point);
            return sum;
        }
        case LabelKind::Demonic: {
            bool first = true;
            Rational best(0);
            for (const Transition* tr : out) {
                Rational v = evaluate(eta_at(tr->target), point);
                if (first || v > best) best = v;
                first = false;
            }
            return best;
        }
        case LabelKind::Conditional: {
            for (const Transition* tr : out)
                if (eval_predicate(tr->guard(), point)) return evaluate(eta_at(tr->target), point);
            throw std::runtime_error("no guard holds at label " + std::to_string(label));
        }
        case LabelKind::Assignment: {
            const Transition* tr = out.at(0);
            Polynomial substituted = substitute(eta_at(tr->target), tr->update().substitution());
            Polynomial expected =
                expect_samplings(substituted, g.distribution_map(), g.sampling_names());
            return evaluate(expected, point);
        }
        case LabelKind::Terminal:
            break;
    }
    return K;
}

}  // namespace polyrank
