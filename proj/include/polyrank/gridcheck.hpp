#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyrank/preexpectation.hpp"

namespace polyrank {

/// Rational grid over a box, one (lo, hi) range per program variable, common
/// step. With check_differences set, the per-transition difference bounds are
/// checked too, sampling-variable supports gridded at the same step.
struct GridSpec {
    std::map<std::string, std::pair<Rational, Rational>> ranges;
    Rational step{Rational(1) / 100};
    bool check_differences = false;
    Rational diff_a, diff_b;
    std::size_t max_violations = 16;
};

struct GridViolation {
    std::string condition;  // "C2", "C4", "DIFF"
    int label = 0;
    std::map<std::string, Rational> point;
    Rational margin;  // negative amount by which the condition fails

    std::string describe() const {
        std::string out = condition + " fails at label " + std::to_string(label) + " (";
        bool first = true;
        for (const auto& [v, x] : point) {
            if (!first) out += ", ";
            out += v + "=" + x.get_str();
            first = false;
        }
        return out + "), margin " + margin.get_str();
    }
};

struct GridReport {
    std::uint64_t points_checked = 0;
    std::vector<GridViolation> violations;
    std::optional<Rational> worst_c2_margin;   // min of eta over invariant points
    std::optional<Rational> worst_c4_margin;   // min of eta - epsilon - pre
    std::optional<Rational> worst_diff_margin;

    bool ok() const { return violations.empty(); }
};

namespace detail {

inline void track_min(std::optional<Rational>& slot, const Rational& v) {
    if (!slot || v < *slot) slot = v;
}

template <typename Fn>
void enumerate_grid(const std::vector<std::string>& vars,
                    const std::map<std::string, std::pair<Rational, Rational>>& ranges,
                    const Rational& step, std::map<std::string, Rational>& point, std::size_t i,
                    Fn&& fn) {
    if (i == vars.size()) {
        fn(point);
        return;
    }
    const auto& [lo, hi] = ranges.at(vars[i]);
    for (Rational v = lo; v <= hi; v += step) {
        point[vars[i]] = v;
        enumerate_grid(vars, ranges, step, point, i + 1, fn);
    }
    point.erase(vars[i]);
}

}  // namespace detail

/// Pointwise check of the ranking conditions for a concrete eta: C2
/// (nonnegative wherever the invariant holds) and C4 (expected decrease by
/// epsilon wherever the invariant and the continuation guard hold), plus
/// optional difference bounds. Exact rational evaluation at every grid point.
inline GridReport verify_grid(const ControlFlowGraph& g, const std::map<int, Polynomial>& eta,
                              const Rational& epsilon, const Rational& K, const GridSpec& spec) {
    GridReport report;
    for (const auto& v : g.program_vars)
        if (!spec.ranges.count(v))
            throw std::invalid_argument("grid spec misses a range for variable " + v);

    auto eta_at = [&](int label) -> Polynomial {
        return label == g.terminal ? Polynomial::constant(K) : eta.at(label);
    };

    struct LabelData {
        int label;
        Predicate invariant;
        Predicate term;
        std::vector<ConcretePreBranch> branches;
    };
    std::vector<LabelData> labels;
    for (int label : g.nonterminal_labels()) {
        LabelData data;
        data.label = label;
        data.invariant = g.invariant(label);
        data.term = term_predicate(g, label);
        data.branches = pre_expectation(g, eta, K, label);
        labels.push_back(std::move(data));
    }

    auto note_violation = [&](const std::string& cond, int label,
                              const std::map<std::string, Rational>& point, Rational margin) {
        if (report.violations.size() < spec.max_violations)
            report.violations.push_back(GridViolation{cond, label, point, std::move(margin)});
    };

    std::map<std::string, Rational> point;
    detail::enumerate_grid(
        g.program_vars, spec.ranges, spec.step, point, 0,
        [&](const std::map<std::string, Rational>& pt) {
            ++report.points_checked;
            for (const auto& data : labels) {
                if (!eval_predicate(data.invariant, pt)) continue;
                Rational c2 = evaluate(eta_at(data.label), pt);
                detail::track_min(report.worst_c2_margin, c2);
                if (c2 < 0) note_violation("C2", data.label, pt, c2);
                if (!eval_predicate(data.term, pt)) continue;
                bool conditional = g.kind(data.label) == LabelKind::Conditional;
                for (const auto& branch : data.branches) {
                    if (conditional && !eval_predicate(*branch.guard, pt)) continue;
                    Rational margin = evaluate(eta_at(data.label), pt) - epsilon -
                                      evaluate(branch.value, pt);
                    detail::track_min(report.worst_c4_margin, margin);
                    if (margin < 0) note_violation("C4", data.label, pt, margin);
                }
            }
        });

    if (spec.check_differences) {
        auto check_diff = [&](int label, const std::map<std::string, Rational>& pt,
                              const Rational& moved, const Rational& at_label) {
            Rational d = moved - at_label;
            detail::track_min(report.worst_diff_margin, d - spec.diff_a);
            detail::track_min(report.worst_diff_margin, spec.diff_b - d);
            if (d < spec.diff_a || d > spec.diff_b)
                note_violation("DIFF", label, pt,
                               d < spec.diff_a ? d - spec.diff_a : spec.diff_b - d);
        };
        for (const Transition& tr : g.transitions) {
            LabelKind kind = g.kind(tr.source);
            Predicate domain = kind == LabelKind::Conditional
                                   ? Predicate::conjunction(g.invariant(tr.source), tr.guard())
                                   : g.invariant(tr.source);
            detail::enumerate_grid(
                g.program_vars, spec.ranges, spec.step, point, 0,
                [&](const std::map<std::string, Rational>& pt) {
                    if (!eval_predicate(domain, pt)) return;
                    Rational at_label = evaluate(eta_at(tr.source), pt);
                    if (kind == LabelKind::Assignment) {
                        Polynomial moved =
                            substitute(eta_at(tr.target), tr.update().substitution());
                        std::vector<std::string> rvars;
                        std::map<std::string, std::pair<Rational, Rational>> rranges;
                        for (const auto& [r, dist] : g.samplings) {
                            rvars.push_back(r);
                            rranges[r] = {dist.support_lo(), dist.support_hi()};
                        }
                        std::map<std::string, Rational> rpoint;
                        detail::enumerate_grid(
                            rvars, rranges, spec.step, rpoint, 0,
                            [&](const std::map<std::string, Rational>& rv) {
                                std::map<std::string, Rational> full = pt;
                                for (const auto& [r, value] : rv) full[r] = value;
                                check_diff(tr.source, pt, evaluate(moved, full), at_label);
                            });
                    } else {
                        check_diff(tr.source, pt, evaluate(eta_at(tr.target), pt), at_label);
                    }
                });
        }
    }
    return report;
}

}  // namespace polyrank
