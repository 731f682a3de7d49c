#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyrank/bounds.hpp"
#include "polyrank/certificate.hpp"
#include "polyrank/gridcheck.hpp"

namespace polyrank {

enum class Method { Handelman, Putinar, Schmuedgen };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::Handelman: return "handelman";
        case Method::Putinar: return "putinar";
        case Method::Schmuedgen: return "schmuedgen";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "handelman") return Method::Handelman;
    if (s == "putinar") return Method::Putinar;
    if (s == "schmuedgen") return Method::Schmuedgen;
    throw std::invalid_argument("unknown method " + s);
}

enum class Objective { Feasibility, MinimizeUb, MinimizeWidth };

inline Objective objective_from_string(const std::string& s) {
    if (s == "feasibility") return Objective::Feasibility;
    if (s == "min-ub") return Objective::MinimizeUb;
    if (s == "min-width") return Objective::MinimizeWidth;
    throw std::invalid_argument("unknown objective " + s);
}

struct SynthesisOptions {
    int degree = 2;
    int bound = 2;  // monoid multiplicand bound / SOS degree bound
    Method method = Method::Handelman;
    Objective objective = Objective::MinimizeUb;
    bool diff_bounded = false;
    unsigned subset_cap = 12;
    double tolerance = 1e-6;
};

/// The numerical SOS paths strengthen the nonnegativity condition to
/// eta >= 1 on the invariant (not restrictive: shifting eta by a constant
/// preserves the other conditions). The Handelman path stays exact.
inline SymbolicPolynomial encoded_target(const PatternInstance& inst, Method method) {
    if (method != Method::Handelman && inst.tag == PatternInstance::Tag::C2)
        return inst.target - SymbolicPolynomial(Polynomial::constant(1));
    return inst.target;
}

struct SynthesisResult {
    bool found = false;
    std::string status;  // "yes", "infeasible", "sdp-pending", error text
    Method method = Method::Handelman;
    int degree = 0;
    int bound = 0;
    Rational epsilon{1};
    Rational K{-1};
    std::map<int, Polynomial> eta;
    Rational ub_value;
    std::optional<Rational> diff_a, diff_b;
    std::vector<PatternInstance> instances;
    std::vector<std::string> unknown_names;   // template registry, for diagnostics
    std::vector<HandelmanWitness> witnesses;  // aligned with instances (Handelman)
    std::vector<SosWitness> sos_witnesses;    // aligned with instances (SOS)
    std::optional<SdpProblem> sdp;            // SOS paths: the assembled problem
    std::vector<SosEncoding> sos_encodings;   // aligned with instances
    std::string note;
};

namespace detail {

inline AffineExpr evaluate_symbolic(const SymbolicPolynomial& p,
                                    const std::map<std::string, Rational>& point) {
    AffineExpr result;
    for (const auto& [m, a] : p.terms()) {
        Rational factor(1);
        for (const auto& [v, e] : m.exponents()) {
            auto it = point.find(v);
            if (it == point.end()) throw std::invalid_argument("unbound variable " + v);
            factor *= rational_pow(it->second, e);
        }
        result = result + a * factor;
    }
    return result;
}

struct DiffUnknowns {
    UnknownId a = 0, b = 0;
    bool present = false;
};

inline std::vector<PatternInstance> gather_instances(const ControlFlowGraph& g,
                                                     RankingTemplate& tmpl,
                                                     const SynthesisOptions& options,
                                                     DiffUnknowns& diff) {
    std::vector<PatternInstance> instances = extract_instances(g, tmpl);
    if (options.diff_bounded) {
        diff.present = true;
        diff.a = tmpl.fresh_unknown("diff.a");
        diff.b = tmpl.fresh_unknown("diff.b");
        auto extra = extract_diff_bounded(g, tmpl, diff.a, diff.b);
        instances.insert(instances.end(), extra.begin(), extra.end());
    }
    return instances;
}

}  // namespace detail

struct AssembledLp {
    LpProblem lp;
    std::map<UnknownId, int> unknown_vars;
    std::vector<HandelmanEncoding> encodings;  // aligned with instances
};

/// One global LP sharing the template unknowns across all instances.
inline AssembledLp assemble(const ControlFlowGraph& g, const RankingTemplate& tmpl,
                            const std::vector<PatternInstance>& instances,
                            const SynthesisOptions& options,
                            const detail::DiffUnknowns& diff = {}) {
    AssembledLp out;
    for (UnknownId id = 0; id < tmpl.unknown_count(); ++id)
        out.unknown_vars[id] = out.lp.add_variable(tmpl.unknown_names[id], false);

    int idx = 0;
    for (const auto& inst : instances) {
        PatternInstance encoded = inst;
        encoded.target = encoded_target(inst, Method::Handelman);
        out.encodings.push_back(handelman_encode(encoded, options.bound, out.lp,
                                                 out.unknown_vars,
                                                 "i" + std::to_string(idx)));
        ++idx;
    }

    if (diff.present) {
        // a <= -epsilon <= b (the expected decrease already forces a below
        // -epsilon; pinning the order keeps the interval well-formed)
        int a_var = out.unknown_vars.at(diff.a);
        int b_var = out.unknown_vars.at(diff.b);
        int slack_a = out.lp.add_variable("diff.a.slack", true);
        int slack_b = out.lp.add_variable("diff.b.slack", true);
        out.lp.add_equality({{a_var, Rational(1)}, {slack_a, Rational(1)}},
                            Rational(-tmpl.epsilon));
        out.lp.add_equality({{b_var, Rational(1)}, {slack_b, Rational(-1)}},
                            Rational(-tmpl.epsilon));
    }

    switch (options.objective) {
        case Objective::Feasibility: break;
        case Objective::MinimizeUb: {
            AffineExpr initial =
                detail::evaluate_symbolic(tmpl.at(g.initial), g.initial_valuation);
            std::map<int, Rational> obj;
            for (const auto& [id, c] : initial.coefficients()) obj[out.unknown_vars.at(id)] = c;
            if (!obj.empty()) out.lp.set_objective(std::move(obj));
            break;
        }
        case Objective::MinimizeWidth: {
            if (!diff.present)
                throw std::invalid_argument("min-width objective requires difference bounds");
            out.lp.set_objective({{out.unknown_vars.at(diff.b), Rational(1)},
                                  {out.unknown_vars.at(diff.a), Rational(-1)}});
            break;
        }
    }
    return out;
}

struct AssembledSdp {
    SdpProblem sdp;
    std::map<UnknownId, int> unknown_scalars;
    std::vector<SosEncoding> encodings;  // aligned with instances
};

inline AssembledSdp assemble_sos(const ControlFlowGraph& g, const RankingTemplate& tmpl,
                                 const std::vector<PatternInstance>& instances,
                                 const SynthesisOptions& options,
                                 const detail::DiffUnknowns& diff = {}) {
    AssembledSdp out;
    for (UnknownId id = 0; id < tmpl.unknown_count(); ++id)
        out.unknown_scalars[id] = out.sdp.add_scalar(tmpl.unknown_names[id]);

    SosMethod sos_method =
        options.method == Method::Schmuedgen ? SosMethod::Schmuedgen : SosMethod::Putinar;
    int idx = 0;
    for (const auto& inst : instances) {
        PatternInstance encoded = inst;
        encoded.target = encoded_target(inst, options.method);
        out.encodings.push_back(sos_encode(encoded, options.bound, sos_method, out.sdp,
                                           out.unknown_scalars, "i" + std::to_string(idx),
                                           options.subset_cap));
        ++idx;
    }
    if (diff.present) {
        // a + s = -epsilon and b - s' = -epsilon with s, s' >= 0 realized as
        // 1x1 semidefinite blocks
        auto slack_row = [&](UnknownId scalar, const Rational& sign, const char* name) {
            SdpProblem::Block slack;
            slack.name = name;
            slack.dim = 1;
            slack.basis = {Monomial::unit()};
            slack.multiplier = Polynomial::constant(1);
            int block = out.sdp.add_block(std::move(slack));
            SdpProblem::Row row;
            row.scalar_coef[out.unknown_scalars.at(scalar)] = Rational(1);
            row.matrix_coef[{block, 0, 0}] = sign;
            row.rhs = Rational(-tmpl.epsilon);
            out.sdp.rows.push_back(std::move(row));
        };
        slack_row(diff.a, Rational(1), "diff.a.slack");
        slack_row(diff.b, Rational(-1), "diff.b.slack");
    }
    if (options.objective == Objective::MinimizeUb) {
        AffineExpr initial = detail::evaluate_symbolic(tmpl.at(g.initial), g.initial_valuation);
        for (const auto& [id, c] : initial.coefficients())
            out.sdp.objective_scalar[out.unknown_scalars.at(id)] = c;
        out.sdp.has_objective = !out.sdp.objective_scalar.empty();
    }
    return out;
}

/// Full synthesis for the Handelman path: extract, assemble, solve the exact
/// LP, instantiate, and re-check every witness. A solver answer is never
/// trusted directly; failed re-checks surface as an error status.
inline SynthesisResult synthesize(const ControlFlowGraph& g, const SynthesisOptions& options) {
    SynthesisResult result;
    result.method = options.method;
    result.degree = options.degree;
    result.bound = options.bound;

    RankingTemplate tmpl = make_template(g, options.degree);
    result.epsilon = tmpl.epsilon;
    result.K = tmpl.K;
    detail::DiffUnknowns diff;
    result.instances = detail::gather_instances(g, tmpl, options, diff);
    result.unknown_names = tmpl.unknown_names;

    if (options.method != Method::Handelman) {
        AssembledSdp assembled = assemble_sos(g, tmpl, result.instances, options, diff);
        result.sdp = std::move(assembled.sdp);
        result.sos_encodings = std::move(assembled.encodings);
        result.status = "sdp-pending";
        return result;
    }

    AssembledLp assembled = assemble(g, tmpl, result.instances, options, diff);
    LpSolution solution = simplex_solve(assembled.lp);
    if (solution.status == LpStatus::Unbounded &&
        options.objective != Objective::Feasibility) {
        // fall back to a pure feasibility point
        assembled.lp.has_objective = false;
        assembled.lp.objective.clear();
        solution = simplex_solve(assembled.lp);
        result.note = "objective was unbounded; returned a feasibility point";
    }
    if (solution.status != LpStatus::Optimal) {
        result.status = solution.status == LpStatus::Infeasible ? "infeasible" : "unbounded";
        return result;
    }

    std::map<UnknownId, Rational> assignment;
    for (const auto& [id, var] : assembled.unknown_vars)
        assignment[id] = solution.values[static_cast<std::size_t>(var)];
    result.eta = tmpl.instantiate(assignment);

    for (std::size_t i = 0; i < result.instances.size(); ++i) {
        HandelmanWitness w;
        w.monoid = assembled.encodings[i].monoid;
        for (int var : assembled.encodings[i].coefficient_vars)
            w.coefficients.push_back(solution.values[static_cast<std::size_t>(var)]);
        Polynomial target =
            encoded_target(result.instances[i], Method::Handelman).instantiate(assignment);
        if (!check_handelman_witness(target, w)) {
            result.status = "internal error: witness re-check failed for instance " +
                            result.instances[i].describe();
            return result;
        }
        result.witnesses.push_back(std::move(w));
    }

    if (diff.present) {
        result.diff_a = assignment.at(diff.a);
        result.diff_b = assignment.at(diff.b);
    }
    result.ub_value = ub(result.eta.at(g.initial), g.initial_valuation, tmpl.epsilon, tmpl.K);
    result.found = true;
    result.status = "yes";
    return result;
}

/// Completes an SOS synthesis from an external solver's assignment: the
/// template unknowns come from the scalar part, witnesses from the blocks,
/// and acceptance is decided by the witness checks alone.
inline SynthesisResult complete_sos(const ControlFlowGraph& g, const SynthesisOptions& options,
                                    const SdpAssignment& assignment) {
    SynthesisResult result;
    result.method = options.method;
    result.degree = options.degree;
    result.bound = options.bound;

    RankingTemplate tmpl = make_template(g, options.degree);
    result.epsilon = tmpl.epsilon;
    result.K = tmpl.K;
    detail::DiffUnknowns diff;
    result.instances = detail::gather_instances(g, tmpl, options, diff);
    result.unknown_names = tmpl.unknown_names;
    AssembledSdp assembled = assemble_sos(g, tmpl, result.instances, options, diff);

    // Rounding the scalar part to rationals keeps eta exactly representable;
    // the identity residual then accounts for the rounding.
    std::map<UnknownId, Rational> values;
    for (const auto& [id, scalar] : assembled.unknown_scalars)
        values[id] = Rational(assignment.scalars.at(static_cast<std::size_t>(scalar)));
    result.eta = tmpl.instantiate(values);

    double worst = 0;
    for (std::size_t i = 0; i < result.instances.size(); ++i) {
        SosWitness w = witness_from_assignment(assembled.sdp, assembled.encodings[i], assignment);
        Polynomial target =
            encoded_target(result.instances[i], options.method).instantiate(values);
        SosCheckResult check = check_sos_witness(target, w, options.tolerance);
        worst = std::max(worst, check.max_residual);
        if (!check.ok) {
            result.status = "witness check failed for instance " +
                            result.instances[i].describe() + ": " + check.failure;
            return result;
        }
        result.sos_witnesses.push_back(std::move(w));
    }
    result.note = "max witness residual " + std::to_string(worst);
    if (diff.present) {
        result.diff_a = values.at(diff.a);
        result.diff_b = values.at(diff.b);
        if (!(*result.diff_a < *result.diff_b)) {
            result.status = "difference bounds are not an interval (a >= b)";
            return result;
        }
    }
    result.ub_value = ub(result.eta.at(g.initial), g.initial_valuation, tmpl.epsilon, tmpl.K);
    result.found = true;
    result.status = "yes";
    return result;
}

}  // namespace polyrank
