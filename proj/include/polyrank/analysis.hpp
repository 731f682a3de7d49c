#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyrank/certificate.hpp"
#include "polyrank/simulate.hpp"
#include "polyrank/synthesis.hpp"

namespace polyrank {

inline nlohmann::json run_stats_to_json(const RunStats& stats) {
    nlohmann::json j;
    j["trials"] = stats.trials;
    j["terminated"] = stats.terminated;
    j["censored"] = stats.censored;
    j["mean"] = stats.mean;
    j["stderr"] = stats.stderr_mean;
    nlohmann::json tails = nlohmann::json::array();
    for (const auto& [n, count] : stats.tail_counts) {
        nlohmann::json t;
        t["n"] = n;
        t["count"] = count;
        t["p"] = stats.tail_probability(n);
        tails.push_back(std::move(t));
    }
    j["tail"] = tails;
    return j;
}

inline nlohmann::json instances_to_json(const std::vector<PatternInstance>& instances,
                                        const std::vector<std::string>* unknown_names = nullptr) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& inst : instances) {
        nlohmann::json j;
        j["tag"] = to_string(inst.tag);
        j["label"] = inst.label;
        j["branch"] = inst.branch;
        j["clause"] = inst.clause;
        nlohmann::json gamma = nlohmann::json::array();
        for (const auto& g : inst.gamma) gamma.push_back(g.to_string());
        j["gamma"] = gamma;
        std::string target;
        for (const auto& [m, a] : inst.target.terms()) {
            if (!target.empty()) target += " + ";
            target += "(" + a.to_string(unknown_names) + ")*" + m.to_string();
        }
        j["target"] = target.empty() ? "0" : target;
        out.push_back(std::move(j));
    }
    return out;
}

/// Derives a grid box per variable: linear single-variable invariant
/// constraints supply bounds; variables without any fall back to a window
/// around the initial value.
inline std::map<std::string, std::pair<Rational, Rational>> derive_grid_ranges(
    const ControlFlowGraph& g, const Rational& fallback_radius = Rational(5)) {
    std::map<std::string, std::pair<Rational, Rational>> ranges;
    std::map<std::string, std::optional<Rational>> lows, highs;
    for (int label : g.nonterminal_labels()) {
        for (const auto& clause : to_dnf(g.invariant(label))) {
            for (const auto& c : clause) {
                auto vars = c.poly.variables();
                if (vars.size() != 1 || c.poly.degree() != 1) continue;
                const std::string& v = *vars.begin();
                Rational slope = c.poly.coefficient(Monomial::var(v));
                Rational offset = c.poly.coefficient(Monomial::unit());
                Rational bound = -offset / slope;
                if (slope > 0) {
                    auto& lo = lows[v];
                    if (!lo || bound < *lo) lo = bound;
                } else {
                    auto& hi = highs[v];
                    if (!hi || bound > *hi) hi = bound;
                }
            }
        }
    }
    for (const auto& v : g.program_vars) {
        Rational x0 = g.initial_valuation.at(v);
        Rational lo = lows.count(v) && lows[v] ? std::min(*lows[v], x0) : x0 - fallback_radius;
        Rational hi = highs.count(v) && highs[v] ? std::max(*highs[v], x0) : x0 + fallback_radius;
        if (!(lo < hi)) {
            lo -= 1;
            hi += 1;
        }
        ranges[v] = {lo, hi};
    }
    return ranges;
}

struct AnalysisConfig {
    std::string program_path;
    std::string program_source;  // used when program_path is empty
    SynthesisOptions synth;
    std::string emit_sdp_path;
    std::string ingest_sdp_path;
    bool sdp_local = false;
    std::string certificate_path;
    std::optional<Rational> grid_step;
    std::uint64_t simulate_trials = 0;
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::vector<std::uint64_t> tail_points;
    bool dump_cfg = false;
    bool dump_instances = false;
};

struct AnalysisReport {
    int exit_code = 1;  // 0 = certificate, 2 = fail, 1 = usage/IO/encoding error
    std::string text;
    nlohmann::json json;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string decimal(const Rational& q) {
    std::ostringstream ss;
    ss.precision(6);
    ss << to_double(q);
    return ss.str();
}

}  // namespace detail

struct VerificationOutcome {
    bool ok = false;
    std::string detail;
    double max_residual = 0;
    bool exact = false;  // Handelman path: residual is identically zero
};

/// Re-verifies a certificate from the file contents alone: rebuilds the CFG
/// from the embedded program, re-extracts every instance, re-derives the
/// monoid / multiplier structure and checks each stored witness against the
/// re-computed target.
inline VerificationOutcome verify_certificate(const Certificate& cert,
                                              std::optional<Rational> grid_step = std::nullopt) {
    VerificationOutcome outcome;
    Program program = parse(cert.program_source);
    ControlFlowGraph cfg = build_cfg(program);
    auto violations = validate(cfg);
    if (!violations.empty()) {
        outcome.detail = "invalid control flow graph: " + violations.front();
        return outcome;
    }
    if (!eval_predicate(cfg.invariant(cfg.initial), cfg.initial_valuation)) {
        outcome.detail = "the initial valuation violates the invariant at the initial label";
        return outcome;
    }
    Method method = method_from_string(cert.method);

    if (!(cert.epsilon > 0)) {
        outcome.detail = "epsilon must be positive";
        return outcome;
    }
    if (!(cert.K <= -cert.epsilon)) {
        outcome.detail = "K must be at most -epsilon";
        return outcome;
    }

    RankingTemplate tmpl = template_from_concrete(cfg, cert.eta, cert.epsilon, cert.K);
    std::vector<PatternInstance> instances = extract_instances(cfg, tmpl);
    std::map<UnknownId, Rational> diff_values;
    if (cert.diff_a && cert.diff_b) {
        UnknownId a = tmpl.fresh_unknown("diff.a");
        UnknownId b = tmpl.fresh_unknown("diff.b");
        diff_values[a] = *cert.diff_a;
        diff_values[b] = *cert.diff_b;
        auto extra = extract_diff_bounded(cfg, tmpl, a, b);
        instances.insert(instances.end(), extra.begin(), extra.end());
    }

    // Hand-written certificates may embed no witnesses at all; they are then
    // checked pointwise on a grid instead of algebraically.
    if (cert.witnesses.empty()) {
        if (!grid_step) {
            outcome.detail =
                "certificate embeds no witnesses; supply a grid step to check it pointwise";
            return outcome;
        }
        Rational ub_check_only =
            ub(cert.eta.at(cfg.initial), cfg.initial_valuation, cert.epsilon, cert.K);
        if (ub_check_only != cert.ub_value) {
            outcome.detail = "stored bound " + cert.ub_value.get_str() +
                             " does not match recomputed " + ub_check_only.get_str();
            return outcome;
        }
        GridSpec spec;
        spec.ranges = derive_grid_ranges(cfg);
        spec.step = *grid_step;
        if (cert.diff_a && cert.diff_b) {
            spec.check_differences = true;
            spec.diff_a = *cert.diff_a;
            spec.diff_b = *cert.diff_b;
        }
        GridReport grid = verify_grid(cfg, cert.eta, cert.epsilon, cert.K, spec);
        if (!grid.ok()) {
            outcome.detail = "grid check: " + grid.violations.front().describe();
            return outcome;
        }
        outcome.ok = true;
        outcome.detail = "pointwise grid check passed on " +
                         std::to_string(grid.points_checked) +
                         " points (no witnesses embedded)";
        return outcome;
    }

    std::map<std::tuple<std::string, int, int, int>, const WitnessRecord*> by_key;
    for (const auto& w : cert.witnesses)
        by_key[{to_string(w.tag), w.label, w.branch, w.clause}] = &w;

    if (by_key.size() != instances.size()) {
        outcome.detail = "certificate carries " + std::to_string(by_key.size()) +
                         " witnesses but the program yields " +
                         std::to_string(instances.size()) + " instances";
        return outcome;
    }

    for (const auto& inst : instances) {
        auto it = by_key.find({to_string(inst.tag), inst.label, inst.branch, inst.clause});
        if (it == by_key.end()) {
            outcome.detail = "missing witness for instance " + inst.describe();
            return outcome;
        }
        const WitnessRecord& w = *it->second;
        Polynomial target = encoded_target(inst, method).instantiate(diff_values);
        if (!w.is_sos) {
            HandelmanWitness hw;
            hw.monoid = monoid_elements(inst.gamma, cert.bound);
            hw.coefficients = w.coefficients;
            if (hw.monoid.size() != hw.coefficients.size()) {
                outcome.detail = "witness for " + inst.describe() +
                                 " has the wrong number of coefficients";
                return outcome;
            }
            if (!check_handelman_witness(target, hw)) {
                outcome.detail = "witness identity fails for " + inst.describe();
                return outcome;
            }
        } else {
            SosMethod sm =
                method == Method::Schmuedgen ? SosMethod::Schmuedgen : SosMethod::Putinar;
            SosWitness sw;
            sw.multipliers = detail::sos_multipliers(inst, sm, 64);
            std::vector<std::string> vars = detail::instance_variables(inst);
            std::vector<Monomial> basis = monomials_up_to_degree(vars, cert.bound / 2);
            sw.bases.assign(sw.multipliers.size(), basis);
            sw.gram = w.gram;
            SosCheckResult check = check_sos_witness(target, sw, cert.tolerance);
            outcome.max_residual = std::max(outcome.max_residual, check.max_residual);
            if (!check.ok) {
                outcome.detail = "witness check fails for " + inst.describe() + ": " +
                                 check.failure;
                return outcome;
            }
        }
    }

    Rational ub_check =
        ub(cert.eta.at(cfg.initial), cfg.initial_valuation, cert.epsilon, cert.K);
    if (ub_check != cert.ub_value) {
        outcome.detail = "stored bound " + cert.ub_value.get_str() +
                         " does not match recomputed " + ub_check.get_str();
        return outcome;
    }

    if (grid_step) {
        GridSpec spec;
        spec.ranges = derive_grid_ranges(cfg);
        spec.step = *grid_step;
        if (cert.diff_a && cert.diff_b) {
            spec.check_differences = true;
            spec.diff_a = *cert.diff_a;
            spec.diff_b = *cert.diff_b;
        }
        GridReport grid = verify_grid(cfg, cert.eta, cert.epsilon, cert.K, spec);
        if (!grid.ok()) {
            outcome.detail = "grid check: " + grid.violations.front().describe();
            return outcome;
        }
    }

    outcome.ok = true;
    outcome.exact = method == Method::Handelman;
    outcome.detail = "all witnesses check against the re-derived instances";
    return outcome;
}


/// The end-to-end pipeline: parse, build the CFG, set up the template,
/// extract instances, assemble and solve, verify, report. Prints `yes` with
/// the termination-time bound on success and `fail` otherwise; the method is
/// sound but not complete, so there is no `no`.
inline AnalysisReport run_analysis(const AnalysisConfig& config) {
    AnalysisReport report;
    std::ostringstream out;
    nlohmann::json& j = report.json;

    std::string source = config.program_path.empty() ? config.program_source
                                                     : detail::read_file(config.program_path);
    Program program = parse(source);
    ControlFlowGraph cfg = build_cfg(program);
    auto violations = validate(cfg);
    if (!violations.empty()) {
        for (const auto& v : violations) out << "invalid control flow graph: " << v << "\n";
        report.exit_code = 1;
        report.text = out.str();
        return report;
    }
    // the initial configuration is reachable, so a sound invariant must cover it
    if (!eval_predicate(cfg.invariant(cfg.initial), cfg.initial_valuation)) {
        out << "the initial valuation violates the invariant at the initial label; "
               "the supplied annotations cannot be invariants\n";
        report.exit_code = 1;
        report.text = out.str();
        return report;
    }
    if (config.dump_cfg) out << dump_cfg(cfg);

    SynthesisResult result = synthesize(cfg, config.synth);
    if (config.dump_instances)
        j["instances"] = instances_to_json(result.instances, &result.unknown_names);

    if (result.status == "sdp-pending") {
        if (!config.emit_sdp_path.empty()) {
            sdp_emit_file(*result.sdp, config.emit_sdp_path);
            out << "semidefinite problem written to " << config.emit_sdp_path << "\n";
        }
        std::optional<SdpAssignment> assignment;
        if (!config.ingest_sdp_path.empty()) {
            std::ifstream in(config.ingest_sdp_path);
            if (!in) throw std::runtime_error("cannot open " + config.ingest_sdp_path);
            assignment = sdp_ingest(in, *result.sdp);
        } else if (config.sdp_local) {
            assignment = solve_sdp_local(*result.sdp);
        }
        if (assignment) {
            result = complete_sos(cfg, config.synth, *assignment);
        } else {
            out << "fail (no solution ingested for the semidefinite program; "
                   "use --emit-sdp/--ingest-sdp or --sdp-local)\n";
            report.exit_code = 2;
            report.text = out.str();
            j["result"] = "fail";
            return report;
        }
    }

    j["method"] = to_string(result.method);
    j["degree"] = result.degree;
    j["bound"] = result.bound;

    if (!result.found) {
        out << "fail (" << result.status << ")\n";
        j["result"] = "fail";
        j["status"] = result.status;
        report.exit_code = 2;
        report.text = out.str();
        return report;
    }

    // optional grid cross-check of the synthesized certificate
    if (config.grid_step) {
        GridSpec spec;
        spec.ranges = derive_grid_ranges(cfg);
        spec.step = *config.grid_step;
        if (result.diff_a && result.diff_b) {
            spec.check_differences = true;
            spec.diff_a = *result.diff_a;
            spec.diff_b = *result.diff_b;
        }
        GridReport grid = verify_grid(cfg, result.eta, result.epsilon, result.K, spec);
        j["grid"] = {{"points", grid.points_checked}, {"violations", grid.violations.size()}};
        if (!grid.ok()) {
            for (const auto& v : grid.violations) out << "grid violation: " << v.describe() << "\n";
            out << "fail (grid check refuted the certificate)\n";
            j["result"] = "fail";
            report.exit_code = 2;
            report.text = out.str();
            return report;
        }
        out << "grid check passed on " << grid.points_checked << " points\n";
    }

    Rational eta0 = evaluate(result.eta.at(cfg.initial), cfg.initial_valuation);
    out << "yes\n";
    out << "expected termination time <= " << result.ub_value.get_str() << " ("
        << detail::decimal(result.ub_value) << ")\n";
    j["result"] = "yes";
    j["ub"] = result.ub_value.get_str();
    nlohmann::json eta_json;
    for (const auto& [label, p] : result.eta) eta_json[std::to_string(label)] = p.to_string();
    j["eta"] = eta_json;
    if (!result.note.empty()) out << "note: " << result.note << "\n";

    if (result.diff_a && result.diff_b) {
        out << "difference bounds: [" << result.diff_a->get_str() << ", "
            << result.diff_b->get_str() << "]\n";
        mpz_class m = minimal_concentration_step(eta0, result.epsilon);
        out << "exponential tail decay from step " << m.get_str() << "\n";
        j["diff"] = {{"a", result.diff_a->get_str()},
                     {"b", result.diff_b->get_str()},
                     {"concentration_from", m.get_str()}};
        nlohmann::json tails = nlohmann::json::array();
        for (std::uint64_t n : config.tail_points) {
            auto bound =
                concentration_bound(eta0, result.epsilon, *result.diff_a, *result.diff_b, n);
            if (bound) {
                out << "P(T > " << n << ") <= " << *bound << "\n";
                tails.push_back({{"n", n}, {"bound", *bound}});
            } else {
                out << "P(T > " << n << "): no bound at this n (need eps*(n-1) > eta0)\n";
                tails.push_back({{"n", n}, {"bound", nullptr}});
            }
        }
        if (!tails.empty()) j["tail_bounds"] = tails;
    } else if (!config.tail_points.empty()) {
        out << "tail bounds need difference bounds; re-run with --diff-bounded\n";
    }

    if (config.simulate_trials > 0) {
        Configuration init = initial_configuration(cfg);
        UniformScheduler uniform;
        RunStats stats = simulate(cfg, init, uniform, config.max_steps, config.simulate_trials,
                                  config.tail_points, config.seed, config.threads);
        out << "simulation (uniform scheduler, " << stats.trials << " trials): mean T = "
            << stats.mean << " +- " << stats.stderr_mean << ", censored " << stats.censored
            << "\n";
        j["simulation"]["uniform"] = run_stats_to_json(stats);
        GreedyEtaScheduler greedy(cfg, result.eta);
        RunStats adv = simulate(cfg, init, greedy, config.max_steps, config.simulate_trials,
                                config.tail_points, config.seed + 1, config.threads);
        out << "simulation (greedy-max-eta scheduler): mean T = " << adv.mean << " +- "
            << adv.stderr_mean << ", censored " << adv.censored << "\n";
        j["simulation"]["greedy"] = run_stats_to_json(adv);
    }

    if (!config.certificate_path.empty()) {
        Certificate cert;
        cert.program_source = source;
        cert.method = to_string(result.method);
        cert.degree = result.degree;
        cert.bound = result.bound;
        cert.epsilon = result.epsilon;
        cert.K = result.K;
        cert.eta = result.eta;
        cert.ub_value = result.ub_value;
        cert.diff_a = result.diff_a;
        cert.diff_b = result.diff_b;
        cert.tolerance = config.synth.tolerance;
        for (std::size_t i = 0; i < result.instances.size(); ++i) {
            WitnessRecord w;
            w.tag = result.instances[i].tag;
            w.label = result.instances[i].label;
            w.branch = result.instances[i].branch;
            w.clause = result.instances[i].clause;
            if (result.method == Method::Handelman) {
                w.coefficients = result.witnesses[i].coefficients;
            } else {
                w.is_sos = true;
                w.gram = result.sos_witnesses[i].gram;
            }
            cert.witnesses.push_back(std::move(w));
        }
        save_certificate(cert, config.certificate_path);
        // exit code 0 promises that the emitted file re-verifies on its own
        VerificationOutcome emitted = verify_certificate(load_certificate(config.certificate_path));
        if (!emitted.ok) {
            out << "internal error: emitted certificate failed re-verification: "
                << emitted.detail << "\n";
            report.exit_code = 1;
            report.text = out.str();
            return report;
        }
        out << "certificate written to " << config.certificate_path << "\n";
    }

    report.exit_code = 0;
    report.text = out.str();
    return report;
}

}  // namespace polyrank
