#include <CLI11.hpp>

#include <iostream>

#include "polyrank/polyrank.hpp"

namespace {

std::vector<std::uint64_t> parse_tail_list(const std::string& text) {
    std::vector<std::uint64_t> points;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t comma = text.find(',', i);
        std::string piece = text.substr(i, comma == std::string::npos ? comma : comma - i);
        if (!piece.empty()) points.push_back(std::stoull(piece));
        if (comma == std::string::npos) break;
        i = comma + 1;
    }
    return points;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "polyrank: proves almost-sure and finite termination of nondeterministic\n"
        "probabilistic programs by synthesizing polynomial ranking supermartingales,\n"
        "with independently checkable certificates, termination-time bounds and\n"
        "concentration bounds."};

    std::string program_path;
    std::string verify_path;
    polyrank::AnalysisConfig config;
    int degree = 2, bound = 2;
    std::string method = "handelman", objective = "min-ub", tail_list;
    double tolerance = 1e-6;
    std::string grid_step;
    bool json_output = false;

    app.add_option("program", program_path, "probabilistic program file to analyze");
    app.add_option("--verify", verify_path, "re-verify a certificate JSON file instead");
    app.add_option("--degree", degree, "template degree d for the ranking polynomials");
    app.add_option("--bound", bound,
                   "monoid multiplicand bound / sum-of-squares degree bound k");
    app.add_option("--method", method, "handelman | putinar | schmuedgen");
    app.add_option("--objective", objective, "feasibility | min-ub | min-width");
    bool diff_bounded = false;
    app.add_flag("--diff-bounded", diff_bounded,
                 "also synthesize difference bounds [a, b] for concentration results");
    app.add_option("--tail", tail_list, "comma-separated step counts n for tail bounds P(T > n)");
    app.add_option("--simulate", config.simulate_trials,
                   "Monte Carlo cross-check with this many trials");
    app.add_option("--seed", config.seed, "simulation seed");
    app.add_option("--max-steps", config.max_steps, "censoring threshold for simulation");
    app.add_option("--threads", config.threads, "worker threads for simulation trials");
    app.add_option("--emit-sdp", config.emit_sdp_path,
                   "write the assembled semidefinite program (sparse text format)");
    app.add_option("--ingest-sdp", config.ingest_sdp_path,
                   "read an external solver's solution for the emitted problem");
    app.add_flag("--sdp-local", config.sdp_local,
                 "try the low-accuracy in-process projection solver for SOS methods");
    app.add_option("--certificate", config.certificate_path, "write the certificate JSON here");
    app.add_option("--tolerance", tolerance, "witness tolerance for the numerical SOS paths");
    app.add_option("--grid-check", grid_step,
                   "cross-check the certificate on a rational grid with this step");
    app.add_flag("--json", json_output, "print the structured JSON report");
    app.add_flag("--dump-cfg", config.dump_cfg, "print the control flow graph, one edge per line");
    app.add_flag("--dump-instances", config.dump_instances,
                 "include extracted constraint instances in the JSON report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!verify_path.empty()) {
            polyrank::Certificate cert = polyrank::load_certificate(verify_path);
            std::optional<polyrank::Rational> step;
            if (!grid_step.empty()) step = polyrank::parse_rational(grid_step);
            auto outcome = polyrank::verify_certificate(cert, step);
            std::cout << (outcome.ok ? "verified: " : "REJECTED: ") << outcome.detail << "\n";
            if (outcome.ok && outcome.exact) std::cout << "residual: 0 (exact arithmetic)\n";
            if (outcome.ok && !outcome.exact)
                std::cout << "max residual: " << outcome.max_residual << "\n";
            return outcome.ok ? 0 : 2;
        }

        if (program_path.empty()) {
            std::cerr << "error: no program file given (see --help)\n";
            return 1;
        }
        config.program_path = program_path;
        config.synth.degree = degree;
        config.synth.bound = bound;
        config.synth.method = polyrank::method_from_string(method);
        config.synth.objective = polyrank::objective_from_string(objective);
        config.synth.diff_bounded = diff_bounded;
        config.synth.tolerance = tolerance;
        config.tail_points = parse_tail_list(tail_list);
        if (!grid_step.empty()) config.grid_step = polyrank::parse_rational(grid_step);

        polyrank::AnalysisReport report = polyrank::run_analysis(config);
        // structured output owns stdout; the readable report moves to stderr
        if (json_output) {
            std::cerr << report.text;
            std::cout << report.json.dump(2) << "\n";
        } else if (config.dump_instances && report.json.contains("instances")) {
            std::cerr << report.text;
            std::cout << report.json["instances"].dump(2) << "\n";
        } else {
            std::cout << report.text;
        }
        return report.exit_code;
    } catch (const polyrank::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
