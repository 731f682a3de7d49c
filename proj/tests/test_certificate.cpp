#include <catch2/catch.hpp>

#include <cstdio>

#include "polyrank/analysis.hpp"

#include "test_util.hpp"

using namespace polyrank;

namespace {

Certificate make_certificate(bool diff_bounded = false) {
    std::string source = testutil::read_file(testutil::program_path("gamblers_ruin.prob"));
    ControlFlowGraph g = build_cfg(parse(source));
    SynthesisOptions options;
    options.degree = 2;
    options.bound = 2;
    options.diff_bounded = diff_bounded;
    if (diff_bounded) options.objective = Objective::MinimizeWidth;
    SynthesisResult result = synthesize(g, options);
    REQUIRE(result.found);

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
    for (std::size_t i = 0; i < result.instances.size(); ++i) {
        WitnessRecord w;
        w.tag = result.instances[i].tag;
        w.label = result.instances[i].label;
        w.branch = result.instances[i].branch;
        w.clause = result.instances[i].clause;
        w.coefficients = result.witnesses[i].coefficients;
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

}  // namespace

TEST_CASE("certificates round-trip through JSON and re-verify exactly") {
    Certificate cert = make_certificate();
    nlohmann::json j = certificate_to_json(cert);
    Certificate back = certificate_from_json(j);
    CHECK(back.eta == cert.eta);
    CHECK(back.epsilon == cert.epsilon);
    CHECK(back.ub_value == cert.ub_value);
    CHECK(back.witnesses.size() == cert.witnesses.size());

    VerificationOutcome outcome = verify_certificate(back);
    CHECK(outcome.ok);
    CHECK(outcome.exact);
    CHECK(outcome.max_residual == 0.0);
}

TEST_CASE("difference-bounded certificates re-verify including the interval") {
    Certificate cert = make_certificate(true);
    REQUIRE(cert.diff_a.has_value());
    Certificate back = certificate_from_json(certificate_to_json(cert));
    VerificationOutcome outcome = verify_certificate(back, make_rational(1, 10));
    CHECK(outcome.ok);
}

TEST_CASE("tampered certificates are rejected") {
    Certificate cert = make_certificate();

    SECTION("perturbed witness coefficient") {
        for (auto& w : cert.witnesses)
            if (!w.coefficients.empty()) {
                w.coefficients[0] += make_rational(1, 10);
                break;
            }
        CHECK_FALSE(verify_certificate(cert).ok);
    }

    SECTION("perturbed eta") {
        cert.eta.begin()->second += Polynomial::constant(make_rational(1, 7));
        CHECK_FALSE(verify_certificate(cert).ok);
    }

    SECTION("wrong bound value") {
        cert.ub_value += 1;
        VerificationOutcome outcome = verify_certificate(cert);
        CHECK_FALSE(outcome.ok);
        CHECK(outcome.detail.find("bound") != std::string::npos);
    }

    SECTION("missing witness") {
        cert.witnesses.pop_back();
        CHECK_FALSE(verify_certificate(cert).ok);
    }

    SECTION("positive K") {
        cert.K = Rational(1);
        CHECK_FALSE(verify_certificate(cert).ok);
    }
}

TEST_CASE("certificates persist to disk") {
    Certificate cert = make_certificate();
    std::string path = "/tmp/polyrank_test_cert.json";
    save_certificate(cert, path);
    Certificate loaded = load_certificate(path);
    CHECK(verify_certificate(loaded).ok);
    std::remove(path.c_str());
}

TEST_CASE("foreign JSON is rejected") {
    nlohmann::json j;
    j["format"] = "something-else";
    CHECK_THROWS_AS(certificate_from_json(j), std::invalid_argument);
}

TEST_CASE("hand-written certificates without witnesses verify on a grid") {
    // the worked gambler certificate, external epsilon and K, no witnesses
    Certificate cert;
    cert.program_source = testutil::read_file(testutil::program_path("gamblers_ruin.prob"));
    cert.method = "handelman";
    cert.degree = 2;
    cert.bound = 0;
    cert.epsilon = parse_rational("0.2");
    cert.K = parse_rational("-0.2");
    Polynomial x = Polynomial::variable("x");
    Polynomial g = (x - Polynomial::constant(1)) * (Polynomial::constant(10) - x);
    auto c = [](const char* t) { return Polynomial::constant(parse_rational(t)); };
    cert.eta = {{1, g + c("10")},           {2, g + c("9.8")},
                {3, g + c("9.6")},          {4, g + c("9.6")},
                {5, g + c("2") * x - c("1.8")}, {6, g - c("2") * x + c("20.2")}};
    cert.ub_value = Rational(151);

    VerificationOutcome no_grid = verify_certificate(cert);
    CHECK_FALSE(no_grid.ok);
    CHECK(no_grid.detail.find("grid") != std::string::npos);

    VerificationOutcome with_grid = verify_certificate(cert, make_rational(1, 100));
    CHECK(with_grid.ok);

    // surviving the JSON round trip as well
    Certificate back = certificate_from_json(certificate_to_json(cert));
    CHECK(verify_certificate(back, make_rational(1, 100)).ok);

    cert.ub_value = Rational(150);
    CHECK_FALSE(verify_certificate(cert, make_rational(1, 100)).ok);
}

TEST_CASE("run_analysis produces certificates that verify from the file alone") {
    AnalysisConfig config;
    config.program_path = testutil::program_path("gamblers_ruin.prob");
    config.synth.degree = 2;
    config.synth.bound = 2;
    config.certificate_path = "/tmp/polyrank_analysis_cert.json";
    AnalysisReport report = run_analysis(config);
    REQUIRE(report.exit_code == 0);
    CHECK(report.text.find("yes") != std::string::npos);

    Certificate cert = load_certificate(config.certificate_path);
    VerificationOutcome outcome = verify_certificate(cert);
    CHECK(outcome.ok);
    CHECK(outcome.exact);
    std::remove(config.certificate_path.c_str());
}

TEST_CASE("run_analysis reports difference bounds, tail bounds and simulation") {
    AnalysisConfig config;
    config.program_path = testutil::program_path("gamblers_ruin.prob");
    config.synth.degree = 2;
    config.synth.bound = 2;
    config.synth.diff_bounded = true;
    config.synth.objective = Objective::MinimizeWidth;
    config.tail_points = {50000};
    config.simulate_trials = 2000;
    AnalysisReport report = run_analysis(config);
    REQUIRE(report.exit_code == 0);
    CHECK(report.text.find("difference bounds") != std::string::npos);
    CHECK(report.text.find("P(T > 50000)") != std::string::npos);
    CHECK(report.text.find("exponential tail decay from step") != std::string::npos);
    CHECK(report.text.find("simulation (uniform scheduler") != std::string::npos);
    CHECK(report.json.contains("tail_bounds"));
    CHECK(report.json["simulation"].contains("greedy"));
}

TEST_CASE("run_analysis reports fail with exit code 2 on infeasible searches") {
    AnalysisConfig config;
    config.program_path = testutil::program_path("gamblers_ruin.prob");
    config.synth.degree = 1;
    config.synth.bound = 3;
    AnalysisReport report = run_analysis(config);
    CHECK(report.exit_code == 2);
    CHECK(report.text.find("fail") != std::string::npos);
}

TEST_CASE("an initial valuation outside the annotated invariant is rejected") {
    AnalysisConfig config;
    config.program_source =
        "init x = 100\n"
        "[0 <= x <= 11]\n"
        "while 1 <= x and x <= 10 do\n"
        "  [1 <= x <= 10]\n"
        "  x := x - 1\n"
        "od";
    AnalysisReport report = run_analysis(config);
    CHECK(report.exit_code == 1);
    CHECK(report.text.find("invariant") != std::string::npos);
}
