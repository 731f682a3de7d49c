#include <catch2/catch.hpp>

#include <sstream>

#include "polyrank/sos.hpp"

using namespace polyrank;

namespace {

const Polynomial x = Polynomial::variable("x");
const Polynomial one = Polynomial::constant(1);

/// The 2 - x^2 over {1 - x^2} system used across the SOS tests.
struct Fixture {
    SdpProblem sdp;
    SosEncoding enc;
    PatternInstance inst;

    Fixture() {
        inst.gamma = {one - x * x};
        inst.target = SymbolicPolynomial(Polynomial::constant(2) - x * x);
        std::map<UnknownId, int> scalars;
        enc = sos_encode(inst, 2, SosMethod::Putinar, sdp, scalars, "t");
    }
};

}  // namespace

TEST_CASE("emitted problems carry the documented sparse layout") {
    Fixture f;
    std::ostringstream out;
    sdp_emit(f.sdp, out);
    std::istringstream lines(out.str());
    std::string line;

    std::getline(lines, line);
    CHECK(line == std::to_string(f.sdp.rows.size()));
    std::getline(lines, line);
    CHECK(line == "2");  // two PSD blocks, no scalars
    std::getline(lines, line);
    CHECK(line == "2 2");
    std::getline(lines, line);  // right-hand sides
    CHECK_FALSE(line.empty());
    int entries = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++entries;
    CHECK(entries > 0);
}

TEST_CASE("an empty problem emits a header only") {
    SdpProblem empty;
    std::ostringstream out;
    sdp_emit(empty, out);
    std::istringstream lines(out.str());
    std::string line;
    int total = 0, nonempty = 0;
    while (std::getline(lines, line)) {
        ++total;
        if (!line.empty()) ++nonempty;
    }
    CHECK(total == 4);     // counts, blocks, sizes, right-hand sides
    CHECK(nonempty == 2);  // the sizes and rhs lines are empty, no entries follow
}

TEST_CASE("emit, hand-written solution, ingest, check round-trips") {
    Fixture f;
    std::ostringstream problem;
    sdp_emit(f.sdp, problem);  // the writer must not throw

    // hand-written solution: Q0 = Q1 = diag(1, 0) in the solution-file format
    std::string solution_text =
        "* hand-written solution for the 2 - x^2 system\n"
        "1 1 1 1.0\n"
        "2 1 1 1.0\n";
    std::istringstream solution(solution_text);
    SdpAssignment a = sdp_ingest(solution, f.sdp);
    REQUIRE(a.blocks.size() == 2);
    CHECK(a.blocks[0][0][0] == 1.0);
    CHECK(a.blocks[0][1][1] == 0.0);

    SosWitness w = witness_from_assignment(f.sdp, f.enc, a);
    SosCheckResult check = check_sos_witness(f.inst.target.to_polynomial(), w, 1e-6);
    CHECK(check.ok);
    CHECK(check.max_residual == 0.0);
}

TEST_CASE("truncated and malformed solutions are rejected") {
    Fixture f;
    std::istringstream empty("");
    CHECK_THROWS_WITH(sdp_ingest(empty, f.sdp), Catch::Matchers::Contains("truncated"));

    std::istringstream garbage("1 1 oops 1.0\n");
    CHECK_THROWS_WITH(sdp_ingest(garbage, f.sdp), Catch::Matchers::Contains("malformed"));

    std::istringstream bad_block("7 1 1 1.0\n");
    CHECK_THROWS_WITH(sdp_ingest(bad_block, f.sdp), Catch::Matchers::Contains("out of range"));

    std::istringstream bad_entry("1 3 3 1.0\n");
    CHECK_THROWS(sdp_ingest(bad_entry, f.sdp));

    std::istringstream lower_triangle("1 2 1 1.0\n");
    CHECK_THROWS(sdp_ingest(lower_triangle, f.sdp));
}

TEST_CASE("emitted values carry seventeen significant digits") {
    SdpProblem p;
    SdpProblem::Block b;
    b.name = "q";
    b.dim = 1;
    b.basis = {Monomial::unit()};
    b.multiplier = Polynomial::constant(1);
    p.add_block(b);
    SdpProblem::Row row;
    row.matrix_coef[{0, 0, 0}] = make_rational(1, 3);
    row.rhs = make_rational(2, 3);
    p.rows.push_back(row);

    std::ostringstream out;
    sdp_emit(p, out);
    std::string text = out.str();
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(text.find("0.66666666666666663") != std::string::npos);
}

TEST_CASE("scalars ride on a trailing diagonal block") {
    SdpProblem p;
    int s = p.add_scalar("u");
    SdpProblem::Block b;
    b.name = "q";
    b.dim = 1;
    b.basis = {Monomial::unit()};
    b.multiplier = one;
    p.add_block(b);
    SdpProblem::Row row;
    row.scalar_coef[s] = Rational(1);
    row.matrix_coef[{0, 0, 0}] = Rational(1);
    row.rhs = Rational(3);
    p.rows.push_back(row);

    std::ostringstream out;
    sdp_emit(p, out);
    std::string text = out.str();
    CHECK(text.find("-2") != std::string::npos);  // diagonal block of size 2

    // solution: Q = [2], u = d+ - d- = 1.5 - 0.5
    std::istringstream solution("1 1 1 2.0\n2 1 1 1.5\n2 2 2 0.5\n");
    SdpAssignment a = sdp_ingest(solution, p);
    CHECK(a.scalars[0] == 1.0);
    CHECK(a.row_value(p, p.rows[0]) == Approx(3.0));
}

TEST_CASE("the local projection solver handles the toy system") {
    Fixture f;
    auto assignment = solve_sdp_local(f.sdp, 4000, 1e-10);
    REQUIRE(assignment.has_value());
    SosWitness w = witness_from_assignment(f.sdp, f.enc, *assignment);
    SosCheckResult check = check_sos_witness(f.inst.target.to_polynomial(), w, 1e-6);
    INFO("residual " << check.max_residual << " " << check.failure);
    CHECK(check.ok);
}
