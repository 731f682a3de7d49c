#include <catch2/catch.hpp>

#include "polyrank/handelman.hpp"

using namespace polyrank;

namespace {

const Polynomial x = Polynomial::variable("x");
const Polynomial one = Polynomial::constant(1);

PatternInstance concrete_instance(std::vector<Polynomial> gamma, Polynomial target) {
    PatternInstance inst;
    inst.gamma = std::move(gamma);
    inst.target = SymbolicPolynomial(std::move(target));
    return inst;
}

}  // namespace

TEST_CASE("encoding 2-x over {1-x, 1+x} with two multiplicands") {
    PatternInstance inst =
        concrete_instance({one - x, one + x}, Polynomial::constant(2) - x);
    LpProblem lp;
    std::map<UnknownId, int> unknowns;  // no template unknowns in this instance
    HandelmanEncoding enc = handelman_encode(inst, 2, lp, unknowns, "t");

    CHECK(enc.monoid.size() == 6);
    CHECK(lp.variables.size() == 6);   // one nonnegative unknown per monoid element
    CHECK(lp.rows.size() == 3);        // monomials 1, x, x^2
    for (const auto& v : lp.variables) CHECK(v.nonnegative);

    LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    HandelmanWitness w;
    w.monoid = enc.monoid;
    for (int var : enc.coefficient_vars) w.coefficients.push_back(sol.values[var]);
    CHECK(check_handelman_witness(inst, w));
}

TEST_CASE("the hand witness 1*1 + 1*(1-x) passes and perturbations fail") {
    PatternInstance inst =
        concrete_instance({one - x, one + x}, Polynomial::constant(2) - x);
    HandelmanWitness w;
    w.monoid = monoid_elements(inst.gamma, 2);
    w.coefficients = {Rational(1), Rational(1), Rational(0),
                      Rational(0), Rational(0), Rational(0)};
    CHECK(check_handelman_witness(inst, w));

    HandelmanWitness wrong = w;
    wrong.coefficients[0] = make_rational(9, 10);
    CHECK_FALSE(check_handelman_witness(inst, wrong));

    HandelmanWitness negative = w;
    negative.coefficients[3] = make_rational(-1, 10);
    CHECK_FALSE(check_handelman_witness(inst, negative));

    HandelmanWitness short_list = w;
    short_list.coefficients.pop_back();
    CHECK_FALSE(check_handelman_witness(inst, short_list));
}

TEST_CASE("nonlinear gamma members are rejected") {
    PatternInstance inst = concrete_instance({one - x * x}, Polynomial::constant(2) - x);
    LpProblem lp;
    std::map<UnknownId, int> unknowns;
    CHECK_THROWS_AS(handelman_encode(inst, 2, lp, unknowns, "t"), EncodingError);
}

TEST_CASE("targets with template unknowns mix into the equalities") {
    // target = u0 * x + 3; the row for monomial x must reference u0's column
    PatternInstance inst;
    inst.gamma = {one - x, one + x};
    inst.target = SymbolicPolynomial::term(Monomial::var("x"), AffineExpr::unknown(0)) +
                  SymbolicPolynomial(Polynomial::constant(3));
    LpProblem lp;
    std::map<UnknownId, int> unknowns{{0, lp.add_variable("u0", false)}};
    handelman_encode(inst, 1, lp, unknowns, "t");
    bool references_unknown = false;
    for (const auto& row : lp.rows)
        if (row.coef.count(0)) references_unknown = true;
    CHECK(references_unknown);

    // unregistered unknowns are encoding errors
    PatternInstance bad = inst;
    bad.target = SymbolicPolynomial::term(Monomial::unit(), AffineExpr::unknown(7));
    LpProblem lp2;
    std::map<UnknownId, int> empty;
    CHECK_THROWS_AS(handelman_encode(bad, 1, lp2, empty, "t"), EncodingError);
}

TEST_CASE("an instance with empty gamma still encodes (constant targets)") {
    PatternInstance inst = concrete_instance({}, Polynomial::constant(5));
    LpProblem lp;
    std::map<UnknownId, int> unknowns;
    HandelmanEncoding enc = handelman_encode(inst, 3, lp, unknowns, "t");
    CHECK(enc.monoid.size() == 1);
    LpSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.values[0] == Rational(5));
}
