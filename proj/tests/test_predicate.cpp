#include <catch2/catch.hpp>

#include "polyrank/predicate.hpp"

#include "test_util.hpp"

using namespace polyrank;

namespace {

const Polynomial x = Polynomial::variable("x");
const Polynomial one = Polynomial::constant(1);
const Polynomial ten = Polynomial::constant(10);

Predicate in_range() {
    // 1 <= x and x <= 10
    return Predicate::conjunction(Predicate::compare(one, "<=", x),
                                  Predicate::compare(x, "<=", ten));
}

Predicate random_predicate(CounterRng& rng, int depth) {
    if (depth == 0 || rng.next_below(3) == 0) {
        switch (rng.next_below(4)) {
            case 0: return Predicate::truth();
            case 1: return Predicate::falsity();
            default: {
                Polynomial p = testutil::random_polynomial(rng, {"x", "y"}, 1);
                return rng.next_below(2) ? Predicate::constraint(PolyConstraint::nonneg(p))
                                         : Predicate::constraint(PolyConstraint::positive(p));
            }
        }
    }
    switch (rng.next_below(3)) {
        case 0: return Predicate::negation(random_predicate(rng, depth - 1));
        case 1:
            return Predicate::conjunction(random_predicate(rng, depth - 1),
                                          random_predicate(rng, depth - 1));
        default:
            return Predicate::disjunction(random_predicate(rng, depth - 1),
                                          random_predicate(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("negated range splits into the two strict branches") {
    Dnf dnf = to_dnf(Predicate::negation(in_range()));
    REQUIRE(dnf.size() == 2);
    REQUIRE(dnf[0].size() == 1);
    REQUIRE(dnf[1].size() == 1);
    // not(1 <= x) is 1 - x > 0, not(x <= 10) is x - 10 > 0
    CHECK(dnf[0][0] == PolyConstraint::positive(one - x));
    CHECK(dnf[1][0] == PolyConstraint::positive(x - ten));
}

TEST_CASE("trivial DNF shapes") {
    CHECK(to_dnf(Predicate::truth()) == Dnf{{}});
    CHECK(to_dnf(Predicate::falsity()).empty());
    CHECK(to_dnf(Predicate::negation(Predicate::falsity())) == Dnf{{}});
}

TEST_CASE("conjunction distributes over disjunction") {
    Predicate a = Predicate::compare(x, ">=", one);
    Predicate b = Predicate::compare(x, "<=", -one);
    Predicate c = Predicate::compare(Polynomial::variable("y"), ">=", Polynomial());
    Dnf dnf = to_dnf(Predicate::conjunction(Predicate::disjunction(a, b), c));
    REQUIRE(dnf.size() == 2);
    CHECK(dnf[0].size() == 2);
    CHECK(dnf[1].size() == 2);
}

TEST_CASE("DNF preserves meaning on random predicates and points") {
    CounterRng rng(31, 0);
    int nontrivial = 0;
    for (int i = 0; i < 60; ++i) {
        Predicate p = random_predicate(rng, 3);
        Dnf dnf = to_dnf(p);
        Predicate q = dnf_to_predicate(dnf);
        for (int j = 0; j < 12; ++j) {
            std::map<std::string, Rational> point{
                {"x", make_rational(static_cast<long>(rng.next_below(17)) - 8, 2)},
                {"y", make_rational(static_cast<long>(rng.next_below(17)) - 8, 2)}};
            bool lhs = eval_predicate(p, point);
            bool rhs = eval_predicate(q, point);
            if (lhs != rhs) {
                CAPTURE(p.to_string(), q.to_string());
                REQUIRE(lhs == rhs);
            }
            if (lhs) ++nontrivial;
        }
    }
    CHECK(nontrivial > 0);
}

TEST_CASE("predicate evaluation follows the satisfaction relation") {
    CHECK(eval_predicate(in_range(), {{"x", Rational(5)}}));
    CHECK_FALSE(eval_predicate(in_range(), {{"x", make_rational(1, 2)}}));
    CHECK(eval_predicate(Predicate::negation(Predicate::falsity()), {}));
    CHECK(eval_predicate(in_range(), {{"x", Rational(1)}}));   // boundary, non-strict
    CHECK(eval_predicate(in_range(), {{"x", Rational(10)}}));

    // strict vs non-strict at the boundary
    Predicate strict = Predicate::compare(x, "<", one);
    CHECK_FALSE(eval_predicate(strict, {{"x", Rational(1)}}));
    CHECK(eval_predicate(strict, {{"x", make_rational(99, 100)}}));
}
