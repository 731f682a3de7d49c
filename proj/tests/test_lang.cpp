#include <catch2/catch.hpp>

#include "polyrank/parser.hpp"
#include "polyrank/program.hpp"

#include "test_util.hpp"

using namespace polyrank;

TEST_CASE("gambler's ruin parses into the expected structure") {
    Program prog = testutil::load_program("gamblers_ruin.prob");
    REQUIRE(prog.variables == std::vector<std::string>{"x"});
    REQUIRE(prog.samplings.size() == 1);
    CHECK(prog.samplings[0].first == "r");
    CHECK(prog.samplings[0].second.kind() == Distribution::Kind::PointMass);
    CHECK(prog.initial.at("x") == Rational(5));

    REQUIRE(prog.body.kind == Stmt::Kind::While);
    REQUIRE(prog.body.invariant.has_value());
    CHECK(eval_predicate(*prog.body.invariant, {{"x", Rational(11)}}));
    CHECK_FALSE(eval_predicate(*prog.body.invariant, {{"x", Rational(12)}}));
    CHECK(eval_predicate(prog.body.guard, {{"x", Rational(5)}}));
    CHECK_FALSE(eval_predicate(prog.body.guard, {{"x", make_rational(1, 2)}}));

    const Stmt& outer_if = prog.body.children[0];
    REQUIRE(outer_if.kind == Stmt::Kind::If);
    CHECK(outer_if.guard_kind == Stmt::GuardKind::Star);
    const Stmt& prob_if = outer_if.children[1];
    REQUIRE(prob_if.kind == Stmt::Kind::If);
    CHECK(prob_if.guard_kind == Stmt::GuardKind::Prob);
    CHECK(prob_if.prob == make_rational(51, 100));
}

TEST_CASE("one-statement program") {
    Program prog = parse("init x = 0\nskip");
    CHECK(prog.body.kind == Stmt::Kind::Skip);
}

TEST_CASE("parse errors carry positions and name the offense") {
    // undeclared sampling variable on a right-hand side
    CHECK_THROWS_MATCHES(parse("init x = 0\nx := r + x"), ParseError,
                         Catch::Matchers::Predicate<ParseError>([](const ParseError& e) {
                             return std::string(e.what()).find("undeclared") !=
                                    std::string::npos;
                         }));

    // sampling variable used in a guard
    CHECK_THROWS_MATCHES(
        parse("dist r = uniform(0, 1)\ninit x = 0\nwhile r <= 1 do skip od"), ParseError,
        Catch::Matchers::Predicate<ParseError>([](const ParseError& e) {
            return std::string(e.what()).find("sampling variable") != std::string::npos;
        }));

    // probability outside (0,1)
    CHECK_THROWS_AS(parse("init x = 0\nif prob(1.5) then skip else skip fi"), ParseError);
    CHECK_THROWS_AS(parse("init x = 0\nif prob(1) then skip else skip fi"), ParseError);

    // malformed syntax reports line and column
    try {
        parse("init x = 0\nwhile x <= do skip od");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    // equality is not a primitive
    CHECK_THROWS_MATCHES(parse("init x = 0\nwhile x = 0 do skip od"), ParseError,
                         Catch::Matchers::Predicate<ParseError>([](const ParseError& e) {
                             return std::string(e.what()).find("equality") != std::string::npos;
                         }));

    // assignment list mismatches
    CHECK_THROWS_AS(parse("init x = 0\ninit y = 0\nx, x := 1, 2"), ParseError);
    CHECK_THROWS_AS(parse("init x = 0\ninit y = 0\nx, y := 1"), ParseError);
    CHECK_THROWS_AS(parse("dist r = uniform(0,1)\ninit x = 0\nr := 1"), ParseError);
}

TEST_CASE("expressions respect precedence and parentheses") {
    Program prog = parse("init a = 0\ninit x = 0\nx := a * x * (1 - x)");
    const Polynomial& rhs = prog.body.values[0];
    Polynomial a = Polynomial::variable("a");
    Polynomial x = Polynomial::variable("x");
    CHECK(rhs == a * x - a * x * x);

    Program powers = parse("init x = 0\nx := x^2 - 2 * x + 1");
    CHECK(powers.body.values[0] ==
          Polynomial::variable("x").pow(2) - Polynomial::constant(2) * Polynomial::variable("x") +
              Polynomial::constant(1));

    Program chained = parse("init x = 0\nwhile 0 <= x <= 10 do skip od");
    CHECK(eval_predicate(chained.body.guard, {{"x", Rational(10)}}));
    CHECK_FALSE(eval_predicate(chained.body.guard, {{"x", Rational(11)}}));
}

TEST_CASE("printing and re-parsing bundled programs is the identity") {
    for (const auto* name :
         {"gamblers_ruin.prob", "gamblers_ruin_variant.prob", "logistic_map.prob", "decay.prob",
          "random_walk.prob", "nested_loop.prob"}) {
        Program prog = testutil::load_program(name);
        Program reparsed = parse(print_program(prog));
        INFO(name);
        CHECK(prog == reparsed);
    }
}

TEST_CASE("printing a hand-built program round-trips") {
    Program prog = parse(
        "dist r = discrete { 1: 0.25, 0: 0.5, -1: 0.25 }\n"
        "init x = 3\ninit y = -2\n"
        "[x >= 0 or y <= 1]\n"
        "while x >= 1 and not (y >= 5) do\n"
        "  x, y := x - 1, y + r;\n"
        "  skip\n"
        "od");
    CHECK(parse(print_program(prog)) == prog);
}

TEST_CASE("parenthesized predicates and expressions disambiguate") {
    Program a = parse("init x = 0\nwhile (x + 1) * 2 <= 3 do skip od");
    CHECK(eval_predicate(a.body.guard, {{"x", make_rational(1, 2)}}));
    CHECK_FALSE(eval_predicate(a.body.guard, {{"x", Rational(1)}}));

    Program b = parse("init x = 0\nwhile ((x <= 1)) do skip od");
    CHECK(eval_predicate(b.body.guard, {{"x", Rational(1)}}));

    Program c = parse(
        "init x = 0\ninit y = 0\n"
        "while (0 <= x and x <= 1) or x >= 5 do skip od");
    CHECK(eval_predicate(c.body.guard, {{"x", Rational(6)}, {"y", Rational(0)}}));
    CHECK_FALSE(eval_predicate(c.body.guard, {{"x", Rational(3)}, {"y", Rational(0)}}));

    Program d = parse(
        "init x = 0\ninit y = 0\n"
        "while not (x >= 1 and x <= 2) and (y >= 0 or x <= 0) do skip od");
    CHECK(eval_predicate(d.body.guard, {{"x", Rational(3)}, {"y", Rational(0)}}));
    CHECK_FALSE(eval_predicate(d.body.guard, {{"x", make_rational(3, 2)}, {"y", Rational(0)}}));
    CHECK(parse(print_program(d)) == d);
}
