#include <catch2/catch.hpp>

#include "polyrank/rational.hpp"

using namespace polyrank;

TEST_CASE("decimal literals parse to exact rationals") {
    CHECK(parse_rational("0.51") == make_rational(51, 100));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-2.5") == make_rational(-5, 2));
    CHECK(parse_rational("1/3") == make_rational(1, 3));
    CHECK(parse_rational("-7/2") == make_rational(-7, 2));
    CHECK(parse_rational("0.999") == make_rational(999, 1000));
    CHECK(parse_rational("10.00") == Rational(10));
}

TEST_CASE("malformed literals are rejected") {
    CHECK_THROWS(parse_rational(""));
    CHECK_THROWS(parse_rational("1.2.3"));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("x"));
    CHECK_THROWS(parse_rational("1.2/3"));
}

TEST_CASE("rational powers and ceilings") {
    CHECK(rational_pow(make_rational(-1, 2), 3) == make_rational(-1, 8));
    CHECK(rational_pow(Rational(7), 0) == Rational(1));
    CHECK(rational_ceil(make_rational(3, 2)) == 2);
    CHECK(rational_ceil(Rational(4)) == 4);
    CHECK(rational_ceil(make_rational(-3, 2)) == -1);
}
