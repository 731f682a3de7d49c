#include <catch2/catch.hpp>

#include "polyrank/lp.hpp"

#include "test_util.hpp"

using namespace polyrank;

namespace {

/// Substitution check used after every solve: equalities hold exactly, sign
/// restrictions hold, and the reported objective matches the point.
void verify_solution(const LpProblem& lp, const LpSolution& sol) {
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE(sol.values.size() == lp.variables.size());
    for (std::size_t i = 0; i < lp.variables.size(); ++i)
        if (lp.variables[i].nonnegative) CHECK(sol.values[i] >= 0);
    for (const auto& row : lp.rows) {
        Rational lhs(0);
        for (const auto& [var, c] : row.coef) lhs += c * sol.values[static_cast<std::size_t>(var)];
        CHECK(lhs == row.rhs);
    }
    if (lp.has_objective) {
        Rational obj(0);
        for (const auto& [var, c] : lp.objective)
            obj += c * sol.values[static_cast<std::size_t>(var)];
        CHECK(obj == sol.objective);
    }
}

}  // namespace

TEST_CASE("a sign-contradictory system is infeasible") {
    LpProblem lp;
    int a = lp.add_variable("a", true);
    lp.add_equality({{a, Rational(1)}}, Rational(-1));
    CHECK(simplex_solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("minimize x subject to x >= 3") {
    LpProblem lp;
    int x = lp.add_variable("x", false);
    int s = lp.add_variable("s", true);
    lp.add_equality({{x, Rational(1)}, {s, Rational(-1)}}, Rational(3));
    lp.set_objective({{x, Rational(1)}});
    LpSolution sol = simplex_solve(lp);
    verify_solution(lp, sol);
    CHECK(sol.objective == Rational(3));
    CHECK(sol.values[0] == Rational(3));
}

TEST_CASE("an unconstrained direction is reported unbounded") {
    LpProblem lp;
    int x = lp.add_variable("x", true);
    lp.set_objective({{x, Rational(-1)}});
    CHECK(simplex_solve(lp).status == LpStatus::Unbounded);

    LpProblem lp2;
    int y = lp2.add_variable("y", false);
    int z = lp2.add_variable("z", true);
    lp2.add_equality({{y, Rational(1)}, {z, Rational(1)}}, Rational(5));
    lp2.set_objective({{y, Rational(1)}});
    CHECK(simplex_solve(lp2).status == LpStatus::Unbounded);
}

TEST_CASE("free variables can take negative values") {
    LpProblem lp;
    int x = lp.add_variable("x", false);
    lp.add_equality({{x, Rational(2)}}, Rational(-7));
    LpSolution sol = simplex_solve(lp);
    verify_solution(lp, sol);
    CHECK(sol.values[0] == make_rational(-7, 2));
}

TEST_CASE("random feasible systems with constructed solutions solve exactly") {
    CounterRng rng(41, 0);
    for (int trial = 0; trial < 25; ++trial) {
        LpProblem lp;
        std::size_t n = 4 + rng.next_below(4);
        std::size_t m = 2 + rng.next_below(3);
        std::vector<Rational> point;
        for (std::size_t i = 0; i < n; ++i) {
            bool nonneg = rng.next_below(3) != 0;
            lp.add_variable("v" + std::to_string(i), nonneg);
            long raw = static_cast<long>(rng.next_below(9)) - (nonneg ? 0 : 4);
            point.push_back(make_rational(raw, 1 + static_cast<long>(rng.next_below(2))));
        }
        for (std::size_t r = 0; r < m; ++r) {
            std::map<int, Rational> row;
            Rational rhs(0);
            for (std::size_t i = 0; i < n; ++i) {
                long c = static_cast<long>(rng.next_below(7)) - 3;
                if (c == 0) continue;
                row[static_cast<int>(i)] = Rational(c);
                rhs += Rational(c) * point[i];
            }
            lp.add_equality(std::move(row), rhs);
        }
        LpSolution sol = simplex_solve(lp);
        verify_solution(lp, sol);
    }
}

TEST_CASE("a classic cycling-prone degenerate program terminates at its optimum") {
    // min -3/4 x1 + 150 x2 - 1/50 x3 + 6 x4
    // s.t. 1/4 x1 - 60 x2 - 1/25 x3 + 9 x4 <= 0
    //      1/2 x1 - 90 x2 - 1/50 x3 + 3 x4 <= 0
    //      x3 <= 1, all nonnegative; optimum -1/20
    LpProblem lp;
    int x1 = lp.add_variable("x1", true);
    int x2 = lp.add_variable("x2", true);
    int x3 = lp.add_variable("x3", true);
    int x4 = lp.add_variable("x4", true);
    int s1 = lp.add_variable("s1", true);
    int s2 = lp.add_variable("s2", true);
    int s3 = lp.add_variable("s3", true);
    lp.add_equality({{x1, make_rational(1, 4)},
                     {x2, Rational(-60)},
                     {x3, make_rational(-1, 25)},
                     {x4, Rational(9)},
                     {s1, Rational(1)}},
                    Rational(0));
    lp.add_equality({{x1, make_rational(1, 2)},
                     {x2, Rational(-90)},
                     {x3, make_rational(-1, 50)},
                     {x4, Rational(3)},
                     {s2, Rational(1)}},
                    Rational(0));
    lp.add_equality({{x3, Rational(1)}, {s3, Rational(1)}}, Rational(1));
    lp.set_objective({{x1, make_rational(-3, 4)},
                      {x2, Rational(150)},
                      {x3, make_rational(-1, 50)},
                      {x4, Rational(6)}});
    LpSolution sol = simplex_solve(lp);
    verify_solution(lp, sol);
    CHECK(sol.objective == make_rational(-1, 20));
}

TEST_CASE("redundant rows are tolerated") {
    LpProblem lp;
    int x = lp.add_variable("x", true);
    int y = lp.add_variable("y", true);
    lp.add_equality({{x, Rational(1)}, {y, Rational(1)}}, Rational(4));
    lp.add_equality({{x, Rational(2)}, {y, Rational(2)}}, Rational(8));  // duplicate
    lp.set_objective({{x, Rational(1)}});
    LpSolution sol = simplex_solve(lp);
    verify_solution(lp, sol);
    CHECK(sol.objective == Rational(0));
}

TEST_CASE("contradictory row combinations are detected as infeasible") {
    CounterRng rng(43, 0);
    for (int trial = 0; trial < 25; ++trial) {
        LpProblem lp;
        std::size_t n = 3 + rng.next_below(4);
        std::vector<Rational> point;
        for (std::size_t i = 0; i < n; ++i) {
            lp.add_variable("v" + std::to_string(i), true);
            point.push_back(make_rational(static_cast<long>(rng.next_below(6)), 1));
        }
        std::map<int, Rational> row1, row2, row3;
        Rational b1(0), b2(0);
        for (std::size_t i = 0; i < n; ++i) {
            Rational c1(static_cast<long>(rng.next_below(7)) - 3);
            Rational c2(static_cast<long>(rng.next_below(7)) - 3);
            if (c1 != 0) row1[static_cast<int>(i)] = c1;
            if (c2 != 0) row2[static_cast<int>(i)] = c2;
            Rational sum = c1 + c2;
            if (sum != 0) row3[static_cast<int>(i)] = sum;
            b1 += c1 * point[i];
            b2 += c2 * point[i];
        }
        lp.add_equality(row1, b1);
        lp.add_equality(row2, b2);
        // the third row is the sum of the first two with a shifted right-hand
        // side, so no point can satisfy all three
        lp.add_equality(row3, b1 + b2 + 1);
        CHECK(simplex_solve(lp).status == LpStatus::Infeasible);
    }
}

TEST_CASE("known optima survive random row mixing") {
    CounterRng rng(47, 0);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 2 + rng.next_below(3);
        // min sum x_i subject to x_i >= c_i with c_i >= 0: optimum sum c_i
        std::vector<Rational> c;
        Rational expected(0);
        for (std::size_t i = 0; i < n; ++i) {
            c.push_back(make_rational(static_cast<long>(rng.next_below(9)), 2));
            expected += c.back();
        }
        // rows x_i - s_i = c_i, then mixed by adding random multiples of
        // other rows (row operations preserve the feasible set)
        std::vector<std::map<int, Rational>> rows(n);
        std::vector<Rational> rhs(n);
        LpProblem lp;
        for (std::size_t i = 0; i < n; ++i) lp.add_variable("x" + std::to_string(i), false);
        for (std::size_t i = 0; i < n; ++i) lp.add_variable("s" + std::to_string(i), true);
        for (std::size_t i = 0; i < n; ++i) {
            rows[i][static_cast<int>(i)] = 1;
            rows[i][static_cast<int>(n + i)] = -1;
            rhs[i] = c[i];
        }
        for (int mix = 0; mix < 6; ++mix) {
            std::size_t a = rng.next_below(n), b = rng.next_below(n);
            if (a == b) continue;
            Rational factor(static_cast<long>(rng.next_below(5)) - 2);
            if (factor == 0) continue;
            for (const auto& [var, coef] : rows[b]) {
                rows[a][var] += factor * coef;
                if (rows[a][var] == 0) rows[a].erase(var);
            }
            rhs[a] += factor * rhs[b];
        }
        for (std::size_t i = 0; i < n; ++i) lp.add_equality(rows[i], rhs[i]);
        std::map<int, Rational> objective;
        for (std::size_t i = 0; i < n; ++i) objective[static_cast<int>(i)] = 1;
        lp.set_objective(objective);

        LpSolution sol = simplex_solve(lp);
        verify_solution(lp, sol);
        CHECK(sol.objective == expected);
    }
}

TEST_CASE("problems render for debugging") {
    LpProblem lp;
    int x = lp.add_variable("x", false);
    int s = lp.add_variable("s", true);
    lp.add_equality({{x, Rational(1)}, {s, Rational(-1)}}, Rational(3));
    lp.set_objective({{x, Rational(1)}});
    std::string text = lp.to_string();
    CHECK(text.find("minimize") != std::string::npos);
    CHECK(text.find("s >= 0") != std::string::npos);
    CHECK(text.find("= 3") != std::string::npos);
}
