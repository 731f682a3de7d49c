#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyrank/rational.hpp"

namespace polyrank {

/// Linear program in equality form: variables tagged nonnegative or free,
/// exact rational equalities, optional linear objective (minimized).
struct LpProblem {
    struct Variable {
        std::string name;
        bool nonnegative = true;
    };

    struct Row {
        std::map<int, Rational> coef;
        Rational rhs;
    };

    std::vector<Variable> variables;
    std::vector<Row> rows;
    std::map<int, Rational> objective;  // minimize; empty map means feasibility only
    bool has_objective = false;

    int add_variable(const std::string& name, bool nonnegative) {
        variables.push_back(Variable{name, nonnegative});
        return static_cast<int>(variables.size() - 1);
    }

    void add_equality(std::map<int, Rational> coef, Rational rhs) {
        for (const auto& [idx, _] : coef)
            if (idx < 0 || idx >= static_cast<int>(variables.size()))
                throw std::invalid_argument("equality references undeclared variable");
        rows.push_back(Row{std::move(coef), std::move(rhs)});
    }

    void set_objective(std::map<int, Rational> coef) {
        for (const auto& [idx, _] : coef)
            if (idx < 0 || idx >= static_cast<int>(variables.size()))
                throw std::invalid_argument("objective references undeclared variable");
        objective = std::move(coef);
        has_objective = true;
    }

    std::string to_string() const {
        std::string out;
        if (has_objective) {
            out += "minimize";
            for (const auto& [idx, c] : objective)
                out += " + " + c.get_str() + "*" + variables[idx].name;
            out += "\n";
        }
        for (const auto& row : rows) {
            std::string lhs;
            for (const auto& [idx, c] : row.coef) {
                if (!lhs.empty()) lhs += " + ";
                lhs += c.get_str() + "*" + variables[idx].name;
            }
            out += (lhs.empty() ? "0" : lhs) + " = " + row.rhs.get_str() + "\n";
        }
        for (const auto& v : variables)
            if (v.nonnegative) out += v.name + " >= 0\n";
        return out;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> values;  // per LpProblem variable
    Rational objective;

    bool feasible() const { return status == LpStatus::Optimal; }
};

namespace detail {

/// Dense exact-rational two-phase simplex. Dantzig pricing by default;
/// switches to Bland's rule after a streak of degenerate pivots, which
/// guarantees termination.
class SimplexTableau {
public:
    SimplexTableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

class SimplexSolver {
public:
    // columns: structural columns with sign handled by caller (all x >= 0)
    SimplexSolver(std::vector<std::vector<std::pair<int, Rational>>> columns,
                  std::vector<Rational> rhs, std::map<int, Rational> objective)
        : num_cols_(columns.size()), num_rows_(rhs.size()), objective_(std::move(objective)) {
        // rhs must be nonnegative for the artificial basis; flip rows
        std::vector<bool> flip(num_rows_, false);
        for (std::size_t r = 0; r < num_rows_; ++r)
            if (rhs[r] < 0) flip[r] = true;

        tableau_ = std::make_unique<SimplexTableau>(num_rows_ + 1, num_cols_ + num_rows_ + 1);
        for (std::size_t c = 0; c < num_cols_; ++c)
            for (const auto& [r, v] : columns[c])
                tableau_->at(static_cast<std::size_t>(r), c) =
                    flip[static_cast<std::size_t>(r)] ? Rational(-v) : v;
        for (std::size_t r = 0; r < num_rows_; ++r) {
            tableau_->at(r, num_cols_ + r) = 1;  // artificial
            tableau_->at(r, rhs_col()) = flip[r] ? Rational(-rhs[r]) : rhs[r];
        }
        basis_.resize(num_rows_);
        for (std::size_t r = 0; r < num_rows_; ++r)
            basis_[r] = static_cast<int>(num_cols_ + r);
    }

    LpStatus solve() {
        // Phase 1: minimize the sum of artificials. Reduced costs of the
        // basic artificial columns start at zero; once an artificial leaves
        // the basis it never re-enters.
        for (std::size_t r = 0; r < num_rows_; ++r)
            for (std::size_t c = 0; c <= rhs_col(); ++c)
                tableau_->at(num_rows_, c) -= tableau_->at(r, c);
        for (std::size_t r = 0; r < num_rows_; ++r) tableau_->at(num_rows_, num_cols_ + r) = 0;
        if (!iterate()) throw std::logic_error("phase 1 cannot be unbounded");
        if (tableau_->at(num_rows_, rhs_col()) != 0) return LpStatus::Infeasible;
        remove_artificials_from_basis();

        // Phase 2: the user objective over structural columns only.
        for (std::size_t c = 0; c <= rhs_col(); ++c) tableau_->at(num_rows_, c) = 0;
        for (const auto& [col, coef] : objective_) tableau_->at(num_rows_, static_cast<std::size_t>(col)) = coef;
        for (std::size_t r = 0; r < num_rows_; ++r) {
            int b = basis_[r];
            if (b < 0 || static_cast<std::size_t>(b) >= num_cols_) continue;
            Rational c = tableau_->at(num_rows_, static_cast<std::size_t>(b));
            if (c == 0) continue;
            for (std::size_t j = 0; j <= rhs_col(); ++j)
                tableau_->at(num_rows_, j) -= c * tableau_->at(r, j);
        }
        if (!iterate()) return LpStatus::Unbounded;
        return LpStatus::Optimal;
    }

    Rational value_of(std::size_t col) const {
        for (std::size_t r = 0; r < num_rows_; ++r)
            if (basis_[r] == static_cast<int>(col)) return tableau_->at(r, rhs_col());
        return Rational(0);
    }

    /// Objective value after phase 2 (tableau holds -z at the corner).
    Rational objective_value() const { return -tableau_->at(num_rows_, rhs_col()); }

private:
    std::size_t rhs_col() const { return num_cols_ + num_rows_; }

    bool column_allowed(std::size_t c) const { return c < num_cols_; }

    bool iterate() {
        const std::size_t degenerate_limit = 2 * (num_rows_ + num_cols_) + 16;
        std::size_t degenerate_streak = 0;
        bool bland = false;
        while (true) {
            // entering column
            std::size_t enter = rhs_col();
            if (bland) {
                for (std::size_t c = 0; c < rhs_col(); ++c) {
                    if (!column_allowed(c)) continue;
                    if (tableau_->at(num_rows_, c) < 0) {
                        enter = c;
                        break;
                    }
                }
            } else {
                const Rational* best = nullptr;
                for (std::size_t c = 0; c < rhs_col(); ++c) {
                    if (!column_allowed(c)) continue;
                    const Rational& rc = tableau_->at(num_rows_, c);
                    if (rc < 0 && (best == nullptr || rc < *best)) {
                        best = &rc;
                        enter = c;
                    }
                }
            }
            if (enter == rhs_col()) return true;  // optimal

            // ratio test; ties broken by smallest basis index (Bland)
            std::size_t leave = num_rows_;
            Rational best_ratio;
            for (std::size_t r = 0; r < num_rows_; ++r) {
                const Rational& a = tableau_->at(r, enter);
                if (!(a > 0)) continue;
                Rational ratio = tableau_->at(r, rhs_col()) / a;
                if (leave == num_rows_ || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave == num_rows_) return false;  // unbounded

            bool degenerate = tableau_->at(leave, rhs_col()) == 0;
            pivot(leave, enter);
            if (degenerate) {
                if (++degenerate_streak > degenerate_limit) bland = true;
            } else {
                degenerate_streak = 0;
            }
        }
    }

    void pivot(std::size_t prow, std::size_t pcol) {
        Rational inv = 1 / tableau_->at(prow, pcol);
        for (std::size_t c = 0; c <= rhs_col(); ++c) {
            Rational& v = tableau_->at(prow, c);
            if (v != 0) v *= inv;
        }
        tableau_->at(prow, pcol) = 1;
        for (std::size_t r = 0; r <= num_rows_; ++r) {
            if (r == prow) continue;
            Rational factor = tableau_->at(r, pcol);
            if (factor == 0) continue;
            for (std::size_t c = 0; c <= rhs_col(); ++c) {
                const Rational& p = tableau_->at(prow, c);
                if (p != 0) tableau_->at(r, c) -= factor * p;
            }
            tableau_->at(r, pcol) = 0;
        }
        basis_[prow] = static_cast<int>(pcol);
    }

    void remove_artificials_from_basis() {
        for (std::size_t r = 0; r < num_rows_; ++r) {
            if (basis_[r] < static_cast<int>(num_cols_)) continue;
            std::size_t pcol = rhs_col();
            for (std::size_t c = 0; c < num_cols_; ++c) {
                if (tableau_->at(r, c) != 0) {
                    pcol = c;
                    break;
                }
            }
            if (pcol != rhs_col()) {
                pivot(r, pcol);
            } else {
                // redundant row: every structural coefficient is zero; blank it
                for (std::size_t c = 0; c <= rhs_col(); ++c) tableau_->at(r, c) = 0;
                basis_[r] = -1;
            }
        }
    }

    std::size_t num_cols_, num_rows_;
    std::map<int, Rational> objective_;
    std::unique_ptr<SimplexTableau> tableau_;
    std::vector<int> basis_;
};

}  // namespace detail

/// Exact two-phase simplex. Free variables are split into differences of
/// nonnegative parts; the returned point satisfies every equality and sign
/// restriction exactly.
inline LpSolution simplex_solve(const LpProblem& lp) {
    // column mapping: nonnegative -> one column; free -> (plus, minus)
    std::vector<std::pair<std::size_t, std::size_t>> split(lp.variables.size());
    std::size_t num_cols = 0;
    for (std::size_t i = 0; i < lp.variables.size(); ++i) {
        if (lp.variables[i].nonnegative) {
            split[i] = {num_cols, num_cols};
            num_cols += 1;
        } else {
            split[i] = {num_cols, num_cols + 1};
            num_cols += 2;
        }
    }

    std::vector<std::vector<std::pair<int, Rational>>> columns(num_cols);
    std::vector<Rational> rhs;
    for (const auto& row : lp.rows) {
        int r = static_cast<int>(rhs.size());
        rhs.push_back(row.rhs);
        for (const auto& [var, c] : row.coef) {
            if (c == 0) continue;
            auto [plus, minus] = split[static_cast<std::size_t>(var)];
            columns[plus].emplace_back(r, c);
            if (minus != plus) columns[minus].emplace_back(r, Rational(-c));
        }
    }

    std::map<int, Rational> objective;
    if (lp.has_objective) {
        for (const auto& [var, c] : lp.objective) {
            if (c == 0) continue;
            auto [plus, minus] = split[static_cast<std::size_t>(var)];
            objective[static_cast<int>(plus)] += c;
            if (minus != plus) objective[static_cast<int>(minus)] -= c;
        }
    }

    detail::SimplexSolver solver(std::move(columns), std::move(rhs), std::move(objective));
    LpSolution solution;
    solution.status = solver.solve();
    if (solution.status != LpStatus::Optimal) return solution;

    solution.values.resize(lp.variables.size());
    for (std::size_t i = 0; i < lp.variables.size(); ++i) {
        auto [plus, minus] = split[i];
        Rational v = solver.value_of(plus);
        if (minus != plus) v -= solver.value_of(minus);
        solution.values[i] = v;
    }
    if (lp.has_objective) {
        Rational check(0);
        for (const auto& [var, c] : lp.objective)
            check += c * solution.values[static_cast<std::size_t>(var)];
        solution.objective = check;
    }
    return solution;
}

}  // namespace polyrank
