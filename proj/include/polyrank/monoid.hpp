#pragma once

#include <set>
#include <stdexcept>
#include <vector>

#include "polyrank/polynomial.hpp"

namespace polyrank {

/// All distinct products of at most k gamma members (with repetition),
/// including the empty product 1, ordered by number of multiplicands and then
/// lexicographically by index sequence. |result| = C(|gamma|+k, k) when no two
/// products collide.
inline std::vector<Polynomial> monoid_elements(const std::vector<Polynomial>& gamma, int k) {
    if (k < 0) throw std::invalid_argument("monoid multiplicand bound must be nonnegative");
    std::vector<Polynomial> result;
    std::set<Polynomial> seen;
    auto push = [&](const Polynomial& p) {
        if (seen.insert(p).second) result.push_back(p);
    };
    push(Polynomial::constant(1));
    std::vector<Polynomial> level{Polynomial::constant(1)};
    std::vector<std::size_t> level_start{0};  // first factor index usable by each element
    for (int depth = 0; depth < k; ++depth) {
        std::vector<Polynomial> next_level;
        std::vector<std::size_t> next_start;
        for (std::size_t e = 0; e < level.size(); ++e) {
            for (std::size_t i = level_start[e]; i < gamma.size(); ++i) {
                Polynomial p = level[e] * gamma[i];
                push(p);
                next_level.push_back(std::move(p));
                next_start.push_back(i);
            }
        }
        level = std::move(next_level);
        level_start = std::move(next_start);
    }
    return result;
}

/// The 2^m products g_w = prod g_i^{w_i} over w in {0,1}^m used by the
/// preordering, ordered by w counting up in binary (so 1 comes first).
inline std::vector<Polynomial> subset_products(const std::vector<Polynomial>& gamma,
                                               unsigned cap = 12) {
    if (gamma.size() > cap)
        throw std::invalid_argument("subset_products: " + std::to_string(gamma.size()) +
                                    " constraint polynomials exceed the 2^m cap of " +
                                    std::to_string(cap));
    std::vector<Polynomial> result;
    std::size_t total = std::size_t{1} << gamma.size();
    for (std::size_t w = 0; w < total; ++w) {
        Polynomial p = Polynomial::constant(1);
        for (std::size_t i = 0; i < gamma.size(); ++i)
            if (w & (std::size_t{1} << i)) p *= gamma[i];
        result.push_back(std::move(p));
    }
    return result;
}

}  // namespace polyrank
