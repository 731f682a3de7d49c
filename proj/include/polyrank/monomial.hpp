#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyrank/rational.hpp"

namespace polyrank {

/// Power product of named variables. Zero exponents are never stored, so the
/// default-constructed Monomial is the unit monomial 1.
class Monomial {
public:
    Monomial() = default;

    static Monomial unit() { return Monomial(); }

    static Monomial var(const std::string& name, unsigned exponent = 1) {
        Monomial m;
        if (exponent > 0) m.exponents_[name] = exponent;
        return m;
    }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& [_, e] : exponents_) d += e;
        return d;
    }

    unsigned exponent(const std::string& name) const {
        auto it = exponents_.find(name);
        return it == exponents_.end() ? 0u : it->second;
    }

    bool is_unit() const { return exponents_.empty(); }

    Monomial operator*(const Monomial& other) const {
        Monomial result = *this;
        for (const auto& [v, e] : other.exponents_) result.exponents_[v] += e;
        return result;
    }

    const std::map<std::string, unsigned>& exponents() const { return exponents_; }

    bool operator==(const Monomial& other) const = default;
    auto operator<=>(const Monomial& other) const = default;

    std::string to_string() const {
        if (exponents_.empty()) return "1";
        std::string out;
        for (const auto& [v, e] : exponents_) {
            if (!out.empty()) out += "*";
            out += v;
            if (e > 1) out += "^" + std::to_string(e);
        }
        return out;
    }

private:
    std::map<std::string, unsigned> exponents_;
};

namespace detail {

inline void enumerate_exact_degree(const std::vector<std::string>& vars, std::size_t index,
                                   unsigned remaining, Monomial current,
                                   std::vector<Monomial>& out) {
    if (index + 1 == vars.size()) {
        out.push_back(current * Monomial::var(vars[index], remaining));
        return;
    }
    for (unsigned e = remaining; e + 1 != 0; --e)
        enumerate_exact_degree(vars, index + 1, remaining - e,
                               current * Monomial::var(vars[index], e), out);
}

}  // namespace detail

/// All monomials over `vars` of total degree at most `d`, in graded
/// lexicographic order with respect to the declared variable order.
inline std::vector<Monomial> monomials_up_to_degree(const std::vector<std::string>& vars, int d) {
    if (d < 0) throw std::invalid_argument("negative monomial degree bound");
    std::vector<Monomial> result;
    result.push_back(Monomial::unit());
    if (vars.empty()) return result;
    for (int total = 1; total <= d; ++total)
        detail::enumerate_exact_degree(vars, 0, static_cast<unsigned>(total), Monomial::unit(),
                                       result);
    return result;
}

}  // namespace polyrank
