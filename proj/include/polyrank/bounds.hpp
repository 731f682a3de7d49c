#pragma once

#include <cmath>
#include <map>
#include <optional>

#include "polyrank/polynomial.hpp"

namespace polyrank {

/// Upper bound (eta(l0, x0) - K) / epsilon on the expected termination time,
/// taken over all schedulers.
inline Rational ub(const Polynomial& eta_initial, const std::map<std::string, Rational>& x0,
                   const Rational& epsilon, const Rational& K) {
    if (!(epsilon > 0)) throw std::invalid_argument("ub requires epsilon > 0");
    return (evaluate(eta_initial, x0) - K) / epsilon;
}

/// The same bound as a polynomial in the initial valuation.
inline Polynomial ub_polynomial(const Polynomial& eta_initial, const Rational& epsilon,
                                const Rational& K) {
    if (!(epsilon > 0)) throw std::invalid_argument("ub requires epsilon > 0");
    return (eta_initial - Polynomial::constant(K)) * (1 / epsilon);
}

/// Hoeffding tail bound for a difference-bounded ranking supermartingale:
///   P(T > n) <= exp(-2 (eps(n-1) - eta0)^2 / ((n-1)(b-a)^2))
/// defined when eps(n-1) > eta0. The exponent is computed exactly before the
/// single rounding to double.
inline std::optional<double> concentration_bound(const Rational& eta0, const Rational& epsilon,
                                                 const Rational& a, const Rational& b,
                                                 std::uint64_t n) {
    if (!(epsilon > 0)) throw std::invalid_argument("concentration bound requires epsilon > 0");
    if (!(b > a)) throw std::invalid_argument("concentration bound requires b > a");
    if (n < 2) return std::nullopt;
    Rational steps(static_cast<long>(n - 1));
    Rational slack = epsilon * steps - eta0;
    if (!(slack > 0)) return std::nullopt;
    Rational width = b - a;
    Rational exponent = Rational(-2) * slack * slack / (steps * width * width);
    return std::exp(to_double(exponent));
}

/// Smallest step count from which the exponential tail decay applies:
/// ceil(eta0 / epsilon) + 2.
inline mpz_class minimal_concentration_step(const Rational& eta0, const Rational& epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("requires epsilon > 0");
    return rational_ceil(eta0 / epsilon) + 2;
}

}  // namespace polyrank
