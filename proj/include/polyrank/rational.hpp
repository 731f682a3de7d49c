#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polyrank {

/// Exact arbitrary-precision rational. All library arithmetic outside the
/// SDP/simulation boundary is carried out in this type.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "12", "-3", "7/2" or decimal notation like "0.51" / "-2.5" into an
/// exact rational. Decimal digits become powers of ten, no rounding.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string digits;
    std::string frac;
    std::string den;
    bool seen_dot = false, seen_slash = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '.') {
            if (seen_dot || seen_slash) throw std::invalid_argument("bad rational literal: " + text);
            seen_dot = true;
        } else if (c == '/') {
            if (seen_slash || seen_dot) throw std::invalid_argument("bad rational literal: " + text);
            seen_slash = true;
        } else if (c >= '0' && c <= '9') {
            (seen_slash ? den : seen_dot ? frac : digits) += c;
        } else {
            throw std::invalid_argument("bad rational literal: " + text);
        }
    }
    if (digits.empty() && frac.empty()) throw std::invalid_argument("bad rational literal: " + text);
    if (digits.empty()) digits = "0";
    Rational value;
    if (seen_slash) {
        if (den.empty()) throw std::invalid_argument("bad rational literal: " + text);
        mpz_class n(digits, 10), d(den, 10);  // base 10 always; no octal auto-detection
        if (d == 0) throw std::invalid_argument("zero denominator: " + text);
        value = Rational(n) / Rational(d);
    } else {
        mpz_class n(digits + frac, 10);
        mpz_class d(1);
        for (std::size_t i = 0; i < frac.size(); ++i) d *= 10;
        value = Rational(n) / Rational(d);
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

inline Rational rational_pow(const Rational& base, unsigned exponent) {
    if (exponent == 0) return Rational(1);
    Rational result;
    mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    return result;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Smallest integer >= q.
inline mpz_class rational_ceil(const Rational& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace polyrank
