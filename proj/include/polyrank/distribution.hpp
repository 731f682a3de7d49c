#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "polyrank/rational.hpp"

namespace polyrank {

/// Bounded sampling distribution: either a finite point-mass list or a
/// continuous uniform over a closed interval. The support is always a closed
/// bounded interval; for point masses it is the convex hull of the outcomes.
class Distribution {
public:
    enum class Kind { PointMass, Uniform };

    static Distribution uniform(const Rational& lo, const Rational& hi) {
        if (!(lo < hi)) throw std::invalid_argument("uniform distribution requires lo < hi");
        Distribution d;
        d.kind_ = Kind::Uniform;
        d.lo_ = lo;
        d.hi_ = hi;
        return d;
    }

    static Distribution point_masses(std::vector<std::pair<Rational, Rational>> outcomes) {
        if (outcomes.empty()) throw std::invalid_argument("empty point-mass distribution");
        Rational total(0);
        Rational lo = outcomes.front().first, hi = outcomes.front().first;
        for (const auto& [value, prob] : outcomes) {
            if (!(prob > 0)) throw std::invalid_argument("point-mass probabilities must be positive");
            total += prob;
            if (value < lo) lo = value;
            if (value > hi) hi = value;
        }
        if (total != 1) throw std::invalid_argument("point-mass probabilities must sum to 1");
        Distribution d;
        d.kind_ = Kind::PointMass;
        d.outcomes_ = std::move(outcomes);
        d.lo_ = lo;
        d.hi_ = hi;
        return d;
    }

    Kind kind() const { return kind_; }
    const Rational& support_lo() const { return lo_; }
    const Rational& support_hi() const { return hi_; }
    const std::vector<std::pair<Rational, Rational>>& outcomes() const { return outcomes_; }

    bool operator==(const Distribution& other) const = default;

private:
    Distribution() = default;

    Kind kind_ = Kind::PointMass;
    Rational lo_, hi_;
    std::vector<std::pair<Rational, Rational>> outcomes_;
};

/// Raw moment E[Z^k], exact. Uniform(a,b) integrates to
/// (b^{k+1} - a^{k+1}) / ((k+1)(b-a)).
inline Rational moment(const Distribution& d, unsigned k) {
    if (k == 0) return Rational(1);
    if (d.kind() == Distribution::Kind::Uniform) {
        const Rational& a = d.support_lo();
        const Rational& b = d.support_hi();
        return (rational_pow(b, k + 1) - rational_pow(a, k + 1)) /
               (Rational(k + 1) * (b - a));
    }
    Rational sum(0);
    for (const auto& [value, prob] : d.outcomes()) sum += prob * rational_pow(value, k);
    return sum;
}

}  // namespace polyrank
