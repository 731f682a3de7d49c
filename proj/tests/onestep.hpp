#pragma once

// One-step sampling check shared by the simulation tests and the acceptance
// suite: the sample mean of eta at the successor configuration must stay
// below the pre-expectation at the current one (up to sampling error).

#include <cmath>

#include "polyrank/preexpectation.hpp"
#include "polyrank/simulate.hpp"

namespace onestep {

struct Stats {
    double mean = 0;
    double stderr_mean = 0;
    double pre = 0;

    bool within(double sigmas, double slack = 1e-9) const {
        return mean <= pre + sigmas * stderr_mean + slack;
    }
};

inline Stats eta_one_step(const polyrank::ControlFlowGraph& g,
                          const std::map<int, polyrank::Polynomial>& eta,
                          const polyrank::Rational& K, const polyrank::Configuration& config,
                          polyrank::Scheduler& scheduler, int samples, std::uint64_t seed) {
    using namespace polyrank;
    Interpreter interp(g);
    auto eta_at = [&](int label) -> const Polynomial& {
        static const std::map<int, Polynomial> empty;
        static Polynomial terminal;
        if (label == g.terminal) {
            terminal = Polynomial::constant(K);
            return terminal;
        }
        return eta.at(label);
    };

    double sum = 0, sum_sq = 0;
    std::vector<Configuration> history{config};
    for (int i = 0; i < samples; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        Configuration next = interp.step(config, rng, scheduler, history);
        std::map<std::string, Rational> point;
        for (std::size_t v = 0; v < g.program_vars.size(); ++v)
            point[g.program_vars[v]] = Rational(next.values[v]);
        double value = to_double(evaluate(eta_at(next.label), point));
        sum += value;
        sum_sq += value * value;
    }
    Stats stats;
    stats.mean = sum / samples;
    double var = std::max(0.0, sum_sq / samples - stats.mean * stats.mean);
    stats.stderr_mean = std::sqrt(var / samples);

    std::map<std::string, Rational> here;
    for (std::size_t v = 0; v < g.program_vars.size(); ++v)
        here[g.program_vars[v]] = Rational(config.values[v]);
    stats.pre = polyrank::to_double(pre_expectation_value(g, eta, K, config.label, here));
    return stats;
}

}  // namespace onestep
