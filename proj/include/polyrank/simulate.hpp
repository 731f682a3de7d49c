#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "polyrank/cfg.hpp"
#include "polyrank/rng.hpp"

namespace polyrank {

/// Runtime configuration (l, x). Valuations are double precision: the
/// interpreter exists for statistical cross-validation, and exact rationals
/// are not viable across 10^6 multiplicative updates.
struct Configuration {
    int label = 0;
    std::vector<double> values;  // indexed by ControlFlowGraph::program_vars order

    bool operator==(const Configuration& other) const = default;
};

inline Configuration make_configuration(const ControlFlowGraph& g, int label,
                                        const std::map<std::string, double>& valuation) {
    Configuration c;
    c.label = label;
    c.values.reserve(g.program_vars.size());
    for (const auto& v : g.program_vars) {
        auto it = valuation.find(v);
        if (it == valuation.end()) throw std::invalid_argument("valuation misses variable " + v);
        c.values.push_back(it->second);
    }
    return c;
}

inline Configuration initial_configuration(const ControlFlowGraph& g) {
    Configuration c;
    c.label = g.initial;
    for (const auto& v : g.program_vars)
        c.values.push_back(to_double(g.initial_valuation.at(v)));
    return c;
}

namespace detail {

/// Polynomial flattened to indexed terms for fast double evaluation. Indices
/// refer to a combined vector: program variables first, sampling variables
/// after them.
struct CompiledPoly {
    struct Term {
        double coef;
        std::vector<std::pair<int, unsigned>> powers;
    };
    std::vector<Term> terms;

    double eval(std::span<const double> point) const {
        double sum = 0;
        for (const auto& t : terms) {
            double prod = t.coef;
            for (const auto& [idx, e] : t.powers) {
                double base = point[static_cast<std::size_t>(idx)];
                for (unsigned k = 0; k < e; ++k) prod *= base;
            }
            sum += prod;
        }
        return sum;
    }
};

struct CompiledPredicate {
    enum class Kind { True, False, Constraint, Not, And, Or };
    Kind kind = Kind::True;
    CompiledPoly poly;
    bool strict = false;
    std::vector<CompiledPredicate> children;

    bool eval(std::span<const double> point) const {
        switch (kind) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Constraint: {
                double v = poly.eval(point);
                return strict ? v > 0 : v >= 0;
            }
            case Kind::Not: return !children[0].eval(point);
            case Kind::And: return children[0].eval(point) && children[1].eval(point);
            case Kind::Or: return children[0].eval(point) || children[1].eval(point);
        }
        return false;
    }
};

struct CompiledSampler {
    bool uniform = false;
    double lo = 0, hi = 0;
    std::vector<std::pair<double, double>> cumulative;  // (cdf, value)

    double sample(CounterRng& rng) const {
        double u = rng.next_unit();
        if (uniform) return lo + u * (hi - lo);
        for (const auto& [cdf, value] : cumulative)
            if (u < cdf) return value;
        return cumulative.back().second;
    }
};

class VarIndex {
public:
    explicit VarIndex(const ControlFlowGraph& g) {
        for (const auto& v : g.program_vars) index_.emplace(v, next_++);
        for (const auto& [r, _] : g.samplings) index_.emplace(r, next_++);
    }

    int at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::invalid_argument("unknown variable " + name);
        return it->second;
    }

private:
    std::map<std::string, int> index_;
    int next_ = 0;
};

inline CompiledPoly compile_poly(const Polynomial& p, const VarIndex& idx) {
    CompiledPoly cp;
    for (const auto& [m, c] : p.terms()) {
        CompiledPoly::Term t;
        t.coef = to_double(c);
        for (const auto& [v, e] : m.exponents()) t.powers.emplace_back(idx.at(v), e);
        cp.terms.push_back(std::move(t));
    }
    return cp;
}

inline CompiledPredicate compile_predicate(const Predicate& p, const VarIndex& idx) {
    CompiledPredicate cp;
    switch (p.kind()) {
        case Predicate::Kind::True: cp.kind = CompiledPredicate::Kind::True; break;
        case Predicate::Kind::False: cp.kind = CompiledPredicate::Kind::False; break;
        case Predicate::Kind::Constraint:
            cp.kind = CompiledPredicate::Kind::Constraint;
            cp.poly = compile_poly(p.as_constraint().poly, idx);
            cp.strict = p.as_constraint().strict;
            break;
        case Predicate::Kind::Not: cp.kind = CompiledPredicate::Kind::Not; break;
        case Predicate::Kind::And: cp.kind = CompiledPredicate::Kind::And; break;
        case Predicate::Kind::Or: cp.kind = CompiledPredicate::Kind::Or; break;
    }
    for (const auto& child : p.children()) cp.children.push_back(compile_predicate(child, idx));
    return cp;
}

struct CompiledLabel {
    LabelKind kind = LabelKind::Terminal;
    std::vector<std::size_t> transition_indices;  // into cfg.transitions, in order
    // probabilistic
    std::vector<std::pair<double, int>> cumulative_targets;
    // conditional
    std::vector<std::pair<CompiledPredicate, int>> guarded_targets;
    // assignment
    int assign_target = 0;
    std::vector<std::pair<int, CompiledPoly>> updates;  // (program var index, rhs)
    // demonic
    std::vector<int> successors;
};

struct CompiledCfg {
    std::map<int, CompiledLabel> labels;
    std::vector<CompiledSampler> samplers;
    std::size_t num_program_vars = 0;
};

inline CompiledCfg compile_cfg(const ControlFlowGraph& g) {
    CompiledCfg cc;
    cc.num_program_vars = g.program_vars.size();
    VarIndex idx(g);
    for (const auto& [r, d] : g.samplings) {
        CompiledSampler s;
        s.lo = to_double(d.support_lo());
        s.hi = to_double(d.support_hi());
        if (d.kind() == Distribution::Kind::Uniform) {
            s.uniform = true;
        } else {
            double acc = 0;
            for (const auto& [value, prob] : d.outcomes()) {
                acc += to_double(prob);
                s.cumulative.emplace_back(acc, to_double(value));
            }
        }
        cc.samplers.push_back(std::move(s));
    }
    for (const auto& [id, kind] : g.labels) {
        CompiledLabel cl;
        cl.kind = kind;
        for (std::size_t ti = 0; ti < g.transitions.size(); ++ti) {
            const Transition& t = g.transitions[ti];
            if (t.source != id) continue;
            cl.transition_indices.push_back(ti);
            switch (kind) {
                case LabelKind::Probabilistic: {
                    double prev =
                        cl.cumulative_targets.empty() ? 0.0 : cl.cumulative_targets.back().first;
                    cl.cumulative_targets.emplace_back(prev + to_double(t.probability()),
                                                       t.target);
                    break;
                }
                case LabelKind::Conditional:
                    cl.guarded_targets.emplace_back(compile_predicate(t.guard(), idx), t.target);
                    break;
                case LabelKind::Assignment:
                    cl.assign_target = t.target;
                    for (const auto& [v, rhs] : t.update().assignments)
                        cl.updates.emplace_back(idx.at(v), compile_poly(rhs, idx));
                    break;
                case LabelKind::Demonic: cl.successors.push_back(t.target); break;
                case LabelKind::Terminal: break;
            }
        }
        cc.labels.emplace(id, std::move(cl));
    }
    return cc;
}

}  // namespace detail

/// Resolves demonic choices. Implementations used with parallel simulation
/// must be stateless; per-trial randomness comes through the supplied stream.
/// `path` always ends with the current configuration; schedulers that inspect
/// more than path.back() must override needs_history(), otherwise only the
/// last configuration is retained during simulation.
class Scheduler {
public:
    virtual ~Scheduler() = default;

    /// Returns an index into `options`, the outgoing transitions of the
    /// demonic label the path currently ends at.
    virtual std::size_t choose(const ControlFlowGraph& g,
                               const std::vector<Configuration>& path,
                               const std::vector<const Transition*>& options,
                               CounterRng& rng) = 0;

    virtual bool needs_history() const { return false; }
};

class UniformScheduler final : public Scheduler {
public:
    std::size_t choose(const ControlFlowGraph&, const std::vector<Configuration>&,
                       const std::vector<const Transition*>& options, CounterRng& rng) override {
        return static_cast<std::size_t>(rng.next_below(options.size()));
    }
};

/// Adversarial heuristic: picks the successor maximizing a candidate ranking
/// function eta, ties broken by lowest successor label id.
class GreedyEtaScheduler final : public Scheduler {
public:
    GreedyEtaScheduler(const ControlFlowGraph& g, const std::map<int, Polynomial>& eta) {
        detail::VarIndex idx(g);
        for (const auto& [label, p] : eta) eta_.emplace(label, detail::compile_poly(p, idx));
    }

    std::size_t choose(const ControlFlowGraph&, const std::vector<Configuration>& path,
                       const std::vector<const Transition*>& options, CounterRng&) override {
        const Configuration& current = path.back();
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        int best_label = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i < options.size(); ++i) {
            auto it = eta_.find(options[i]->target);
            double v = it == eta_.end() ? 0.0 : it->second.eval(current.values);
            if (v > best_value ||
                (v == best_value && options[i]->target < best_label)) {
                best = i;
                best_value = v;
                best_label = options[i]->target;
            }
        }
        return best;
    }

private:
    std::map<int, detail::CompiledPoly> eta_;
};

/// Fixed successor index per demonic label.
class ScriptedScheduler final : public Scheduler {
public:
    explicit ScriptedScheduler(std::map<int, std::size_t> choices)
        : choices_(std::move(choices)) {}

    std::size_t choose(const ControlFlowGraph&, const std::vector<Configuration>& path,
                       const std::vector<const Transition*>& options, CounterRng&) override {
        auto it = choices_.find(path.back().label);
        std::size_t pick = it == choices_.end() ? 0 : it->second;
        return std::min(pick, options.size() - 1);
    }

private:
    std::map<int, std::size_t> choices_;
};

struct RunStats {
    std::uint64_t trials = 0;
    std::uint64_t terminated = 0;
    std::uint64_t censored = 0;  // hit max_steps without reaching the terminal label
    double mean = 0;             // mean termination time over terminated trials
    double stderr_mean = 0;
    std::map<std::uint64_t, std::uint64_t> tail_counts;  // n -> #{trials with T > n}

    double tail_probability(std::uint64_t n) const {
        auto it = tail_counts.find(n);
        return it == tail_counts.end() || trials == 0
                   ? 0.0
                   : static_cast<double>(it->second) / static_cast<double>(trials);
    }
};

/// One-trial interpreter over a precompiled CFG. The public step()/simulate()
/// functions below are the module interface.
class Interpreter {
public:
    explicit Interpreter(const ControlFlowGraph& g) : cfg_(g), compiled_(detail::compile_cfg(g)) {}

    const ControlFlowGraph& cfg() const { return cfg_; }

    /// One step of the operational semantics. Fresh values for every sampling
    /// variable are drawn each step, used or not.
    Configuration step(const Configuration& current, CounterRng& rng, Scheduler& scheduler,
                       const std::vector<Configuration>& history) const {
        const detail::CompiledLabel& label = compiled_.labels.at(current.label);
        std::vector<double> scratch(current.values);
        scratch.resize(compiled_.num_program_vars + compiled_.samplers.size());
        for (std::size_t i = 0; i < compiled_.samplers.size(); ++i)
            scratch[compiled_.num_program_vars + i] = compiled_.samplers[i].sample(rng);

        Configuration next = current;
        switch (label.kind) {
            case LabelKind::Terminal:
                break;
            case LabelKind::Demonic: {
                std::vector<const Transition*> options;
                for (std::size_t ti : label.transition_indices)
                    options.push_back(&cfg_.transitions[ti]);
                std::size_t pick = scheduler.choose(cfg_, history, options, rng);
                if (pick >= options.size())
                    throw std::logic_error("scheduler chose an out-of-range successor");
                next.label = options[pick]->target;
                break;
            }
            case LabelKind::Probabilistic: {
                double u = rng.next_unit();
                next.label = label.cumulative_targets.back().second;
                for (const auto& [cdf, target] : label.cumulative_targets) {
                    if (u < cdf) {
                        next.label = target;
                        break;
                    }
                }
                break;
            }
            case LabelKind::Conditional: {
                bool matched = false;
                for (const auto& [guard, target] : label.guarded_targets) {
                    if (guard.eval(scratch)) {
                        next.label = target;
                        matched = true;
                        break;
                    }
                }
                if (!matched)
                    throw std::runtime_error("no guard holds at label " +
                                             std::to_string(current.label) +
                                             " (invalid control flow graph)");
                break;
            }
            case LabelKind::Assignment: {
                for (const auto& [var_idx, rhs] : label.updates)
                    next.values[static_cast<std::size_t>(var_idx)] = rhs.eval(scratch);
                next.label = label.assign_target;
                break;
            }
        }
        return next;
    }

    /// Termination time of one trial; max_steps + 1 encodes censoring.
    std::uint64_t run_trial(Configuration config, CounterRng& rng, Scheduler& scheduler,
                            std::uint64_t max_steps) const {
        std::vector<Configuration> history;
        bool keep_history = scheduler.needs_history();
        history.push_back(config);
        for (std::uint64_t n = 0; n < max_steps; ++n) {
            if (config.label == cfg_.terminal) return n;
            config = step(config, rng, scheduler, history);
            if (keep_history)
                history.push_back(config);
            else
                history.back() = config;
        }
        return config.label == cfg_.terminal ? max_steps : max_steps + 1;
    }

private:
    const ControlFlowGraph& cfg_;
    detail::CompiledCfg compiled_;
};

inline Configuration step(const ControlFlowGraph& g, const Configuration& current,
                          CounterRng& rng, Scheduler& scheduler,
                          const std::vector<Configuration>& history = {}) {
    Interpreter interp(g);
    std::vector<Configuration> h = history;
    if (h.empty() || !(h.back() == current)) h.push_back(current);
    return interp.step(current, rng, scheduler, h);
}

/// Monte Carlo estimate of the termination-time distribution. Trials use
/// independent counter-based streams; a trial that has not reached the
/// terminal label after max_steps is counted as censored, never terminated.
inline RunStats simulate(const ControlFlowGraph& g, const Configuration& init,
                         Scheduler& scheduler, std::uint64_t max_steps, std::uint64_t trials,
                         const std::vector<std::uint64_t>& tail_points = {},
                         std::uint64_t seed = 0, unsigned threads = 1) {
    if (max_steps < 1 || trials < 1)
        throw std::invalid_argument("simulate requires max_steps >= 1 and trials >= 1");
    Interpreter interp(g);

    struct Partial {
        std::uint64_t terminated = 0, censored = 0;
        double sum = 0, sum_sq = 0;
        std::map<std::uint64_t, std::uint64_t> tails;
    };

    auto run_range = [&](std::uint64_t begin, std::uint64_t end, Partial& out) {
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            CounterRng rng(seed, trial);
            std::uint64_t t = interp.run_trial(init, rng, scheduler, max_steps);
            bool was_censored = t > max_steps;
            if (was_censored) {
                ++out.censored;
            } else {
                ++out.terminated;
                double ft = static_cast<double>(t);
                out.sum += ft;
                out.sum_sq += ft * ft;
            }
            for (std::uint64_t n : tail_points)
                if (was_censored || t > n) ++out.tails[n];
        }
    };

    std::vector<Partial> partials(std::max(1u, threads));
    if (threads <= 1) {
        run_range(0, trials, partials[0]);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (trials + threads - 1) / threads;
        for (unsigned i = 0; i < threads; ++i) {
            std::uint64_t begin = i * chunk;
            std::uint64_t end = std::min(trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end, std::ref(partials[i]));
        }
        for (auto& th : pool) th.join();
    }

    RunStats stats;
    stats.trials = trials;
    double sum = 0, sum_sq = 0;
    for (const auto& p : partials) {
        stats.terminated += p.terminated;
        stats.censored += p.censored;
        sum += p.sum;
        sum_sq += p.sum_sq;
        for (const auto& [n, c] : p.tails) stats.tail_counts[n] += c;
    }
    for (std::uint64_t n : tail_points) stats.tail_counts.emplace(n, 0);
    if (stats.terminated > 0) {
        double m = sum / static_cast<double>(stats.terminated);
        stats.mean = m;
        double var =
            std::max(0.0, sum_sq / static_cast<double>(stats.terminated) - m * m);
        stats.stderr_mean = std::sqrt(var / static_cast<double>(stats.terminated));
    }
    return stats;
}

}  // namespace polyrank
