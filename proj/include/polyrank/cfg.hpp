#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "polyrank/program.hpp"

namespace polyrank {

enum class LabelKind { Demonic, Probabilistic, Conditional, Assignment, Terminal };

inline std::string to_string(LabelKind k) {
    switch (k) {
        case LabelKind::Demonic: return "demonic";
        case LabelKind::Probabilistic: return "prob";
        case LabelKind::Conditional: return "cond";
        case LabelKind::Assignment: return "assign";
        case LabelKind::Terminal: return "terminal";
    }
    return "?";
}

/// Simultaneous update of program variables; variables not listed keep their
/// value. Right-hand sides are polynomials over program and sampling variables.
struct UpdateFunction {
    std::map<std::string, Polynomial> assignments;

    Polynomial rhs(const std::string& var) const {
        auto it = assignments.find(var);
        return it == assignments.end() ? Polynomial::variable(var) : it->second;
    }

    /// As a substitution map suitable for substitute().
    const std::map<std::string, Polynomial>& substitution() const { return assignments; }

    bool operator==(const UpdateFunction& other) const = default;
};

struct StarPayload {
    bool operator==(const StarPayload&) const = default;
};

struct Transition {
    int source = 0;
    int target = 0;
    std::variant<StarPayload, Rational, Predicate, UpdateFunction> payload;

    bool is_star() const { return std::holds_alternative<StarPayload>(payload); }
    bool is_probability() const { return std::holds_alternative<Rational>(payload); }
    bool is_guard() const { return std::holds_alternative<Predicate>(payload); }
    bool is_update() const { return std::holds_alternative<UpdateFunction>(payload); }

    const Rational& probability() const { return std::get<Rational>(payload); }
    const Predicate& guard() const { return std::get<Predicate>(payload); }
    const UpdateFunction& update() const { return std::get<UpdateFunction>(payload); }
};

/// Control flow graph: labels partitioned by kind, transitions carrying
/// probabilities / guards / updates, plus the invariant annotations and the
/// program's variable/distribution context.
struct ControlFlowGraph {
    std::map<int, LabelKind> labels;  // includes the terminal label
    std::vector<Transition> transitions;
    int initial = 0;
    int terminal = 0;
    std::map<int, Predicate> invariants;  // unannotated labels default to true

    std::vector<std::string> program_vars;
    std::vector<std::pair<std::string, Distribution>> samplings;
    std::map<std::string, Rational> initial_valuation;

    LabelKind kind(int label) const {
        auto it = labels.find(label);
        if (it == labels.end()) throw std::invalid_argument("unknown label " + std::to_string(label));
        return it->second;
    }

    std::vector<const Transition*> out(int label) const {
        std::vector<const Transition*> result;
        for (const auto& t : transitions)
            if (t.source == label) result.push_back(&t);
        return result;
    }

    Predicate invariant(int label) const {
        auto it = invariants.find(label);
        return it == invariants.end() ? Predicate::truth() : it->second;
    }

    std::map<std::string, Distribution> distribution_map() const {
        std::map<std::string, Distribution> m;
        for (const auto& [name, d] : samplings) m.emplace(name, d);
        return m;
    }

    std::set<std::string> sampling_names() const {
        std::set<std::string> names;
        for (const auto& [name, _] : samplings) names.insert(name);
        return names;
    }

    std::vector<int> nonterminal_labels() const {
        std::vector<int> result;
        for (const auto& [id, k] : labels)
            if (k != LabelKind::Terminal) result.push_back(id);
        return result;
    }
};

namespace detail {

class CfgBuilder {
public:
    explicit CfgBuilder(const Program& program) : program_(program) {}

    ControlFlowGraph build() {
        assign_ids(program_.body);
        cfg_.terminal = next_id_++;
        cfg_.labels[cfg_.terminal] = LabelKind::Terminal;
        cfg_.initial = in_label(program_.body);
        emit(program_.body, cfg_.terminal);
        cfg_.program_vars = program_.variables;
        cfg_.samplings = program_.samplings;
        cfg_.initial_valuation = program_.initial;
        return std::move(cfg_);
    }

private:
    const Program& program_;
    ControlFlowGraph cfg_;
    std::map<const Stmt*, int> ids_;
    int next_id_ = 1;

    // Labels are numbered by preorder traversal so they match the source
    // reading order; sequencing nodes own no label of their own.
    void assign_ids(const Stmt& s) {
        if (s.kind != Stmt::Kind::Seq) ids_[&s] = next_id_++;
        if (s.kind == Stmt::Kind::Seq || s.kind == Stmt::Kind::If ||
            s.kind == Stmt::Kind::While)
            for (const Stmt& child : s.children) assign_ids(child);
    }

    int in_label(const Stmt& s) const {
        if (s.kind == Stmt::Kind::Seq) return in_label(s.children.front());
        return ids_.at(&s);
    }

    void set_label(const Stmt& s, LabelKind kind) {
        int id = ids_.at(&s);
        cfg_.labels[id] = kind;
        if (s.invariant) cfg_.invariants[id] = *s.invariant;
    }

    void add_transition(int src, int dst,
                        std::variant<StarPayload, Rational, Predicate, UpdateFunction> payload) {
        cfg_.transitions.push_back(Transition{src, dst, std::move(payload)});
    }

    void emit(const Stmt& s, int next) {
        switch (s.kind) {
            case Stmt::Kind::Skip: {
                set_label(s, LabelKind::Assignment);
                add_transition(ids_.at(&s), next, UpdateFunction{});
                break;
            }
            case Stmt::Kind::Assign: {
                set_label(s, LabelKind::Assignment);
                UpdateFunction f;
                for (std::size_t i = 0; i < s.targets.size(); ++i)
                    f.assignments[s.targets[i]] = s.values[i];
                add_transition(ids_.at(&s), next, std::move(f));
                break;
            }
            case Stmt::Kind::If: {
                int id = ids_.at(&s);
                int then_in = in_label(s.children[0]);
                int else_in = in_label(s.children[1]);
                switch (s.guard_kind) {
                    case Stmt::GuardKind::Star:
                        set_label(s, LabelKind::Demonic);
                        add_transition(id, then_in, StarPayload{});
                        add_transition(id, else_in, StarPayload{});
                        break;
                    case Stmt::GuardKind::Prob:
                        set_label(s, LabelKind::Probabilistic);
                        add_transition(id, then_in, s.prob);
                        add_transition(id, else_in, Rational(1 - s.prob));
                        break;
                    case Stmt::GuardKind::Predicate:
                        set_label(s, LabelKind::Conditional);
                        add_transition(id, then_in, s.guard);
                        // the negated guard is materialized once, here
                        add_transition(id, else_in, Predicate::negation(s.guard));
                        break;
                }
                emit(s.children[0], next);
                emit(s.children[1], next);
                break;
            }
            case Stmt::Kind::While: {
                int id = ids_.at(&s);
                set_label(s, LabelKind::Conditional);
                add_transition(id, in_label(s.children[0]), s.guard);
                add_transition(id, next, Predicate::negation(s.guard));
                emit(s.children[0], id);
                break;
            }
            case Stmt::Kind::Seq: {
                for (std::size_t i = 0; i < s.children.size(); ++i) {
                    int after = i + 1 < s.children.size() ? in_label(s.children[i + 1]) : next;
                    emit(s.children[i], after);
                }
                break;
            }
        }
    }
};

}  // namespace detail

/// Inductive CFG construction; while-loop heads double as the body's exit
/// label, so nested loops share the loop-head label with the inner exit.
inline ControlFlowGraph build_cfg(const Program& program) {
    return detail::CfgBuilder(program).build();
}

/// TERM(l): for a conditional label, the disjunction of guards of transitions
/// that do not leave the program; true for every other non-terminal label.
inline Predicate term_predicate(const ControlFlowGraph& g, int label) {
    if (label == g.terminal)
        throw std::invalid_argument("TERM is undefined at the terminal label");
    if (g.kind(label) != LabelKind::Conditional) return Predicate::truth();
    Predicate result = Predicate::falsity();
    bool any = false;
    for (const Transition* t : g.out(label)) {
        if (t->target == g.terminal) continue;
        result = any ? Predicate::disjunction(std::move(result), t->guard()) : t->guard();
        any = true;
    }
    return any ? result : Predicate::falsity();
}

/// Structural invariant check; violations are returned as data, an empty list
/// means the graph is well-formed.
inline std::vector<std::string> validate(const ControlFlowGraph& g) {
    std::vector<std::string> violations;
    auto complain = [&](int label, const std::string& what) {
        violations.push_back("label " + std::to_string(label) + ": " + what);
    };
    int terminals = 0;
    for (const auto& [id, kind] : g.labels)
        if (kind == LabelKind::Terminal) ++terminals;
    if (terminals != 1)
        violations.push_back("expected exactly one terminal label, found " +
                             std::to_string(terminals));

    for (const auto& t : g.transitions) {
        if (!g.labels.count(t.source)) complain(t.source, "transition from unknown label");
        if (!g.labels.count(t.target)) complain(t.target, "transition into unknown label");
    }

    for (const auto& [id, kind] : g.labels) {
        auto out = g.out(id);
        switch (kind) {
            case LabelKind::Probabilistic: {
                Rational sum(0);
                bool payload_ok = true;
                for (const Transition* t : out) {
                    if (!t->is_probability()) {
                        payload_ok = false;
                        continue;
                    }
                    if (!(t->probability() > 0 && t->probability() < 1))
                        complain(id, "transition probability outside (0,1)");
                    sum += t->probability();
                }
                if (!payload_ok) complain(id, "probabilistic label with non-probability payload");
                if (sum != 1) complain(id, "outgoing probabilities sum to " + sum.get_str());
                break;
            }
            case LabelKind::Demonic:
                if (out.size() < 2) complain(id, "demonic label needs at least two successors");
                for (const Transition* t : out)
                    if (!t->is_star()) complain(id, "demonic label with non-star payload");
                break;
            case LabelKind::Conditional:
                if (out.size() != 2)
                    complain(id, "conditional label needs exactly two guarded successors");
                for (const Transition* t : out)
                    if (!t->is_guard()) complain(id, "conditional label with non-guard payload");
                break;
            case LabelKind::Assignment:
                if (out.size() != 1) complain(id, "assignment label needs exactly one successor");
                for (const Transition* t : out)
                    if (!t->is_update()) complain(id, "assignment label with non-update payload");
                break;
            case LabelKind::Terminal:
                if (!out.empty()) complain(id, "terminal label has outgoing transitions");
                break;
        }
    }
    return violations;
}

/// Debug dump, one edge per line: `src kind payload dst`.
inline std::string dump_cfg(const ControlFlowGraph& g) {
    std::string out;
    for (const auto& t : g.transitions) {
        out += std::to_string(t.source) + " " + to_string(g.kind(t.source)) + " ";
        if (t.is_star())
            out += "*";
        else if (t.is_probability())
            out += t.probability().get_str();
        else if (t.is_guard())
            out += t.guard().to_string();
        else {
            const auto& f = t.update();
            if (f.assignments.empty()) out += "id";
            bool first = true;
            for (const auto& [v, p] : f.assignments) {
                if (!first) out += ",";
                out += v + ":=" + p.to_string();
                first = false;
            }
        }
        out += " " + std::to_string(t.target) + "\n";
    }
    return out;
}

}  // namespace polyrank
