#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "polyrank/handelman.hpp"
#include "polyrank/pattern.hpp"
#include "polyrank/sdp.hpp"

namespace polyrank {

enum class SosMethod { Putinar, Schmuedgen };

inline std::string to_string(SosMethod m) {
    return m == SosMethod::Putinar ? "putinar" : "schmuedgen";
}

/// Sum-of-squares certificate for one instance: target = sum_w (y^T Q_w y) * m_w
/// with every Q_w positive semidefinite. Putinar multipliers are {1} followed
/// by the gamma members; the preordering variant uses all subset products.
struct SosWitness {
    std::vector<Polynomial> multipliers;
    std::vector<std::vector<Monomial>> bases;
    std::vector<std::vector<std::vector<double>>> gram;
};

struct SosEncoding {
    std::vector<int> block_indices;  // into SdpProblem::blocks, one per multiplier
};

namespace detail {

inline std::vector<std::string> instance_variables(const PatternInstance& inst) {
    std::set<std::string> vars = inst.target.variables();
    for (const auto& g : inst.gamma)
        for (const auto& v : g.variables()) vars.insert(v);
    return {vars.begin(), vars.end()};
}

inline std::vector<Polynomial> sos_multipliers(const PatternInstance& inst, SosMethod method,
                                               unsigned subset_cap) {
    if (method == SosMethod::Putinar) {
        std::vector<Polynomial> mult{Polynomial::constant(1)};
        mult.insert(mult.end(), inst.gamma.begin(), inst.gamma.end());
        return mult;
    }
    return subset_products(inst.gamma, subset_cap);
}

}  // namespace detail

/// Encodes target = sum_w h_w * m_w with h_w = y^T Q_w y over the monomial
/// basis y of degree <= floor(k/2): one PSD block per multiplier and one
/// linear equality per monomial of the union support.
inline SosEncoding sos_encode(const PatternInstance& inst, int k, SosMethod method,
                              SdpProblem& sdp, const std::map<UnknownId, int>& unknown_scalars,
                              const std::string& name_prefix, unsigned subset_cap = 12) {
    std::vector<std::string> vars = detail::instance_variables(inst);
    std::vector<Monomial> basis = monomials_up_to_degree(vars, k / 2);
    std::vector<Polynomial> multipliers = detail::sos_multipliers(inst, method, subset_cap);

    SosEncoding enc;
    for (std::size_t w = 0; w < multipliers.size(); ++w) {
        SdpProblem::Block block;
        block.name = name_prefix + ".h" + std::to_string(w);
        block.dim = static_cast<int>(basis.size());
        block.basis = basis;
        block.multiplier = multipliers[w];
        block.instance = inst.label;  // provenance only
        enc.block_indices.push_back(sdp.add_block(std::move(block)));
    }

    // coefficient of each monomial in (y_i y_j m_w), per entry (i <= j)
    std::set<Monomial> support;
    for (const auto& [m, _] : inst.target.terms()) support.insert(m);
    std::map<Monomial, std::map<std::tuple<int, int, int>, Rational>> contributions;
    for (std::size_t w = 0; w < multipliers.size(); ++w) {
        int block = enc.block_indices[w];
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i; j < basis.size(); ++j) {
                Polynomial prod =
                    Polynomial::monomial(basis[i] * basis[j]) * multipliers[w];
                Rational fold = i == j ? Rational(1) : Rational(2);
                for (const auto& [m, c] : prod.terms()) {
                    contributions[m][{block, static_cast<int>(i), static_cast<int>(j)}] +=
                        fold * c;
                    support.insert(m);
                }
            }
    }

    for (const Monomial& m : support) {
        SdpProblem::Row row;
        auto it = contributions.find(m);
        if (it != contributions.end())
            for (const auto& [key, c] : it->second)
                if (c != 0) row.matrix_coef[key] = c;
        AffineExpr target_coef = inst.target.coefficient(m);
        for (const auto& [unknown, c] : target_coef.coefficients()) {
            auto sit = unknown_scalars.find(unknown);
            if (sit == unknown_scalars.end())
                throw EncodingError("instance " + inst.describe() +
                                    ": target references an unregistered unknown");
            row.scalar_coef[sit->second] -= c;
        }
        row.rhs = target_coef.constant_part();
        sdp.rows.push_back(std::move(row));
    }
    return enc;
}

struct SosCheckResult {
    bool ok = false;
    double max_residual = 0;
    std::string failure;
};

namespace detail {

/// Diagonal-pivoted elimination PSD test: repeatedly pivot on the largest
/// remaining diagonal entry; a diagonal below -tol, or a negligible diagonal
/// with a non-negligible residual row, refutes semidefiniteness.
inline bool is_psd(std::vector<std::vector<double>> q, double tol) {
    std::size_t n = q.size();
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pivot = n;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            if (q[i][i] < -tol) return false;
            if (q[i][i] > best) {
                best = q[i][i];
                pivot = i;
            }
        }
        if (pivot == n) break;
        if (best <= tol) {
            // all remaining diagonals are ~0: off-diagonals must vanish too
            for (std::size_t i = 0; i < n; ++i) {
                if (done[i]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (done[j] || i == j) continue;
                    if (std::fabs(q[i][j]) > std::sqrt(tol)) return false;
                }
            }
            return true;
        }
        done[pivot] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            double f = q[i][pivot] / best;
            for (std::size_t j = 0; j < n; ++j) {
                if (done[j]) continue;
                q[i][j] -= f * q[pivot][j];
            }
        }
    }
    return true;
}

}  // namespace detail

/// Accepts iff every Gram matrix passes the PSD test and the reconstructed
/// polynomial matches the target within tol on every coefficient. The
/// reconstruction is computed exactly from the (dyadic) double entries, so
/// the reported residual is itself exact.
inline SosCheckResult check_sos_witness(const Polynomial& target, const SosWitness& w,
                                        double tol) {
    SosCheckResult result;
    if (!(tol > 0)) {
        result.failure = "tolerance must be positive";
        return result;
    }
    if (w.multipliers.size() != w.gram.size() || w.multipliers.size() != w.bases.size()) {
        result.failure = "witness shape mismatch";
        return result;
    }
    for (std::size_t idx = 0; idx < w.gram.size(); ++idx) {
        const auto& q = w.gram[idx];
        if (q.size() != w.bases[idx].size()) {
            result.failure = "Gram matrix does not match its basis";
            return result;
        }
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i].size() != q.size()) {
                result.failure = "Gram matrix is not square";
                return result;
            }
            for (std::size_t j = 0; j < q.size(); ++j)
                if (std::fabs(q[i][j] - q[j][i]) > tol) {
                    result.failure = "Gram matrix is not symmetric";
                    return result;
                }
        }
        if (!detail::is_psd(q, tol)) {
            result.failure = "Gram matrix " + std::to_string(idx) + " is not PSD within tolerance";
            return result;
        }
    }

    Polynomial reconstruction;
    for (std::size_t idx = 0; idx < w.gram.size(); ++idx) {
        const auto& basis = w.bases[idx];
        Polynomial h;
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = 0; j < basis.size(); ++j) {
                Rational c(w.gram[idx][i][j]);  // exact: doubles are dyadic rationals
                if (c != 0) h.add_term(basis[i] * basis[j], c);
            }
        reconstruction += h * w.multipliers[idx];
    }
    Polynomial residual = target - reconstruction;
    double max_abs = 0;
    for (const auto& [_, c] : residual.terms())
        max_abs = std::max(max_abs, std::fabs(to_double(c)));
    result.max_residual = max_abs;
    if (max_abs > tol) {
        result.failure = "identity residual " + std::to_string(max_abs) + " exceeds tolerance";
        return result;
    }
    result.ok = true;
    return result;
}

/// Assembles a witness for one instance from an SDP assignment.
inline SosWitness witness_from_assignment(const SdpProblem& sdp, const SosEncoding& enc,
                                          const SdpAssignment& a) {
    SosWitness w;
    for (int block : enc.block_indices) {
        const auto& b = sdp.blocks[static_cast<std::size_t>(block)];
        w.multipliers.push_back(b.multiplier);
        w.bases.push_back(b.basis);
        w.gram.push_back(a.blocks[static_cast<std::size_t>(block)]);
    }
    return w;
}

}  // namespace polyrank
