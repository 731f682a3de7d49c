#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "polyrank/polynomial.hpp"
#include "polyrank/rational.hpp"

namespace polyrank {

/// Semidefinite feasibility/optimization problem over PSD matrix blocks and
/// free scalar variables, with linear equality rows. The matrix coefficient
/// on an off-diagonal entry (i < j) applies to the symmetric pair, i.e. the
/// row value is sum c_ii Q_ii + sum_{i<j} c_ij Q_ij with Q_ij = Q_ji already
/// folded into c_ij.
struct SdpProblem {
    struct Block {
        std::string name;
        int dim = 0;
        std::vector<Monomial> basis;  // monomial basis of the SOS multiplier
        Polynomial multiplier;
        int instance = -1;  // index of the pattern instance this block serves
    };

    struct Row {
        std::map<int, Rational> scalar_coef;
        std::map<std::tuple<int, int, int>, Rational> matrix_coef;  // (block, i, j), i <= j
        Rational rhs;
    };

    std::vector<std::string> scalar_names;
    std::vector<Block> blocks;
    std::vector<Row> rows;
    std::map<int, Rational> objective_scalar;  // minimize; empty = feasibility
    bool has_objective = false;

    int add_scalar(const std::string& name) {
        scalar_names.push_back(name);
        return static_cast<int>(scalar_names.size() - 1);
    }

    int add_block(Block b) {
        blocks.push_back(std::move(b));
        return static_cast<int>(blocks.size() - 1);
    }
};

/// Dense double-precision assignment to an SdpProblem's variables.
struct SdpAssignment {
    std::vector<double> scalars;
    std::vector<std::vector<std::vector<double>>> blocks;  // symmetric matrices

    double row_value(const SdpProblem& p, const SdpProblem::Row& row) const {
        double v = 0;
        for (const auto& [s, c] : row.scalar_coef) v += to_double(c) * scalars[static_cast<std::size_t>(s)];
        for (const auto& [key, c] : row.matrix_coef) {
            auto [b, i, j] = key;
            v += to_double(c) * blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)]
                                      [static_cast<std::size_t>(j)];
        }
        (void)p;
        return v;
    }
};

namespace detail {

inline std::string format_17g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Sparse text exchange format (follows the usual sparse SDP input
/// convention): number of constraints, number of blocks, block sizes
/// (negative size = diagonal block), right-hand side vector, then one entry
/// per line `constraint-index block-index row col value` with 1-based indices
/// and row <= col. Entry 0 is the objective matrix, emitted negated so that
/// the conventional primal maximization solves our minimization. Free scalars
/// are encoded as paired entries of a trailing diagonal block (s = d+ - d-).
inline void sdp_emit(const SdpProblem& p, std::ostream& out) {
    std::size_t nblocks = p.blocks.size() + (p.scalar_names.empty() ? 0 : 1);
    out << p.rows.size() << "\n";
    out << nblocks << "\n";
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        out << p.blocks[b].dim << (b + 1 < nblocks ? " " : "");
    if (!p.scalar_names.empty()) out << -2 * static_cast<long>(p.scalar_names.size());
    out << "\n";
    for (std::size_t r = 0; r < p.rows.size(); ++r)
        out << detail::format_17g(to_double(p.rows[r].rhs)) << (r + 1 < p.rows.size() ? " " : "");
    out << "\n";

    int scalar_block = static_cast<int>(p.blocks.size()) + 1;  // 1-based
    auto emit_scalar_pair = [&](int constraint, int scalar, const Rational& c) {
        int d = 2 * scalar + 1;  // 1-based diagonal position of d+
        out << constraint << " " << scalar_block << " " << d << " " << d << " "
            << detail::format_17g(to_double(c)) << "\n";
        out << constraint << " " << scalar_block << " " << d + 1 << " " << d + 1 << " "
            << detail::format_17g(-to_double(c)) << "\n";
    };

    if (p.has_objective)
        for (const auto& [s, c] : p.objective_scalar) emit_scalar_pair(0, s, Rational(-c));
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
        const auto& row = p.rows[r];
        int cid = static_cast<int>(r) + 1;
        for (const auto& [key, c] : row.matrix_coef) {
            auto [b, i, j] = key;
            // off-diagonal coefficients fold the symmetric pair; the file
            // stores the per-entry value
            double v = to_double(c);
            if (i != j) v /= 2;
            out << cid << " " << b + 1 << " " << i + 1 << " " << j + 1 << " "
                << detail::format_17g(v) << "\n";
        }
        for (const auto& [s, c] : row.scalar_coef) emit_scalar_pair(cid, s, c);
    }
    if (!out) throw std::runtime_error("sdp_emit: write failure");
}

inline void sdp_emit_file(const SdpProblem& p, const std::string& path) {
    std::ostringstream buffer;
    sdp_emit(p, buffer);
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("sdp_emit: cannot open " + path);
    std::string s = buffer.str();
    std::size_t written = std::fwrite(s.data(), 1, s.size(), f);
    std::fclose(f);
    if (written != s.size()) throw std::runtime_error("sdp_emit: write failure on " + path);
}

/// Reads a solution for an emitted problem: comment lines start with '*' or
/// '"', every other line is `block row col value` (1-based, row <= col)
/// giving the entries of the block-diagonal solution matrix. Scalars are
/// recovered from the trailing diagonal block. The assignment is returned
/// unchecked; witness checking decides acceptance.
inline SdpAssignment sdp_ingest(std::istream& in, const SdpProblem& p) {
    SdpAssignment a;
    a.scalars.assign(p.scalar_names.size(), 0.0);
    a.blocks.resize(p.blocks.size());
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        a.blocks[b].assign(static_cast<std::size_t>(p.blocks[b].dim),
                           std::vector<double>(static_cast<std::size_t>(p.blocks[b].dim), 0.0));
    std::vector<double> diag(2 * p.scalar_names.size(), 0.0);

    std::string line;
    bool saw_entry = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '*' || line[first] == '"') continue;
        std::istringstream ls(line);
        long b, i, j;
        double v;
        if (!(ls >> b >> i >> j >> v))
            throw std::runtime_error("sdp_ingest: malformed entry at line " +
                                     std::to_string(lineno));
        std::string rest;
        if (ls >> rest)
            throw std::runtime_error("sdp_ingest: trailing tokens at line " +
                                     std::to_string(lineno));
        saw_entry = true;
        long scalar_block = static_cast<long>(p.blocks.size()) + 1;
        if (b >= 1 && b <= static_cast<long>(p.blocks.size())) {
            int dim = p.blocks[static_cast<std::size_t>(b - 1)].dim;
            if (i < 1 || j < 1 || i > j || j > dim)
                throw std::runtime_error("sdp_ingest: entry (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") outside block " +
                                         std::to_string(b) + " of size " + std::to_string(dim));
            auto& Q = a.blocks[static_cast<std::size_t>(b - 1)];
            Q[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = v;
            Q[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = v;
        } else if (b == scalar_block && !p.scalar_names.empty()) {
            if (i != j || i < 1 || i > static_cast<long>(diag.size()))
                throw std::runtime_error("sdp_ingest: bad diagonal entry in scalar block");
            diag[static_cast<std::size_t>(i - 1)] = v;
        } else {
            throw std::runtime_error("sdp_ingest: block index " + std::to_string(b) +
                                     " out of range (problem has " +
                                     std::to_string(p.blocks.size() +
                                                    (p.scalar_names.empty() ? 0 : 1)) +
                                     " blocks)");
        }
    }
    if (!saw_entry) throw std::runtime_error("sdp_ingest: no entries found (truncated file?)");
    for (std::size_t s = 0; s < p.scalar_names.size(); ++s)
        a.scalars[s] = diag[2 * s] - diag[2 * s + 1];
    return a;
}

namespace detail {

/// Jacobi eigendecomposition for small symmetric matrices.
inline void symmetric_eigen(std::vector<std::vector<double>> m, std::vector<double>& eigenvalues,
                            std::vector<std::vector<double>>& eigenvectors) {
    std::size_t n = m.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
        if (off < 1e-28) break;
        for (std::size_t pp = 0; pp < n; ++pp)
            for (std::size_t q = pp + 1; q < n; ++q) {
                if (std::fabs(m[pp][q]) < 1e-300) continue;
                double theta = (m[q][q] - m[pp][pp]) / (2 * m[pp][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double mkp = m[k][pp], mkq = m[k][q];
                    m[k][pp] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double mpk = m[pp][k], mqk = m[q][k];
                    m[pp][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = eigenvectors[k][pp], vkq = eigenvectors[k][q];
                    eigenvectors[k][pp] = c * vkp - s * vkq;
                    eigenvectors[k][q] = s * vkp + c * vkq;
                }
            }
    }
    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = m[i][i];
}

inline void project_psd(std::vector<std::vector<double>>& q) {
    std::size_t n = q.size();
    std::vector<double> ev;
    std::vector<std::vector<double>> vec;
    symmetric_eigen(q, ev, vec);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (ev[k] > 0) sum += vec[i][k] * ev[k] * vec[j][k];
            q[i][j] = sum;
        }
}

}  // namespace detail

/// Low-accuracy in-process feasibility search by alternating projections onto
/// the affine set (equality rows) and the PSD cone, blockwise. The iterate is
/// kept on the PSD side, so the remaining error shows up as equality residual
/// and is caught by the witness check; the objective is ignored.
inline std::optional<SdpAssignment> solve_sdp_local(const SdpProblem& p, int iterations = 60000,
                                                    double tol = 1e-9) {
    // flatten: scalars, then upper triangles of each block
    std::vector<std::tuple<int, int, int>> slots;  // (block, i, j); block -1 = scalar i
    for (std::size_t s = 0; s < p.scalar_names.size(); ++s)
        slots.emplace_back(-1, static_cast<int>(s), 0);
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        for (int i = 0; i < p.blocks[b].dim; ++i)
            for (int j = i; j < p.blocks[b].dim; ++j)
                slots.emplace_back(static_cast<int>(b), i, j);
    std::map<std::tuple<int, int, int>, std::size_t> slot_index;
    for (std::size_t s = 0; s < slots.size(); ++s) slot_index[slots[s]] = s;

    std::size_t n = slots.size(), m = p.rows.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(n, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& [s, c] : p.rows[r].scalar_coef)
            A[r][slot_index.at({-1, s, 0})] += to_double(c);
        for (const auto& [key, c] : p.rows[r].matrix_coef) A[r][slot_index.at(key)] += to_double(c);
        b[r] = to_double(p.rows[r].rhs);
    }

    // Gram matrix of the rows with a small ridge, factored once.
    std::vector<std::vector<double>> G(m, std::vector<double>(m, 0.0));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) {
            double sum = 0;
            for (std::size_t k = 0; k < n; ++k) sum += A[r][k] * A[s][k];
            G[r][s] = sum + (r == s ? 1e-10 : 0.0);
        }
    // Cholesky
    std::vector<std::vector<double>> L(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = G[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
            if (i == j) {
                if (sum <= 0) return std::nullopt;
                L[i][i] = std::sqrt(sum);
            } else {
                L[i][j] = sum / L[j][j];
            }
        }
    auto solve_gram = [&](std::vector<double> rhs) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < i; ++k) rhs[i] -= L[i][k] * rhs[k];
            rhs[i] /= L[i][i];
        }
        for (std::size_t ii = m; ii-- > 0;) {
            for (std::size_t k = ii + 1; k < m; ++k) rhs[ii] -= L[k][ii] * rhs[k];
            rhs[ii] /= L[ii][ii];
        }
        return rhs;
    };

    std::vector<double> z(n, 0.0);
    auto project_affine = [&]() {
        std::vector<double> resid(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            double sum = -b[r];
            for (std::size_t k = 0; k < n; ++k) sum += A[r][k] * z[k];
            resid[r] = sum;
        }
        std::vector<double> lambda = solve_gram(resid);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t r = 0; r < m; ++r) z[k] -= A[r][k] * lambda[r];
    };
    auto unpack_project_pack = [&]() {
        std::size_t offset = p.scalar_names.size();
        for (const auto& block : p.blocks) {
            std::size_t d = static_cast<std::size_t>(block.dim);
            std::vector<std::vector<double>> Q(d, std::vector<double>(d, 0.0));
            std::size_t s = offset;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) {
                    Q[i][j] = Q[j][i] = z[s];
                    ++s;
                }
            detail::project_psd(Q);
            s = offset;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) {
                    z[s] = Q[i][j];
                    ++s;
                }
            offset = s;
        }
    };

    for (int it = 0; it < iterations; ++it) {
        project_affine();
        unpack_project_pack();
        double worst = 0;
        for (std::size_t r = 0; r < m; ++r) {
            double sum = -b[r];
            for (std::size_t k = 0; k < n; ++k) sum += A[r][k] * z[k];
            worst = std::max(worst, std::fabs(sum));
        }
        if (worst <= tol) break;
    }

    SdpAssignment a;
    a.scalars.assign(p.scalar_names.size(), 0.0);
    for (std::size_t s = 0; s < p.scalar_names.size(); ++s) a.scalars[s] = z[s];
    a.blocks.resize(p.blocks.size());
    std::size_t offset = p.scalar_names.size();
    for (std::size_t bidx = 0; bidx < p.blocks.size(); ++bidx) {
        std::size_t d = static_cast<std::size_t>(p.blocks[bidx].dim);
        a.blocks[bidx].assign(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                a.blocks[bidx][i][j] = a.blocks[bidx][j][i] = z[offset];
                ++offset;
            }
    }
    return a;
}

}  // namespace polyrank
