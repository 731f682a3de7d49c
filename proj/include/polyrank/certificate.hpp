#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyrank/handelman.hpp"
#include "polyrank/parser.hpp"
#include "polyrank/pattern.hpp"
#include "polyrank/sos.hpp"

namespace polyrank {

/// Per-instance witness payload, matched back to the re-extracted instance by
/// (tag, label, branch, clause).
struct WitnessRecord {
    PatternInstance::Tag tag = PatternInstance::Tag::C2;
    int label = 0;
    int branch = 0;
    int clause = 0;
    bool is_sos = false;
    std::vector<Rational> coefficients;                   // Handelman path
    std::vector<std::vector<std::vector<double>>> gram;   // SOS path
};

/// Self-contained synthesis certificate: the program source is embedded, so
/// verification re-derives the control flow graph, the pattern instances and
/// the targets from the certificate file alone.
struct Certificate {
    std::string program_source;
    std::string method;  // handelman | putinar | schmuedgen
    int degree = 0;
    int bound = 0;
    Rational epsilon{1};
    Rational K{-1};
    std::map<int, Polynomial> eta;
    Rational ub_value;
    std::optional<Rational> diff_a, diff_b;
    double tolerance = 1e-6;
    std::vector<WitnessRecord> witnesses;
};

namespace detail {

inline Monomial monomial_from_string(const std::string& text) {
    if (text == "1") return Monomial::unit();
    Monomial m;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t star = text.find('*', i);
        std::string factor = text.substr(i, star == std::string::npos ? star : star - i);
        std::size_t caret = factor.find('^');
        std::string name = factor.substr(0, caret);
        unsigned exp = 1;
        if (caret != std::string::npos) exp = static_cast<unsigned>(std::stoul(factor.substr(caret + 1)));
        if (name.empty()) throw std::invalid_argument("bad monomial text: " + text);
        m = m * Monomial::var(name, exp);
        if (star == std::string::npos) break;
        i = star + 1;
    }
    return m;
}

inline nlohmann::json rational_list(const std::vector<Rational>& values) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : values) out.push_back(v.get_str());
    return out;
}

}  // namespace detail

inline nlohmann::json certificate_to_json(const Certificate& cert) {
    nlohmann::json j;
    j["format"] = "polyrank-certificate-v1";
    j["method"] = cert.method;
    j["degree"] = cert.degree;
    j["bound"] = cert.bound;
    j["epsilon"] = cert.epsilon.get_str();
    j["K"] = cert.K.get_str();
    j["ub"] = cert.ub_value.get_str();
    j["tolerance"] = cert.tolerance;
    if (cert.diff_a && cert.diff_b) {
        j["diff"]["a"] = cert.diff_a->get_str();
        j["diff"]["b"] = cert.diff_b->get_str();
    }
    j["program"] = cert.program_source;

    Program prog = parse(cert.program_source);
    std::vector<Monomial> basis = monomials_up_to_degree(prog.variables, cert.degree);
    nlohmann::json basis_json = nlohmann::json::array();
    for (const auto& m : basis) basis_json.push_back(m.to_string());
    j["basis"] = basis_json;

    nlohmann::json eta_json;
    for (const auto& [label, p] : cert.eta) {
        std::vector<Rational> coeffs;
        Polynomial residue = p;
        for (const auto& m : basis) {
            coeffs.push_back(p.coefficient(m));
            residue.add_term(m, -p.coefficient(m));
        }
        if (!residue.is_zero())
            throw std::invalid_argument("eta at label " + std::to_string(label) +
                                        " has monomials outside the degree-" +
                                        std::to_string(cert.degree) + " basis");
        eta_json[std::to_string(label)] = detail::rational_list(coeffs);
    }
    j["eta"] = eta_json;

    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : cert.witnesses) {
        nlohmann::json wj;
        wj["tag"] = to_string(w.tag);
        wj["label"] = w.label;
        wj["branch"] = w.branch;
        wj["clause"] = w.clause;
        if (w.is_sos)
            wj["gram"] = w.gram;
        else
            wj["coefficients"] = detail::rational_list(w.coefficients);
        witnesses.push_back(std::move(wj));
    }
    j["witnesses"] = witnesses;
    return j;
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j["format"] != "polyrank-certificate-v1")
        throw std::invalid_argument("not a polyrank certificate");
    Certificate cert;
    cert.method = j.at("method").get<std::string>();
    cert.degree = j.at("degree").get<int>();
    cert.bound = j.at("bound").get<int>();
    cert.epsilon = parse_rational(j.at("epsilon").get<std::string>());
    cert.K = parse_rational(j.at("K").get<std::string>());
    cert.ub_value = parse_rational(j.at("ub").get<std::string>());
    cert.tolerance = j.value("tolerance", 1e-6);
    if (j.contains("diff")) {
        cert.diff_a = parse_rational(j["diff"].at("a").get<std::string>());
        cert.diff_b = parse_rational(j["diff"].at("b").get<std::string>());
    }
    cert.program_source = j.at("program").get<std::string>();

    std::vector<Monomial> basis;
    for (const auto& m : j.at("basis")) basis.push_back(detail::monomial_from_string(m.get<std::string>()));
    for (auto it = j.at("eta").begin(); it != j.at("eta").end(); ++it) {
        int label = std::stoi(it.key());
        Polynomial p;
        const auto& coeffs = it.value();
        if (coeffs.size() != basis.size())
            throw std::invalid_argument("eta coefficient vector does not match the basis");
        for (std::size_t i = 0; i < basis.size(); ++i)
            p.add_term(basis[i], parse_rational(coeffs[i].get<std::string>()));
        cert.eta.emplace(label, std::move(p));
    }

    for (const auto& wj : j.at("witnesses")) {
        WitnessRecord w;
        w.tag = tag_from_string(wj.at("tag").get<std::string>());
        w.label = wj.at("label").get<int>();
        w.branch = wj.at("branch").get<int>();
        w.clause = wj.at("clause").get<int>();
        if (wj.contains("gram")) {
            w.is_sos = true;
            w.gram = wj.at("gram").get<std::vector<std::vector<std::vector<double>>>>();
        } else {
            for (const auto& c : wj.at("coefficients"))
                w.coefficients.push_back(parse_rational(c.get<std::string>()));
        }
        cert.witnesses.push_back(std::move(w));
    }
    return cert;
}

inline void save_certificate(const Certificate& cert, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << certificate_to_json(cert).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failure on " + path);
}

inline Certificate load_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return certificate_from_json(j);
}

}  // namespace polyrank
