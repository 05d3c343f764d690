#pragma once

// JSON chain description:
//   {"labels": [...], "P": [[...], ...], "pi": [...], "nu": [...], "f": [...]}
// Only "P" is required.

#include "mcmc_certify/spectral_core.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace mcmc_certify {

struct ChainFile {
    ReversibleChain chain;
    std::optional<Distribution> nu;
    std::optional<StateFunction> f;
};

namespace detail {

inline std::vector<double> read_number_array(const nlohmann::json &node, const std::string &where) {
    require(node.is_array(), ErrorKind::invalid_argument, where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        require(node[i].is_number(), ErrorKind::invalid_argument,
                where + "[" + std::to_string(i) + "] is not a number");
        out.push_back(node[i].get<double>());
    }
    return out;
}

inline void require_length(const std::vector<double> &v, std::size_t size, const std::string &where) {
    require(v.size() == size, ErrorKind::invalid_argument,
            where + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(size));
}

}  // namespace detail

inline ChainFile chain_from_json(const nlohmann::json &doc) {
    detail::require(doc.is_object(), ErrorKind::invalid_argument, "chain description must be a JSON object");
    detail::require(doc.contains("P"), ErrorKind::invalid_argument, "missing required field \"P\"");
    const auto &rows = doc.at("P");
    detail::require(rows.is_array() && !rows.empty(), ErrorKind::invalid_argument, "\"P\" must be a non-empty array of rows");

    const std::size_t size = rows.size();
    Matrix m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    for (std::size_t x = 0; x < size; ++x) {
        const auto row = detail::read_number_array(rows[x], "P[" + std::to_string(x) + "]");
        detail::require(row.size() == size, ErrorKind::not_stochastic,
                        "P[" + std::to_string(x) + "] has " + std::to_string(row.size()) + " entries, expected " +
                            std::to_string(size));
        for (std::size_t y = 0; y < size; ++y) {
            m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = row[y];
        }
    }

    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        const auto &node = doc.at("labels");
        detail::require(node.is_array(), ErrorKind::invalid_argument, "\"labels\" must be an array of strings");
        for (std::size_t i = 0; i < node.size(); ++i) {
            detail::require(node[i].is_string(), ErrorKind::invalid_argument,
                            "labels[" + std::to_string(i) + "] is not a string");
            labels.push_back(node[i].get<std::string>());
        }
    }

    std::optional<Distribution> pi;
    if (doc.contains("pi")) {
        const auto v = detail::read_number_array(doc.at("pi"), "pi");
        detail::require_length(v, size, "pi");
        pi = Distribution(std::span<const double>(v));
    }

    std::optional<Distribution> nu;
    if (doc.contains("nu")) {
        const auto v = detail::read_number_array(doc.at("nu"), "nu");
        detail::require_length(v, size, "nu");
        nu = Distribution(std::span<const double>(v));
    }

    std::optional<StateFunction> f;
    if (doc.contains("f")) {
        const auto v = detail::read_number_array(doc.at("f"), "f");
        detail::require_length(v, size, "f");
        f = StateFunction(std::span<const double>(v));
    }

    return ChainFile{build_chain(TransitionMatrix(std::move(m)), std::move(pi), std::move(labels)), std::move(nu),
                     std::move(f)};
}

inline ChainFile parse_chain_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw CertifyError(ErrorKind::invalid_argument, std::string("malformed JSON: ") + e.what());
    }
    return chain_from_json(doc);
}

inline ChainFile load_chain_file(const std::string &path) {
    std::ifstream in(path);
    detail::require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_chain_json(buffer.str());
}

}  // namespace mcmc_certify
