#pragma once

// Fixed suite of small reversible chains used by the test suites and the
// `simulate-check` command.

#include "mcmc_certify/spectral_core.hpp"

namespace mcmc_certify::test_chains {

struct NamedChain {
    std::string name;
    ReversibleChain chain;
};

/// p(0,1) = 0.3, p(1,0) = 0.6; pi = (2/3, 1/3), beta_1 = 0.1.
inline ReversibleChain two_state() { return build_chain(TransitionMatrix{{0.7, 0.3}, {0.6, 0.4}}); }

/// Nearest-neighbour Metropolis chain on a path targeting `target`
/// (proposal: left or right with probability 1/2 each).
inline ReversibleChain metropolis_path(const std::vector<double> &weights) {
    const auto n = static_cast<Eigen::Index>(weights.size());
    Vector pi = detail::to_vector(weights);
    pi /= pi.sum();
    Matrix P = Matrix::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y : {x - 1, x + 1}) {
            if (y >= 0 && y < n) {
                P(x, y) = 0.5 * std::min(1.0, pi(y) / pi(x));
            }
        }
        P(x, x) = 1.0 - P.row(x).sum();
    }
    return build_chain(TransitionMatrix(std::move(P)), Distribution(std::move(pi)));
}

/// Lazy simple random walk on a cycle.
inline ReversibleChain lazy_cycle(std::size_t size) {
    const auto n = static_cast<Eigen::Index>(size);
    Matrix P = Matrix::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        P(x, x) = 0.5;
        P(x, (x + 1) % n) += 0.25;
        P(x, (x + n - 1) % n) += 0.25;
    }
    return build_chain(TransitionMatrix(std::move(P)), Distribution::uniform(size));
}

/// Jump uniformly to one of the other states: every nontrivial eigenvalue
/// is -1/(|D|-1).
inline ReversibleChain complete_graph_jump(std::size_t size) {
    const auto n = static_cast<Eigen::Index>(size);
    Matrix P = Matrix::Constant(n, n, 1.0 / static_cast<double>(size - 1));
    P.diagonal().setZero();
    return build_chain(TransitionMatrix(std::move(P)), Distribution::uniform(size));
}

/// Random walk on a weighted graph: p(x,y) = w(x,y)/w(x), pi(x) ~ w(x).
inline ReversibleChain weighted_graph(const Matrix &weights) {
    Matrix w = 0.5 * (weights + weights.transpose());
    const Vector row_sums = w.rowwise().sum();
    Matrix P = row_sums.cwiseInverse().asDiagonal() * w;
    return build_chain(TransitionMatrix(std::move(P)), Distribution(row_sums / row_sums.sum()));
}

inline Matrix five_state_weights() {
    Matrix w(5, 5);
    w << 2.0, 1.0, 0.0, 0.5, 0.0,  //
        1.0, 1.0, 3.0, 0.0, 0.2,   //
        0.0, 3.0, 0.5, 1.5, 0.0,   //
        0.5, 0.0, 1.5, 4.0, 2.0,   //
        0.0, 0.2, 0.0, 2.0, 0.3;
    return w;
}

/// Rows all equal to pi: P = 1 pi^T, every nontrivial eigenvalue is 0.
inline ReversibleChain independent_sampler(const std::vector<double> &weights) {
    Vector pi = detail::to_vector(weights);
    pi /= pi.sum();
    Matrix P = Vector::Ones(pi.size()) * pi.transpose();
    return build_chain(TransitionMatrix(std::move(P)), Distribution(pi));
}

/// The six chains of the standard validation suite (|D| <= 10).
inline std::vector<NamedChain> standard_suite() {
    std::vector<NamedChain> suite;
    suite.push_back({"two_state", two_state()});
    suite.push_back({"metropolis3", metropolis_path({0.2, 0.3, 0.5})});
    suite.push_back({"lazy_cycle6", lazy_cycle(6)});
    suite.push_back({"metropolis10", metropolis_path({1, 2, 3, 4, 5, 6, 7, 8, 9, 10})});
    suite.push_back({"complete_jump4", complete_graph_jump(4)});
    suite.push_back({"weighted_graph5", weighted_graph(five_state_weights())});
    return suite;
}

}  // namespace mcmc_certify::test_chains
