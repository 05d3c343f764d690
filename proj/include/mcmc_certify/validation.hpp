#pragma once

// Statistical soundness suite: simulated error against the exact error and
// the closed-form bounds on the fixed test chains.

#include "mcmc_certify/bounds.hpp"
#include "mcmc_certify/simulate.hpp"
#include "mcmc_certify/test_chains.hpp"

namespace mcmc_certify {

struct StatisticalCase {
    std::string chain;
    EstimatorSpec spec{1, 0};
    double exact = 0.0;
    EmpiricalErrorReport empirical;
    double z = 0.0;            ///< (mse_hat - exact) / std_error, 0 if std_error is 0
    bool within = false;       ///< |z| <= 4
    bool below_bounds = false; ///< mse_hat - 4 se <= bound_theorem.total for every norm
};

/// (n, n0) settings per chain.
inline const std::vector<EstimatorSpec> &statistical_settings() {
    static const std::vector<EstimatorSpec> settings{{1, 0}, {8, 2}, {32, 10}};
    return settings;
}

/// Starts at the last state, f a ramp from 0 to 1 across the states.
inline std::vector<StatisticalCase> run_statistical_suite(std::size_t replications, std::uint64_t seed,
                                                          unsigned threads = 0) {
    std::vector<StatisticalCase> out;
    std::uint64_t offset = 0;
    for (const auto &[name, chain] : test_chains::standard_suite()) {
        const auto s = spectral_decompose(chain);
        const std::size_t d = chain.size();
        const auto nu = Distribution::point_mass(d, d - 1);
        const StateFunction f(Vector::LinSpaced(static_cast<Eigen::Index>(d), 0.0, 1.0));
        for (const EstimatorSpec &spec : statistical_settings()) {
            StatisticalCase c;
            c.chain = name;
            c.spec = spec;
            c.exact = exact_error(chain, s, nu, f, spec).mse;
            c.empirical = estimate_error(chain, nu, f, SimulationConfig(replications, seed + offset++, spec, threads));
            const double se = c.empirical.std_error;
            c.z = se > 0.0 ? (c.empirical.mse_hat - c.exact) / se : 0.0;
            c.within = std::abs(c.empirical.mse_hat - c.exact) <= 4.0 * se;
            c.below_bounds = true;
            for (Norm p : {Norm::l2, Norm::l4, Norm::linf}) {
                if (c.empirical.mse_hat - 4.0 * se > bound_theorem(chain, s, nu, f, spec, p).total) {
                    c.below_bounds = false;
                }
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace mcmc_certify
