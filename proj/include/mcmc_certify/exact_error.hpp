#pragma once

// Exact mean-square error of the time average
//     S_{n,n0}(f) = (1/n) sum_{i=1}^{n} f(X_{i+n0})
// where X_0 ~ nu and X_i is the state after i transitions, so X_i ~ nu P^i.
// for a stationary start (spectral formula) and for an arbitrary start
// (stationary error plus the two L-sum correction terms).

#include "mcmc_certify/convergence.hpp"

#include <cstdlib>
#include <functional>

namespace mcmc_certify {

/// Budget split of an estimator: n averaged steps after n0 burn-in steps.
struct EstimatorSpec {
    std::size_t n = 1;
    std::size_t n0 = 0;

    EstimatorSpec(std::size_t averaged, std::size_t burn_in) : n(averaged), n0(burn_in) {
        detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    }

    [[nodiscard]] std::size_t total() const noexcept { return n + n0; }
};

inline constexpr double kDefaultWorkCap = 1e9;

/// Work cap for `exact_error` in scalar operations; MCMC_CERTIFY_WORK_CAP
/// overrides the default.
inline double work_cap_from_env() {
    if (const char *raw = std::getenv("MCMC_CERTIFY_WORK_CAP")) {
        char *end = nullptr;
        const double value = std::strtod(raw, &end);
        if (end != raw && value > 0.0) {
            return value;
        }
    }
    return kDefaultWorkCap;
}

/// W(n, b) = (n(1 - b^2) - 2b(1 - b^n)) / (1 - b)^2, the per-eigenvalue
/// variance weight n + 2 sum_{m=1}^{n-1} (n - m) b^m.
inline double w_factor(std::size_t n, double b) {
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    detail::require(b >= -1.0 && b < 1.0, ErrorKind::invalid_argument, "W(n, b) needs b in [-1, 1)");
    const double nn = static_cast<double>(n);
    const double one_minus_bn = b > 0.0 ? -std::expm1(nn * std::log(b)) : 1.0 - std::pow(b, nn);
    const double denom = (1.0 - b) * (1.0 - b);
    return (nn * (1.0 - b * b) - 2.0 * b * one_minus_bn) / denom;
}

/// e_pi(S_n, f)^2 = (1/n^2) sum_{k>=1} a_k^2 W(n, beta_k).
inline double stationary_error(const SpectralDecomposition &spectrum, const Vector &f, std::size_t n) {
    const Vector a = spectrum.coefficients(f);
    double total = 0.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double ak = a(static_cast<Eigen::Index>(k));
        total += ak * ak * w_factor(n, spectrum.eigenvalue(k));
    }
    const double nn = static_cast<double>(n);
    return total / (nn * nn);
}

inline double stationary_error(const SpectralDecomposition &spectrum, const StateFunction &f, std::size_t n) {
    return stationary_error(spectrum, f.values(), n);
}

/// sup over ||f||_2 <= 1 of e_pi(S_n, f)^2, attained at f = u_1:
/// (1+b1)/(n(1-b1)) - 2 b1 (1 - b1^n) / (n^2 (1-b1)^2).
inline double worst_case_stationary(const SpectralDecomposition &spectrum, std::size_t n) {
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    const double b1 = spectrum.beta1();
    const double nn = static_cast<double>(n);
    const double gap = 1.0 - b1;
    const double one_minus_bn = b1 > 0.0 ? -std::expm1(nn * std::log(b1)) : 1.0 - std::pow(b1, nn);
    return (1.0 + b1) / (nn * gap) - 2.0 * b1 * one_minus_bn / (nn * nn * gap * gap);
}

struct AsymptoticConstant {
    double value = 0.0;
    bool infinite = false;  // spectral gap below 1e-12
};

/// lim n e^2 = sum_{k>=1} a_k^2 (1 + beta_k) / (1 - beta_k).
inline AsymptoticConstant asymptotic_constant(const SpectralDecomposition &spectrum, const Vector &f) {
    if (spectrum.spectral_gap() < 1e-12) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    const Vector a = spectrum.coefficients(f);
    double total = 0.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double ak = a(static_cast<Eigen::Index>(k));
        const double bk = spectrum.eigenvalue(k);
        total += ak * ak * (1.0 + bk) / (1.0 - bk);
    }
    return {total, false};
}

struct ExactErrorReport {
    double mse = 0.0;             ///< e_nu(S_{n,n0}, f)^2
    double stationary_mse = 0.0;  ///< e_pi(S_n, f)^2
    double diagonal_term = 0.0;   ///< (1/n^2) sum_j L_{j+n0}(g^2)
    double cross_term = 0.0;      ///< (2/n^2) sum_{j<k} L_{j+n0}(g P^{k-j} g)
    double correction = 0.0;      ///< diagonal_term + cross_term
    AsymptoticConstant asymptotic;
};

/// Exact e_nu(S_{n,n0}, f)^2 in O((n + n0)|D|^2) time and O(sqrt(n)|D|)
/// memory.
///
/// The cross sum is regrouped as sum_{m=1}^{n-1} <D_{n-m}, g P^m g>_pi with
/// prefix sums D_r = sum_{j=1}^{r} d_{j+n0}. D_r is built with r ascending
/// while P^m g is needed with m descending, so P^m g is checkpointed every
/// ceil(sqrt(n)) steps and regenerated block by block.
inline ExactErrorReport exact_error(const ReversibleChain &chain, const SpectralDecomposition &spectrum,
                                    const Distribution &nu, const StateFunction &f, const EstimatorSpec &spec,
                                    double work_cap = kDefaultWorkCap) {
    const std::size_t size = chain.size();
    detail::require(nu.size() == size && f.size() == size, ErrorKind::invalid_argument, "dimension mismatch");
    const double dim = static_cast<double>(size);
    const double work = (static_cast<double>(spec.n) + static_cast<double>(spec.n0)) * dim * dim;
    detail::require(work <= work_cap, ErrorKind::budget_overflow,
                    "exact error needs ~" + detail::num(work) + " operations, cap is " + detail::num(work_cap));

    const Matrix &P = chain.transition().entries();
    const Vector &pi = chain.stationary().weights();
    const Vector g = centered(f.values(), pi);
    const std::size_t n = spec.n;

    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
    std::vector<Vector> checkpoints;
    checkpoints.reserve(n / block + 1);
    {
        Vector h = g;
        for (std::size_t m = 0; m < n; ++m) {
            if (m % block == 0) {
                checkpoints.push_back(h);
            }
            if (m + 1 < n) {
                h = P * h;
            }
        }
    }

    DeviationSequence deviation(chain, nu, spec.n0 + 1);
    Vector prefix = Vector::Zero(static_cast<Eigen::Index>(size));
    double cross = 0.0;
    std::vector<Vector> buffer(block);
    for (std::size_t blk = checkpoints.size(); blk-- > 0;) {
        const std::size_t lo = blk * block;
        const std::size_t hi = std::min(lo + block, n);
        Vector h = checkpoints[blk];
        for (std::size_t m = lo; m < hi; ++m) {
            buffer[m - lo] = h;
            if (m + 1 < hi) {
                h = P * h;
            }
        }
        for (std::size_t m = hi; m-- > std::max<std::size_t>(lo, 1);) {
            prefix += deviation.current();
            deviation.advance();
            cross += weighted_inner(prefix, g.cwiseProduct(buffer[m - lo]), pi);
        }
    }
    prefix += deviation.current();
    const double diagonal = weighted_inner(prefix, g.cwiseProduct(g), pi);

    const double nn = static_cast<double>(n);
    ExactErrorReport report;
    report.stationary_mse = stationary_error(spectrum, g, n);
    report.diagonal_term = diagonal / (nn * nn);
    report.cross_term = 2.0 * cross / (nn * nn);
    report.correction = report.diagonal_term + report.cross_term;
    report.mse = report.stationary_mse + report.correction;
    report.asymptotic = asymptotic_constant(spectrum, f.values());
    return report;
}

/// The same identity evaluated term by term in O(n^2 (n + n0) |D|^2); for
/// cross-checking `exact_error` with n <= 50.
inline ExactErrorReport exact_error_naive(const ReversibleChain &chain, const SpectralDecomposition &spectrum,
                                          const Distribution &nu, const StateFunction &f, const EstimatorSpec &spec) {
    detail::require(spec.n <= 50, ErrorKind::too_large, "naive evaluation is limited to n <= 50");
    const Vector &pi = chain.stationary().weights();
    const Vector g = centered(f.values(), pi);
    const Vector g2 = g.cwiseProduct(g);
    const std::size_t n = spec.n;

    double diagonal = 0.0;
    double cross = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        diagonal += l_functional(chain, nu, j + spec.n0, g2);
        for (std::size_t k = j + 1; k <= n; ++k) {
            const Vector h = g.cwiseProduct(apply_to_function(chain, g, k - j));
            cross += l_functional(chain, nu, j + spec.n0, h);
        }
    }
    const double nn = static_cast<double>(n);
    ExactErrorReport report;
    report.stationary_mse = stationary_error(spectrum, g, n);
    report.diagonal_term = diagonal / (nn * nn);
    report.cross_term = 2.0 * cross / (nn * nn);
    report.correction = report.diagonal_term + report.cross_term;
    report.mse = report.stationary_mse + report.correction;
    report.asymptotic = asymptotic_constant(spectrum, f.values());
    return report;
}

inline constexpr double kEnumerationCap = 1e7;

/// Ground truth E_{nu,P} |S_{n,n0}(f) - S(f)|^2 by summing over every path
/// x_0..x_{n+n0} weighted by nu(x_0) p(x_0,x_1) ... p(x_{N-1},x_N).
inline double path_enumeration_oracle(const ReversibleChain &chain, const Distribution &nu, const StateFunction &f,
                                      const EstimatorSpec &spec) {
    const std::size_t size = chain.size();
    detail::require(nu.size() == size && f.size() == size, ErrorKind::invalid_argument, "dimension mismatch");
    const std::size_t length = spec.total();
    const double paths = std::pow(static_cast<double>(size), static_cast<double>(length + 1));
    detail::require(paths <= kEnumerationCap, ErrorKind::too_large,
                    std::to_string(size) + "^" + std::to_string(length + 1) + " paths exceed the enumeration cap");

    const Matrix &P = chain.transition().entries();
    const Vector &pi = chain.stationary().weights();
    const Vector g = centered(f.values(), pi);
    const double nn = static_cast<double>(spec.n);

    double total = 0.0;
    // step = transitions taken so far, last = x_step.
    std::function<void(std::size_t, Eigen::Index, double, double)> walk = [&](std::size_t step, Eigen::Index last,
                                                                              double weight, double sum) {
        if (step == length) {
            const double avg = sum / nn;
            total += weight * avg * avg;
            return;
        }
        for (Eigen::Index y = 0; y < P.cols(); ++y) {
            const double p = P(last, y);
            if (p > 0.0) {
                walk(step + 1, y, weight * p, step + 1 > spec.n0 ? sum + g(y) : sum);
            }
        }
    };
    for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(size); ++x) {
        const double w = nu.weights()(x);
        if (w > 0.0) {
            walk(0, x, w, 0.0);
        }
    }
    return total;
}

}  // namespace mcmc_certify
