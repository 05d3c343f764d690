#pragma once

// Explicit upper bounds on e_nu(S_{n,n0}, f)^2 in terms of the l2, l4 and
// l_inf norms of f.

#include "mcmc_certify/exact_error.hpp"

#include <numbers>

namespace mcmc_certify {

/// beta^n0 without underflow to zero: a zero would certify a vanishing
/// correction. Clamped below at 1e-320 unless beta is exactly 0.
inline double damping_factor(double beta, std::size_t n0) {
    if (n0 == 0) {
        return 1.0;
    }
    if (beta == 0.0) {
        return 0.0;
    }
    const double log_value = static_cast<double>(n0) * std::log(beta);
    const double value = log_value < -700.0 ? std::exp(log_value) : std::pow(beta, static_cast<double>(n0));
    return std::max(value, 1e-320);
}

/// V(b, n) = sum_{j=1}^n b^j + 2 sum_{j<k<=n} b^k = sum_{k=1}^n (2k - 1) b^k.
inline double v_aggregate(double b, std::size_t n) {
    detail::require(b >= 0.0 && b < 1.0, ErrorKind::invalid_argument, "V(b, n) needs b in [0, 1)");
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    double total = 0.0;
    double power = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        power *= b;
        if (power == 0.0) {
            break;
        }
        total += (2.0 * static_cast<double>(k) - 1.0) * power;
    }
    return total;
}

/// U(b, n) = sum_{j=1}^n b^j + 4 sqrt(2) sum_{j<k<=n} b^{(j+k)/2}.
inline double u_aggregate(double b, std::size_t n) {
    detail::require(b >= 0.0 && b < 1.0, ErrorKind::invalid_argument, "U(b, n) needs b in [0, 1)");
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    const double s = std::sqrt(b);
    // powers[k] = s^k for k = 0..n
    std::vector<double> powers(n + 1);
    powers[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        powers[k] = powers[k - 1] * s;
    }
    double single = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        single += powers[j] * powers[j];
    }
    double pairs = 0.0;
    double suffix = 0.0;  // sum_{k=j+1}^{n} s^k
    for (std::size_t j = n - 1; j >= 1; --j) {
        suffix += powers[j + 1];
        pairs += powers[j] * suffix;
    }
    return single + 4.0 * std::numbers::sqrt2 * pairs;
}

/// Upper bounds on V and U valid for every n.
inline double v_cap(double b) { return 2.0 / ((1.0 - b) * (1.0 - b)); }
inline double u_cap(double b) { return 4.0 * std::numbers::sqrt2 / ((1.0 - b) * (1.0 - std::sqrt(b))); }

struct BoundConstants {
    double beta1 = 0.0;
    double beta = 0.0;
    double c_density = 0.0;  ///< ||nu/pi - 1||_inf
    double c_pi = 0.0;       ///< ||1/pi||_inf
};

struct BoundReport {
    Norm norm_kind = Norm::l2;
    double leading_term = 0.0;
    double correction_term = 0.0;
    double total = 0.0;
    BoundConstants constants;
};

namespace detail {

inline void require_bound_norm(Norm norm) {
    require(norm == Norm::l2 || norm == Norm::l4 || norm == Norm::linf, ErrorKind::invalid_argument,
            "bounds are stated for l2, l4 and linf only");
}

inline BoundConstants bound_constants(const ReversibleChain &chain, const SpectralDecomposition &spectrum,
                                      const Distribution &nu) {
    const Vector &pi = chain.stationary().weights();
    return BoundConstants{spectrum.beta1(), spectrum.beta(), density_deviation_sup(nu.weights(), pi), inverse_pi_sup(pi)};
}

}  // namespace detail

/// Stationary error plus the aggregate-weighted correction, with g = f - S(f):
///   l2:   V(beta, n) sqrt(||1/pi||) sqrt(||nu/pi - 1||) ||g||_2^2
///   l4:   U(beta, n)                sqrt(||nu/pi - 1||) ||g||_4^2
///   linf: V(beta, n)                sqrt(||nu/pi - 1||) ||g||_inf^2
/// each times beta^n0 / n^2. The leading term is the exact e_pi(S_n, f)^2.
inline BoundReport bound_general_start(const ReversibleChain &chain, const SpectralDecomposition &spectrum,
                                       const Distribution &nu, const StateFunction &f, const EstimatorSpec &spec,
                                       Norm norm) {
    detail::require_bound_norm(norm);
    const Vector &pi = chain.stationary().weights();
    const Vector g = centered(f.values(), pi);
    BoundReport report;
    report.norm_kind = norm;
    report.constants = detail::bound_constants(chain, spectrum, nu);
    const auto &c = report.constants;

    const double g_norm = weighted_norm(g, pi, norm);
    double aggregate = 0.0;
    double scale = std::sqrt(c.c_density);
    switch (norm) {
        case Norm::l2:
            aggregate = v_aggregate(c.beta, spec.n);
            scale *= std::sqrt(c.c_pi);
            break;
        case Norm::l4: aggregate = u_aggregate(c.beta, spec.n); break;
        default: aggregate = v_aggregate(c.beta, spec.n); break;
    }
    const double nn = static_cast<double>(spec.n);
    report.leading_term = stationary_error(spectrum, g, spec.n);
    report.correction_term = aggregate / (nn * nn) * damping_factor(c.beta, spec.n0) * scale * g_norm * g_norm;
    report.total = report.leading_term + report.correction_term;
    return report;
}

/// Closed-form bounds:
///   l2:   2||f||_2^2/(n(1-b1)) + 2 sqrt(||1/pi||) sqrt(||nu/pi-1||) beta^n0 ||f||_2^2 / (n^2 (1-beta)^2)
///   l4:   2||f||_4^2/(n(1-b1)) + 16 sqrt(2) sqrt(||nu/pi-1||) beta^n0 ||f||_4^2 / (n^2 (1-beta)(1-sqrt(beta)))
///   linf: 2||f||_inf^2/(n(1-b1)) + 4 sqrt(||nu/pi-1||) beta^n0 ||f||_inf^2 / (n^2 (1-beta)^2)
inline BoundReport bound_theorem(const ReversibleChain &chain, const SpectralDecomposition &spectrum,
                                 const Distribution &nu, const StateFunction &f, const EstimatorSpec &spec, Norm norm) {
    detail::require_bound_norm(norm);
    const Vector &pi = chain.stationary().weights();
    BoundReport report;
    report.norm_kind = norm;
    report.constants = detail::bound_constants(chain, spectrum, nu);
    const auto &c = report.constants;

    const double f_norm = weighted_norm(f.values(), pi, norm);
    const double f_sq = f_norm * f_norm;
    const double nn = static_cast<double>(spec.n);
    const double damping = damping_factor(c.beta, spec.n0);
    const double one_minus_beta = 1.0 - c.beta;

    report.leading_term = 2.0 * f_sq / (nn * (1.0 - c.beta1));
    switch (norm) {
        case Norm::l2:
            report.correction_term = 2.0 * std::sqrt(c.c_pi) * std::sqrt(c.c_density) * damping * f_sq /
                                     (nn * nn * one_minus_beta * one_minus_beta);
            break;
        case Norm::l4:
            report.correction_term = 16.0 * std::numbers::sqrt2 * std::sqrt(c.c_density) * damping * f_sq /
                                     (nn * nn * one_minus_beta * (1.0 - std::sqrt(c.beta)));
            break;
        default:
            report.correction_term =
                4.0 * std::sqrt(c.c_density) * damping * f_sq / (nn * nn * one_minus_beta * one_minus_beta);
            break;
    }
    report.total = report.leading_term + report.correction_term;
    return report;
}

}  // namespace mcmc_certify
