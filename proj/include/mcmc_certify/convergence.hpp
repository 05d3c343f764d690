#pragma once

// Distances to stationarity: chi^2-contrast, total variation, the density
// deviation d_k and the functional L_k(h) = <d_k, h>_pi.

#include "mcmc_certify/spectral_core.hpp"

namespace mcmc_certify {

namespace detail {

inline void require_positive_mass(const Vector &mu) {
    for (Eigen::Index x = 0; x < mu.size(); ++x) {
        require(mu(x) >= kMinMass, ErrorKind::zero_mass, "reference mass at state " + std::to_string(x) + " is zero");
    }
}

}  // namespace detail

/// chi^2(nu, mu) = sum_x (nu(x) - mu(x))^2 / mu(x).
inline double chi2_contrast(const Vector &nu, const Vector &mu) {
    detail::require(nu.size() == mu.size(), ErrorKind::invalid_argument, "dimension mismatch");
    detail::require_positive_mass(mu);
    return ((nu - mu).array().square() / mu.array()).sum();
}

inline double chi2_contrast(const Distribution &nu, const Distribution &mu) {
    return chi2_contrast(nu.weights(), mu.weights());
}

inline double total_variation(const Vector &nu, const Vector &mu) {
    detail::require(nu.size() == mu.size(), ErrorKind::invalid_argument, "dimension mismatch");
    return 0.5 * (nu - mu).cwiseAbs().sum();
}

inline double total_variation(const Distribution &nu, const Distribution &mu) {
    return total_variation(nu.weights(), mu.weights());
}

/// ||nu/pi - 1||_inf.
inline double density_deviation_sup(const Vector &nu, const Vector &pi) {
    detail::require(nu.size() == pi.size(), ErrorKind::invalid_argument, "dimension mismatch");
    detail::require_positive_mass(pi);
    return (nu.array() / pi.array() - 1.0).abs().maxCoeff();
}

inline double density_deviation_sup(const Distribution &nu, const Distribution &pi) {
    return density_deviation_sup(nu.weights(), pi.weights());
}

/// ||1/pi||_inf.
inline double inverse_pi_sup(const Vector &pi) {
    detail::require_positive_mass(pi);
    return 1.0 / pi.minCoeff();
}

inline double inverse_pi_sup(const Distribution &pi) { return inverse_pi_sup(pi.weights()); }

/// d_k(x) = sum_y (nu(y)/pi(y)) (p^k(x,y) - pi(y)) = (P^k (nu/pi))(x) - 1.
struct DeviationFunction {
    std::size_t k = 0;
    Vector values;
    Vector pi;

    [[nodiscard]] double mean() const { return mcmc_certify::mean(values, pi); }
    [[nodiscard]] double norm(Norm p) const { return weighted_norm(values, pi, p); }
    /// ||d_k||_inf = ||nu P^k / pi - 1||_inf.
    [[nodiscard]] double sup_norm() const { return norm(Norm::linf); }
};

inline DeviationFunction deviation_function(const ReversibleChain &chain, const Distribution &nu, std::size_t k) {
    const Vector &pi = chain.stationary().weights();
    detail::require(nu.size() == chain.size(), ErrorKind::invalid_argument, "dimension mismatch");
    detail::require_positive_mass(pi);
    const Vector density = nu.weights().cwiseQuotient(pi);
    Vector d = apply_to_function(chain, density, k).array() - 1.0;
    return DeviationFunction{k, std::move(d), pi};
}

/// Successive d_k for k = first, first+1, ... sharing one power iteration.
class DeviationSequence {
  public:
    DeviationSequence(const ReversibleChain &chain, const Distribution &nu, std::size_t first)
        : P_(&chain.transition().entries()), k_(first) {
        const Vector &pi = chain.stationary().weights();
        detail::require(nu.size() == chain.size(), ErrorKind::invalid_argument, "dimension mismatch");
        detail::require_positive_mass(pi);
        density_ = apply_to_function(chain, nu.weights().cwiseQuotient(pi), first);
    }

    [[nodiscard]] std::size_t k() const noexcept { return k_; }
    /// d_k for the current k.
    [[nodiscard]] Vector current() const { return density_.array() - 1.0; }

    void advance() {
        density_ = (*P_) * density_;
        ++k_;
    }

  private:
    const Matrix *P_;
    std::size_t k_;
    Vector density_;
};

/// L_k(h) = <d_k, h>_pi.
inline double l_functional(const ReversibleChain &chain, const Distribution &nu, std::size_t k, const Vector &h) {
    detail::require(k >= 1, ErrorKind::invalid_argument, "L_k requires k >= 1");
    const DeviationFunction d = deviation_function(chain, nu, k);
    return weighted_inner(d.values, h, d.pi);
}

inline double l_functional(const ReversibleChain &chain, const Distribution &nu, std::size_t k, const StateFunction &h) {
    return l_functional(chain, nu, k, h.values());
}

/// Spectral route: L_k(h) = sum_{m>=1} beta_m^k <nu/pi, u_m>_pi <h, u_m>_pi.
inline double l_functional_spectral(const SpectralDecomposition &spectrum, const Distribution &nu, std::size_t k,
                                    const Vector &h) {
    const Vector &pi = spectrum.pi();
    detail::require_positive_mass(pi);
    const Vector c = spectrum.coefficients(nu.weights().cwiseQuotient(pi));
    const Vector a = spectrum.coefficients(h);
    double total = 0.0;
    for (std::size_t m = 1; m < spectrum.size(); ++m) {
        const auto i = static_cast<Eigen::Index>(m);
        total += std::pow(spectrum.eigenvalue(m), static_cast<double>(k)) * c(i) * a(i);
    }
    return total;
}

}  // namespace mcmc_certify
