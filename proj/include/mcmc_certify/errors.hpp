#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcmc_certify {

/// Numerical tolerances shared by every module.
inline constexpr double kRowTol = 1e-12;   // row sums of P, mass of distributions
inline constexpr double kRevTol = 1e-10;   // detailed balance residual
inline constexpr double kStatTol = 1e-10;  // stationarity residual of pi
inline constexpr double kSpecTol = 1e-8;   // eigen-decomposition checks
inline constexpr double kMinMass = 1e-300; // smallest admissible pi(x)

enum class ErrorKind {
    invalid_argument,
    not_stochastic,
    not_stationary,
    not_reversible,
    not_ergodic,
    zero_mass,
    spectral_failure,
    budget_overflow,
    too_large,
    io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::not_stochastic: return "NotStochastic";
        case ErrorKind::not_stationary: return "NotStationary";
        case ErrorKind::not_reversible: return "NotReversible";
        case ErrorKind::not_ergodic: return "NotErgodic";
        case ErrorKind::zero_mass: return "ZeroMass";
        case ErrorKind::spectral_failure: return "SpectralFailure";
        case ErrorKind::budget_overflow: return "BudgetOverflow";
        case ErrorKind::too_large: return "TooLarge";
        case ErrorKind::io: return "IOError";
    }
    return "Unknown";
}

/// Single exception type for the library; `kind()` carries the category.
class CertifyError : public std::runtime_error {
  public:
    CertifyError(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

namespace detail {

/// %g rendering for error messages.
inline std::string num(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

inline void require(bool condition, ErrorKind kind, const std::string &message) {
    if (!condition) {
        throw CertifyError(kind, message);
    }
}

}  // namespace detail

}  // namespace mcmc_certify
