#pragma once

// Finite-state reversible Markov chains and their spectral decomposition
// under the pi-weighted inner product <f, g>_pi = sum_x f(x) g(x) pi(x).

#include "mcmc_certify/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcmc_certify {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Norm { l1, l2, l4, linf };

inline std::string_view to_string(Norm norm) {
    switch (norm) {
        case Norm::l1: return "l1";
        case Norm::l2: return "l2";
        case Norm::l4: return "l4";
        case Norm::linf: return "linf";
    }
    return "?";
}

namespace detail {

inline Vector to_vector(std::span<const double> values) {
    Vector out(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = values[i];
    }
    return out;
}

inline bool all_finite(const Vector &v) { return v.allFinite(); }

}  // namespace detail

/// The finite state space D with optional display labels.
class StateSpace {
  public:
    explicit StateSpace(std::size_t size, std::vector<std::string> labels = {}) : size_(size), labels_(std::move(labels)) {
        detail::require(size_ >= 2, ErrorKind::invalid_argument, "state space needs at least 2 states");
        if (!labels_.empty()) {
            detail::require(labels_.size() == size_, ErrorKind::invalid_argument,
                            "expected " + std::to_string(size_) + " labels, got " + std::to_string(labels_.size()));
            const std::set<std::string> unique(labels_.begin(), labels_.end());
            detail::require(unique.size() == labels_.size(), ErrorKind::invalid_argument, "state labels must be distinct");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] const std::vector<std::string> &labels() const noexcept { return labels_; }

    [[nodiscard]] std::string label(std::size_t x) const {
        return labels_.empty() ? std::to_string(x) : labels_.at(x);
    }

  private:
    std::size_t size_;
    std::vector<std::string> labels_;
};

/// A real function on D.
class StateFunction {
  public:
    StateFunction() = default;
    explicit StateFunction(Vector values) : values_(std::move(values)) {
        detail::require(detail::all_finite(values_), ErrorKind::invalid_argument, "state function has non-finite entries");
    }
    StateFunction(std::initializer_list<double> values)
        : StateFunction(detail::to_vector(std::span<const double>(values.begin(), values.size()))) {}
    explicit StateFunction(std::span<const double> values) : StateFunction(detail::to_vector(values)) {}

    static StateFunction constant(std::size_t size, double c) {
        return StateFunction(Vector::Constant(static_cast<Eigen::Index>(size), c));
    }

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    [[nodiscard]] double operator[](std::size_t x) const { return values_(static_cast<Eigen::Index>(x)); }
    [[nodiscard]] const Vector &values() const noexcept { return values_; }

  private:
    Vector values_;
};

/// A probability vector on D.
class Distribution {
  public:
    Distribution() = default;
    explicit Distribution(Vector weights) : weights_(std::move(weights)) {
        detail::require(weights_.size() >= 1 && detail::all_finite(weights_), ErrorKind::invalid_argument,
                        "distribution has non-finite entries");
        for (Eigen::Index x = 0; x < weights_.size(); ++x) {
            detail::require(weights_(x) >= 0.0, ErrorKind::invalid_argument,
                            "distribution weight " + std::to_string(x) + " is negative");
        }
        const double mass = weights_.sum();
        detail::require(std::abs(mass - 1.0) <= kRowTol, ErrorKind::invalid_argument,
                        "distribution sums to " + detail::num(mass) + ", not 1");
    }
    Distribution(std::initializer_list<double> weights)
        : Distribution(detail::to_vector(std::span<const double>(weights.begin(), weights.size()))) {}
    explicit Distribution(std::span<const double> weights) : Distribution(detail::to_vector(weights)) {}

    static Distribution point_mass(std::size_t size, std::size_t x) {
        Vector w = Vector::Zero(static_cast<Eigen::Index>(size));
        w(static_cast<Eigen::Index>(x)) = 1.0;
        return Distribution(std::move(w));
    }

    static Distribution uniform(std::size_t size) {
        return Distribution(Vector::Constant(static_cast<Eigen::Index>(size), 1.0 / static_cast<double>(size)));
    }

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
    [[nodiscard]] double operator[](std::size_t x) const { return weights_(static_cast<Eigen::Index>(x)); }
    [[nodiscard]] const Vector &weights() const noexcept { return weights_; }

  private:
    Vector weights_;
};

/// Row-stochastic matrix of transition probabilities p(x, y).
class TransitionMatrix {
  public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
        detail::require(entries_.rows() == entries_.cols(), ErrorKind::not_stochastic, "transition matrix must be square");
        detail::require(entries_.rows() >= 2, ErrorKind::invalid_argument, "state space needs at least 2 states");
        for (Eigen::Index x = 0; x < entries_.rows(); ++x) {
            for (Eigen::Index y = 0; y < entries_.cols(); ++y) {
                const double p = entries_(x, y);
                detail::require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::not_stochastic,
                                "entry (" + std::to_string(x) + "," + std::to_string(y) + ") = " + detail::num(p) +
                                    " is not a probability");
            }
            const double row_sum = entries_.row(x).sum();
            detail::require(std::abs(row_sum - 1.0) <= kRowTol, ErrorKind::not_stochastic,
                            "row " + std::to_string(x) + " sums to " + detail::num(row_sum));
        }
    }
    TransitionMatrix(std::initializer_list<std::initializer_list<double>> rows) : TransitionMatrix(from_rows(rows)) {}

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    [[nodiscard]] double operator()(std::size_t x, std::size_t y) const {
        return entries_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
    [[nodiscard]] const Matrix &entries() const noexcept { return entries_; }

  private:
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const auto n = static_cast<Eigen::Index>(rows.size());
        Matrix m(n, n);
        Eigen::Index x = 0;
        for (const auto &row : rows) {
            detail::require(static_cast<Eigen::Index>(row.size()) == n, ErrorKind::not_stochastic,
                            "row " + std::to_string(x) + " has " + std::to_string(row.size()) + " entries");
            Eigen::Index y = 0;
            for (double p : row) {
                m(x, y++) = p;
            }
            ++x;
        }
        return m;
    }

    Matrix entries_;
};

class ReversibleChain;
ReversibleChain build_chain(TransitionMatrix P, std::optional<Distribution> pi = std::nullopt,
                            std::vector<std::string> labels = {});

/// A transition matrix together with a strictly positive stationary
/// distribution for which detailed balance holds.
class ReversibleChain {
  public:
    [[nodiscard]] const TransitionMatrix &transition() const noexcept { return P_; }
    [[nodiscard]] const Distribution &stationary() const noexcept { return pi_; }
    [[nodiscard]] const StateSpace &states() const noexcept { return states_; }
    [[nodiscard]] double reversibility_residual() const noexcept { return residual_; }
    [[nodiscard]] double stationarity_residual() const noexcept { return stationarity_residual_; }
    [[nodiscard]] std::size_t size() const noexcept { return P_.size(); }

  private:
    friend ReversibleChain build_chain(TransitionMatrix, std::optional<Distribution>, std::vector<std::string>);

    ReversibleChain(TransitionMatrix P, Distribution pi, StateSpace states, double residual, double stat_residual)
        : P_(std::move(P)), pi_(std::move(pi)), states_(std::move(states)), residual_(residual),
          stationarity_residual_(stat_residual) {}

    TransitionMatrix P_;
    Distribution pi_;
    StateSpace states_;
    double residual_;
    double stationarity_residual_;
};

namespace detail {

// Strong connectivity of the support graph {(x, y) : p(x, y) > 0}.
inline bool is_irreducible(const Matrix &P) {
    const auto n = P.rows();
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            for (Eigen::Index y = 0; y < n; ++y) {
                const double p = transpose ? P(y, x) : P(x, y);
                if (p > 0.0 && !seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    ++count;
                    stack.push_back(y);
                }
            }
        }
        return count == static_cast<std::size_t>(n);
    };
    return reaches_all(false) && reaches_all(true);
}

inline double stationarity_residual(const Matrix &P, const Vector &pi) {
    return (P.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

// Least-squares solution of [P^T - I; 1^T] nu = [0; 1].
inline Vector solve_stationary(const Matrix &P) {
    const auto n = P.rows();
    Matrix system(n + 1, n);
    system.topRows(n) = P.transpose() - Matrix::Identity(n, n);
    system.row(n).setOnes();
    Vector rhs = Vector::Zero(n + 1);
    rhs(n) = 1.0;
    return system.colPivHouseholderQr().solve(rhs);
}

}  // namespace detail

/// Validates P (and pi, if supplied) and certifies reversibility.
///
/// Without pi the stationary distribution is computed by least squares and
/// must satisfy the stationarity tolerance. Errors are raised in the order:
/// NotStochastic, NotErgodic (reducible support graph), ZeroMass,
/// NotStationary, NotReversible.
inline ReversibleChain build_chain(TransitionMatrix P, std::optional<Distribution> pi, std::vector<std::string> labels) {
    detail::require(P.size() >= 2, ErrorKind::invalid_argument, "state space needs at least 2 states");
    StateSpace states(P.size(), std::move(labels));
    const Matrix &m = P.entries();

    detail::require(detail::is_irreducible(m), ErrorKind::not_ergodic,
                    "support graph of P is not strongly connected; the stationary distribution is not unique");

    Distribution stationary;
    if (pi) {
        detail::require(pi->size() == P.size(), ErrorKind::invalid_argument,
                        "pi has " + std::to_string(pi->size()) + " entries, P has " + std::to_string(P.size()) + " states");
        stationary = std::move(*pi);
    } else {
        Vector solved = detail::solve_stationary(m);
        const double residual = detail::stationarity_residual(m, solved);
        detail::require(residual <= kStatTol, ErrorKind::not_stationary,
                        "least-squares stationary solve left residual " + detail::num(residual));
        // Roundoff can leave entries of size ~1e-17 below zero.
        for (Eigen::Index x = 0; x < solved.size(); ++x) {
            detail::require(solved(x) > -kStatTol, ErrorKind::zero_mass, "computed pi(" + std::to_string(x) + ") < 0");
            solved(x) = std::max(solved(x), 0.0);
        }
        solved /= solved.sum();
        stationary = Distribution(std::move(solved));
    }

    const Vector &w = stationary.weights();
    for (Eigen::Index x = 0; x < w.size(); ++x) {
        detail::require(w(x) >= kMinMass, ErrorKind::zero_mass, "pi(" + std::to_string(x) + ") = 0");
    }

    const double stat_residual = detail::stationarity_residual(m, w);
    detail::require(stat_residual <= kStatTol, ErrorKind::not_stationary,
                    "pi is not stationary for P (max |piP - pi| = " + detail::num(stat_residual) + ")");

    double residual = 0.0;
    Eigen::Index worst_x = 0;
    Eigen::Index worst_y = 0;
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
        for (Eigen::Index y = x + 1; y < m.cols(); ++y) {
            const double r = std::abs(w(x) * m(x, y) - w(y) * m(y, x));
            if (r > residual) {
                residual = r;
                worst_x = x;
                worst_y = y;
            }
        }
    }
    detail::require(residual <= kRevTol, ErrorKind::not_reversible,
                    "detailed balance fails at (" + std::to_string(worst_x) + "," + std::to_string(worst_y) +
                        "): residual " + detail::num(residual));

    return ReversibleChain(std::move(P), std::move(stationary), std::move(states), residual, stat_residual);
}

// ---------------------------------------------------------------------------
// Weighted l_p geometry

inline double weighted_inner(const Vector &f, const Vector &g, const Vector &pi) {
    detail::require(f.size() == g.size() && f.size() == pi.size(), ErrorKind::invalid_argument, "dimension mismatch");
    return (f.array() * g.array() * pi.array()).sum();
}

inline double weighted_inner(const StateFunction &f, const StateFunction &g, const Distribution &pi) {
    return weighted_inner(f.values(), g.values(), pi.weights());
}

inline double weighted_norm(const Vector &f, const Vector &pi, Norm p) {
    detail::require(f.size() == pi.size(), ErrorKind::invalid_argument, "dimension mismatch");
    switch (p) {
        case Norm::l1: return (f.array().abs() * pi.array()).sum();
        case Norm::l2: return std::sqrt((f.array().square() * pi.array()).sum());
        case Norm::l4: return std::sqrt(std::sqrt((f.array().square().square() * pi.array()).sum()));
        case Norm::linf: return f.cwiseAbs().maxCoeff();
    }
    return 0.0;
}

inline double weighted_norm(const StateFunction &f, const Distribution &pi, Norm p) {
    return weighted_norm(f.values(), pi.weights(), p);
}

/// S(f) = <f, 1>_pi.
inline double mean(const Vector &f, const Vector &pi) {
    detail::require(f.size() == pi.size(), ErrorKind::invalid_argument, "dimension mismatch");
    return f.dot(pi);
}

inline double mean(const StateFunction &f, const Distribution &pi) { return mean(f.values(), pi.weights()); }

/// g = f - S(f).
inline Vector centered(const Vector &f, const Vector &pi) {
    return f.array() - mean(f, pi);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

/// Eigenvalues 1 = beta_0 > beta_1 >= ... > -1 with pi-orthonormal
/// eigenfunctions stored as the columns of `eigenfunctions()`.
class SpectralDecomposition {
  public:
    SpectralDecomposition(Vector eigenvalues, Matrix eigenfunctions, Vector pi, double max_residual,
                          double max_orthonormality_error)
        : eigenvalues_(std::move(eigenvalues)), eigenfunctions_(std::move(eigenfunctions)), pi_(std::move(pi)),
          max_residual_(max_residual), max_orthonormality_error_(max_orthonormality_error) {}

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
    [[nodiscard]] const Vector &eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double eigenvalue(std::size_t k) const { return eigenvalues_(static_cast<Eigen::Index>(k)); }
    [[nodiscard]] const Matrix &eigenfunctions() const noexcept { return eigenfunctions_; }
    [[nodiscard]] StateFunction eigenfunction(std::size_t k) const {
        return StateFunction(Vector(eigenfunctions_.col(static_cast<Eigen::Index>(k))));
    }
    [[nodiscard]] const Vector &pi() const noexcept { return pi_; }

    /// Second largest eigenvalue.
    [[nodiscard]] double beta1() const { return eigenvalues_(1); }
    /// max{beta_1, |beta_min|}.
    [[nodiscard]] double beta() const { return std::max(beta1(), std::abs(eigenvalues_(eigenvalues_.size() - 1))); }
    [[nodiscard]] double spectral_gap() const { return 1.0 - beta1(); }

    [[nodiscard]] double max_residual() const noexcept { return max_residual_; }
    [[nodiscard]] double max_orthonormality_error() const noexcept { return max_orthonormality_error_; }

    /// a_k = <f, u_k>_pi for every k (a_0 = S(f)).
    [[nodiscard]] Vector coefficients(const Vector &f) const {
        detail::require(f.size() == pi_.size(), ErrorKind::invalid_argument, "dimension mismatch");
        return eigenfunctions_.transpose() * f.cwiseProduct(pi_);
    }
    [[nodiscard]] Vector coefficients(const StateFunction &f) const { return coefficients(f.values()); }

  private:
    Vector eigenvalues_;
    Matrix eigenfunctions_;
    Vector pi_;
    double max_residual_;
    double max_orthonormality_error_;
};

/// Diagonalizes the symmetric similarity D^{1/2} P D^{-1/2}, D = diag(pi),
/// and maps eigenvectors back via u = D^{-1/2} v.
inline SpectralDecomposition spectral_decompose(const ReversibleChain &chain) {
    const Matrix &P = chain.transition().entries();
    const Vector &pi = chain.stationary().weights();
    const auto n = P.rows();

    const Vector sqrt_pi = pi.cwiseSqrt();
    const Vector inv_sqrt_pi = sqrt_pi.cwiseInverse();
    Matrix A = sqrt_pi.asDiagonal() * P * inv_sqrt_pi.asDiagonal();
    A = 0.5 * (A + A.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(A);
    detail::require(solver.info() == Eigen::Success, ErrorKind::spectral_failure, "symmetric eigensolver did not converge");

    // Eigen returns ascending order; reverse it. Reversal of a sorted
    // sequence keeps ties in a fixed order.
    Vector eigenvalues = solver.eigenvalues().reverse();
    Matrix u = inv_sqrt_pi.asDiagonal() * solver.eigenvectors().rowwise().reverse();

    // u_0 is the constant function 1 (positive sign).
    if (u.col(0).sum() < 0.0) {
        u.col(0) *= -1.0;
    }

    detail::require(std::abs(eigenvalues(0) - 1.0) <= kSpecTol, ErrorKind::spectral_failure,
                    "leading eigenvalue " + detail::num(eigenvalues(0)) + " differs from 1");
    detail::require((u.col(0).array() - 1.0).abs().maxCoeff() <= kSpecTol, ErrorKind::spectral_failure,
                    "leading eigenfunction is not constant");

    const Matrix gram = u.transpose() * pi.asDiagonal() * u;
    const double ortho_error = (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    detail::require(ortho_error <= kSpecTol, ErrorKind::spectral_failure,
                    "eigenfunctions are not pi-orthonormal (error " + detail::num(ortho_error) + ")");

    double max_residual = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vector r = P * u.col(k) - eigenvalues(k) * u.col(k);
        max_residual = std::max(max_residual, weighted_norm(r, pi, Norm::l2));
    }
    detail::require(max_residual <= kSpecTol, ErrorKind::spectral_failure,
                    "eigen residual " + detail::num(max_residual) + " exceeds tolerance");

    SpectralDecomposition out(std::move(eigenvalues), std::move(u), pi, max_residual, ortho_error);
    detail::require(out.beta() < 1.0 - kSpecTol, ErrorKind::not_ergodic,
                    "chain is periodic or reducible (beta = " + detail::num(out.beta()) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// Powers of P applied to functions and distributions

/// P^k f by k matrix-vector products.
inline Vector apply_to_function(const ReversibleChain &chain, Vector f, std::size_t k) {
    const Matrix &P = chain.transition().entries();
    detail::require(f.size() == P.rows(), ErrorKind::invalid_argument, "dimension mismatch");
    for (std::size_t i = 0; i < k; ++i) {
        f = P * f;
    }
    return f;
}

inline StateFunction apply_to_function(const ReversibleChain &chain, const StateFunction &f, std::size_t k) {
    return StateFunction(apply_to_function(chain, f.values(), k));
}

/// nu P^k by k vector-matrix products.
inline Vector apply_to_distribution(const ReversibleChain &chain, Vector nu, std::size_t k) {
    const Matrix &P = chain.transition().entries();
    detail::require(nu.size() == P.rows(), ErrorKind::invalid_argument, "dimension mismatch");
    for (std::size_t i = 0; i < k; ++i) {
        nu = P.transpose() * nu;
    }
    return nu;
}

inline Distribution apply_to_distribution(const ReversibleChain &chain, const Distribution &nu, std::size_t k) {
    Vector out = apply_to_distribution(chain, nu.weights(), k);
    // Clean accumulated roundoff so the result validates as a distribution.
    out = out.cwiseMax(0.0);
    out /= out.sum();
    return Distribution(std::move(out));
}

// ---------------------------------------------------------------------------
// Operator norm of P^n on mean-zero functions

/// Deterministic set of mean-zero test functions: the nontrivial
/// eigenfunctions, coordinate differences e_i - e_j and a seeded random
/// batch. Each is centered and normalized to unit l_p norm.
inline std::vector<Vector> mean_zero_trial_set(const SpectralDecomposition &spectrum, Norm p,
                                               std::size_t random_count = 32, std::uint64_t seed = 0x5eed5eedULL) {
    const Vector &pi = spectrum.pi();
    const auto n = pi.size();
    std::vector<Vector> raw;
    for (Eigen::Index k = 1; k < n; ++k) {
        raw.emplace_back(spectrum.eigenfunctions().col(k));
    }
    constexpr Eigen::Index kMaxPairs = 64;
    Eigen::Index pairs = 0;
    for (Eigen::Index i = 0; i < n && pairs < kMaxPairs; ++i) {
        for (Eigen::Index j = i + 1; j < n && pairs < kMaxPairs; ++j, ++pairs) {
            Vector e = Vector::Zero(n);
            e(i) = 1.0;
            e(j) = -1.0;
            raw.push_back(std::move(e));
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < random_count; ++r) {
        Vector v(n);
        for (Eigen::Index x = 0; x < n; ++x) {
            v(x) = normal(rng);
        }
        raw.push_back(std::move(v));
    }

    std::vector<Vector> trials;
    trials.reserve(raw.size());
    for (auto &v : raw) {
        Vector g = centered(v, pi);
        const double norm = weighted_norm(g, pi, p);
        if (norm > 1e-12) {
            trials.push_back(g / norm);
        }
    }
    return trials;
}

/// Lower estimate of ||P^n||_{l_p^0 -> l_p^0}: the maximum of ||P^n g||_p
/// over `mean_zero_trial_set`.
inline double operator_norm_on_mean_zero(const ReversibleChain &chain, const SpectralDecomposition &spectrum, std::size_t n,
                                         Norm p) {
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be positive");
    detail::require(p == Norm::l2 || p == Norm::l4, ErrorKind::invalid_argument, "operator norm supports l2 and l4 only");
    const Vector &pi = spectrum.pi();
    double best = 0.0;
    for (const Vector &g : mean_zero_trial_set(spectrum, p)) {
        best = std::max(best, weighted_norm(apply_to_function(chain, g, n), pi, p));
    }
    return best;
}

}  // namespace mcmc_certify
