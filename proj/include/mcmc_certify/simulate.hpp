#pragma once

// Seeded Monte Carlo estimate of e_nu(S_{n,n0}, f)^2.

#include "mcmc_certify/exact_error.hpp"

#include <array>
#include <random>
#include <thread>

namespace mcmc_certify {

struct SimulationConfig {
    std::size_t replications = 2;
    std::uint64_t seed = 0;
    EstimatorSpec spec{1, 0};
    /// 0 = std::thread::hardware_concurrency(). Results do not depend on it.
    unsigned threads = 1;

    SimulationConfig(std::size_t r, std::uint64_t s, EstimatorSpec e, unsigned t = 1)
        : replications(r), seed(s), spec(e), threads(t) {
        detail::require(replications >= 2, ErrorKind::invalid_argument, "at least 2 replications are needed");
    }
};

struct EmpiricalErrorReport {
    double mse_hat = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const EmpiricalErrorReport &, const EmpiricalErrorReport &) = default;
};

/// Random stream for replication `index`: a function of (seed, index) only.
inline std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF sampler over cached cumulative row sums.
class ChainSampler {
  public:
    ChainSampler(const ReversibleChain &chain, const Distribution &nu) : size_(chain.size()) {
        detail::require(nu.size() == size_, ErrorKind::invalid_argument, "dimension mismatch");
        initial_ = cumulative(nu.weights());
        rows_.reserve(size_);
        const Matrix &P = chain.transition().entries();
        for (Eigen::Index x = 0; x < P.rows(); ++x) {
            rows_.push_back(cumulative(P.row(x).transpose()));
        }
    }

    [[nodiscard]] std::size_t initial(std::mt19937_64 &rng) const { return draw(initial_, rng); }
    [[nodiscard]] std::size_t step(std::size_t x, std::mt19937_64 &rng) const { return draw(rows_[x], rng); }

  private:
    // Entries from the last positive weight onward are pinned to 1 so that
    // u < 1 always lands on a state with positive probability.
    static std::vector<double> cumulative(const Vector &w) {
        std::vector<double> cdf(static_cast<std::size_t>(w.size()));
        double running = 0.0;
        Eigen::Index last_positive = 0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            running += w(i);
            cdf[static_cast<std::size_t>(i)] = running;
            if (w(i) > 0.0) {
                last_positive = i;
            }
        }
        for (auto i = static_cast<std::size_t>(last_positive); i < cdf.size(); ++i) {
            cdf[i] = 1.0;
        }
        return cdf;
    }

    static std::size_t draw(const std::vector<double> &cdf, std::mt19937_64 &rng) {
        const double u = uniform01(rng);
        return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }

    std::size_t size_;
    std::vector<double> initial_;
    std::vector<std::vector<double>> rows_;
};

/// X_0 ~ nu, X_{t+1} ~ p(X_t, .); returns X_0..X_length.
inline std::vector<std::size_t> sample_trajectory(const ChainSampler &sampler, std::size_t length, std::mt19937_64 &rng) {
    std::vector<std::size_t> path(length + 1);
    path[0] = sampler.initial(rng);
    for (std::size_t t = 1; t <= length; ++t) {
        path[t] = sampler.step(path[t - 1], rng);
    }
    return path;
}

inline std::vector<std::size_t> sample_trajectory(const ReversibleChain &chain, const Distribution &nu, std::size_t length,
                                                  std::mt19937_64 &rng) {
    return sample_trajectory(ChainSampler(chain, nu), length, rng);
}

namespace detail {

// Fixed pairwise tree over indices [lo, hi); the shape depends only on the
// range, never on how the values were produced.
template <typename Fn>
double pairwise_sum(std::size_t lo, std::size_t hi, const Fn &value) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += value(i);
        }
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(lo, mid, value) + pairwise_sum(mid, hi, value);
}

}  // namespace detail

/// Mean over R replications of (S_{n,n0}(f) - S(f))^2 with its standard
/// error. Bit-identical for a given (seed, R, spec) at any thread count.
inline EmpiricalErrorReport estimate_error(const ReversibleChain &chain, const Distribution &nu, const StateFunction &f,
                                           const SimulationConfig &config) {
    detail::require(f.size() == chain.size(), ErrorKind::invalid_argument, "dimension mismatch");
    const ChainSampler sampler(chain, nu);
    const Vector &pi = chain.stationary().weights();
    // Shifted by f(0) so that a constant f centers to exactly zero.
    const double shift = f[0];
    const Vector shifted = f.values().array() - shift;
    const double target = mean(shifted, pi);
    const Vector g = shifted.array() - target;

    const std::size_t reps = config.replications;
    const EstimatorSpec spec = config.spec;
    std::vector<double> squared(reps);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> path;
        for (std::size_t r = begin; r < end; ++r) {
            auto rng = replication_stream(config.seed, r);
            path = sample_trajectory(sampler, spec.total(), rng);
            double sum = 0.0;
            for (std::size_t t = spec.n0 + 1; t < path.size(); ++t) {
                sum += g(static_cast<Eigen::Index>(path[t]));
            }
            const double avg = sum / static_cast<double>(spec.n);
            squared[r] = avg * avg;
        }
    };

    unsigned threads = config.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    if (threads <= 1) {
        run_range(0, reps);
    } else {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (reps + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(reps, t * chunk);
            const std::size_t end = std::min(reps, begin + chunk);
            workers.emplace_back(run_range, begin, end);
        }
    }

    const double rr = static_cast<double>(reps);
    const double mse = detail::pairwise_sum(0, reps, [&](std::size_t i) { return squared[i]; }) / rr;
    const double ss = detail::pairwise_sum(0, reps, [&](std::size_t i) {
        const double d = squared[i] - mse;
        return d * d;
    });
    EmpiricalErrorReport report;
    report.mse_hat = mse;
    report.std_error = std::sqrt(ss / (rr - 1.0)) / std::sqrt(rr);
    report.replications = reps;
    report.seed = config.seed;
    return report;
}

}  // namespace mcmc_certify
