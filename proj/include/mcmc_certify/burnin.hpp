#pragma once

// Burn-in selection under a fixed budget N = n + n0.

#include "mcmc_certify/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mcmc_certify {

enum class BoundKind { b4, binf };

inline std::string_view to_string(BoundKind kind) { return kind == BoundKind::b4 ? "b4" : "binf"; }

/// How the burn-in correction scales with n. `theorem` uses 1/n^2 as in the
/// closed-form error bounds; `printed` uses 1/n.
enum class CorrectionScaling { theorem, printed };

/// Budget N, absolute spectral bound beta and density constant C (held as
/// log C so values up to 1e300 and beyond stay representable).
class BudgetQuery {
  public:
    BudgetQuery(std::size_t budget, double beta, double constant) : BudgetQuery(budget, beta, LogC{std::log(constant)}) {
        detail::require(constant > 0.0 && std::isfinite(constant), ErrorKind::invalid_argument, "C must be positive");
    }

    struct LogC {
        double value;
    };

    BudgetQuery(std::size_t budget, double beta, LogC log_c) : budget_(budget), beta_(beta), log_c_(log_c.value) {
        detail::require(budget_ >= 2, ErrorKind::invalid_argument, "budget N must be at least 2");
        detail::require(beta_ >= 0.0 && beta_ < 1.0, ErrorKind::invalid_argument, "beta must lie in [0, 1)");
        detail::require(std::isfinite(log_c_), ErrorKind::invalid_argument, "C must be positive and finite");
    }

    [[nodiscard]] std::size_t budget() const noexcept { return budget_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double log_c() const noexcept { return log_c_; }

    [[nodiscard]] BudgetQuery with_budget(std::size_t budget) const { return {budget, beta_, LogC{log_c_}}; }

  private:
    std::size_t budget_;
    double beta_;
    double log_c_;
};

struct SuggestedBurnin {
    std::size_t n0 = 0;
    long double ratio = 0.0L;  ///< log C / log(1/beta)
    bool borderline = false;   ///< ratio within 1e-9 of an integer
};

/// n0 = max{ceil(log C / log(1/beta)), 0}; at this n0, C beta^n0 <= 1.
inline SuggestedBurnin suggested_burnin(double beta, double log_c) {
    detail::require(beta > 0.0 && beta < 1.0, ErrorKind::invalid_argument, "suggested burn-in needs beta in (0, 1)");
    // beta - 1 is exact for beta in [0.5, 1), so log1p keeps full precision
    // for beta near 1.
    const long double log_inv_beta = -std::log1p(static_cast<long double>(beta) - 1.0L);
    const long double ratio = static_cast<long double>(log_c) / log_inv_beta;
    SuggestedBurnin out;
    out.ratio = ratio;
    if (ratio > 0.0L) {
        out.n0 = static_cast<std::size_t>(std::ceil(ratio));
        out.borderline = std::abs(ratio - std::round(ratio)) < 1e-9L;
    }
    return out;
}

inline SuggestedBurnin suggested_burnin(const BudgetQuery &query) { return suggested_burnin(query.beta(), query.log_c()); }

/// b_inf(n, n0) = sqrt(2/(n(1-beta)) + 2 C beta^n0 / (n^s (1-beta)^2))
/// b_4(n, n0)   = sqrt(2/(n(1-beta)) + C beta^n0 / (n^s (1-beta)(1-sqrt(beta))))
/// with s = 2 for `theorem` scaling and s = 1 for `printed`.
inline double bound_function(const BudgetQuery &query, std::size_t n, std::size_t n0, BoundKind kind,
                             CorrectionScaling scaling = CorrectionScaling::theorem) {
    detail::require(n >= 1, ErrorKind::invalid_argument, "n must be at least 1");
    const double beta = query.beta();
    const double nn = static_cast<double>(n);
    const double leading = 2.0 / (nn * (1.0 - beta));

    double log_damping = 0.0;
    if (n0 > 0) {
        log_damping = beta == 0.0 ? -std::numeric_limits<double>::infinity() : static_cast<double>(n0) * std::log(beta);
    }
    const double log_n = scaling == CorrectionScaling::theorem ? 2.0 * std::log(nn) : std::log(nn);
    double log_correction = query.log_c() + log_damping - log_n;
    if (kind == BoundKind::binf) {
        log_correction += std::log(2.0) - 2.0 * std::log1p(-beta);
    } else {
        log_correction -= std::log1p(-beta) + std::log1p(-std::sqrt(beta));
    }
    return std::sqrt(leading + std::exp(log_correction));
}

enum class Strategy { suggested, optimized, half_budget };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::suggested: return "suggested";
        case Strategy::optimized: return "optimized";
        case Strategy::half_budget: return "half_budget";
    }
    return "?";
}

struct BurninPlan {
    std::size_t n0 = 0;
    std::size_t n = 1;
    double bound_value = 0.0;
    Strategy strategy = Strategy::optimized;
    BoundKind kind = BoundKind::binf;
    bool clamped = false;  ///< requested n0 did not fit into the budget
};

/// argmin over n0 in {0, ..., N-1} of bound_function(N - n0, n0), ties to
/// the smaller n0.
///
/// The scan stops once sqrt(2/((N - n0)(1 - beta))) exceeds the best value:
/// that leading part alone grows with n0, so no later n0 can win.
inline BurninPlan optimize_burnin(const BudgetQuery &query, BoundKind kind,
                                  CorrectionScaling scaling = CorrectionScaling::theorem) {
    const std::size_t budget = query.budget();
    const double beta = query.beta();
    BurninPlan best;
    best.strategy = Strategy::optimized;
    best.kind = kind;
    best.bound_value = std::numeric_limits<double>::infinity();
    for (std::size_t n0 = 0; n0 < budget; ++n0) {
        const std::size_t n = budget - n0;
        const double floor_value = std::sqrt(2.0 / (static_cast<double>(n) * (1.0 - beta)));
        if (floor_value > best.bound_value) {
            break;
        }
        const double value = bound_function(query, n, n0, kind, scaling);
        if (value < best.bound_value) {
            best.bound_value = value;
            best.n0 = n0;
            best.n = n;
        }
    }
    return best;
}

/// Plan at the suggested burn-in, clamped to N - 1 if it does not fit.
inline BurninPlan suggested_plan(const BudgetQuery &query, BoundKind kind,
                                 CorrectionScaling scaling = CorrectionScaling::theorem) {
    const SuggestedBurnin s = query.beta() > 0.0 ? suggested_burnin(query) : SuggestedBurnin{};
    BurninPlan plan;
    plan.strategy = Strategy::suggested;
    plan.kind = kind;
    plan.clamped = s.n0 >= query.budget();
    plan.n0 = std::min(s.n0, query.budget() - 1);
    plan.n = query.budget() - plan.n0;
    plan.bound_value = bound_function(query, plan.n, plan.n0, kind, scaling);
    return plan;
}

/// n0 = floor(N/2).
inline BurninPlan half_budget_plan(const BudgetQuery &query, BoundKind kind,
                                   CorrectionScaling scaling = CorrectionScaling::theorem) {
    BurninPlan plan;
    plan.strategy = Strategy::half_budget;
    plan.kind = kind;
    plan.n0 = query.budget() / 2;
    plan.n = query.budget() - plan.n0;
    plan.bound_value = bound_function(query, plan.n, plan.n0, kind, scaling);
    return plan;
}

/// Asymptotic cost of the half-budget rule relative to a stationary start.
inline constexpr double kHalfBudgetPenalty = std::numbers::sqrt2;

/// Half-budget bound divided by the stationary-start leading term
/// sqrt(2/(N(1-beta))); tends to sqrt(2).
inline double half_budget_penalty_ratio(const BudgetQuery &query, BoundKind kind,
                                        CorrectionScaling scaling = CorrectionScaling::theorem) {
    const double reference = std::sqrt(2.0 / (static_cast<double>(query.budget()) * (1.0 - query.beta())));
    return half_budget_plan(query, kind, scaling).bound_value / reference;
}

/// e_pi(S_N, u_1) = sqrt((1+b1)/(N(1-b1)) - 2 b1 (1-b1^N)/(N^2 (1-b1)^2)).
inline double stationary_reference(double beta1, std::size_t budget) {
    const double nn = static_cast<double>(budget);
    const double gap = 1.0 - beta1;
    const double one_minus_bn = beta1 > 0.0 ? -std::expm1(nn * std::log(beta1)) : 1.0 - std::pow(beta1, nn);
    return std::sqrt((1.0 + beta1) / (nn * gap) - 2.0 * beta1 * one_minus_bn / (nn * nn * gap * gap));
}

// ---------------------------------------------------------------------------
// Curve families for plotting

struct BurninRule {
    enum class Type { fixed, suggested, half_budget, optimized };
    Type type = Type::fixed;
    std::size_t n0 = 0;  // fixed rules only

    static BurninRule fixed(std::size_t n0) { return {Type::fixed, n0}; }
    static BurninRule suggested() { return {Type::suggested, 0}; }
    static BurninRule half_budget() { return {Type::half_budget, 0}; }
    static BurninRule optimized() { return {Type::optimized, 0}; }
};

struct FigureRow {
    std::size_t budget = 0;
    std::size_t n0 = 0;
    std::string kind;  ///< "<b4|binf>/<rule>" or "stationary"
    double value = 0.0;
};

/// Integer budgets spaced evenly in log10 between lo and hi (inclusive),
/// deduplicated.
inline std::vector<std::size_t> log_spaced_budgets(std::size_t lo, std::size_t hi, std::size_t per_decade) {
    detail::require(lo >= 1 && hi >= lo && per_decade >= 1, ErrorKind::invalid_argument, "invalid budget grid");
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    const auto steps = static_cast<std::size_t>(std::ceil((b - a) * static_cast<double>(per_decade)));
    std::set<std::size_t> grid;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = steps == 0 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(steps);
        grid.insert(static_cast<std::size_t>(std::llround(std::pow(10.0, t))));
    }
    return {grid.begin(), grid.end()};
}

/// For each budget in the grid, the curve b_kind(N - n0, n0) for every rule
/// (skipped where n0 >= N) plus the stationary reference with beta_1 = beta.
inline std::vector<FigureRow> figure_series(const BudgetQuery &query, const std::vector<BurninRule> &rules,
                                            BoundKind kind, const std::vector<std::size_t> &budgets,
                                            CorrectionScaling scaling = CorrectionScaling::theorem) {
    std::vector<FigureRow> rows;
    const std::string prefix = std::string(to_string(kind)) + "/";
    for (std::size_t budget : budgets) {
        if (budget < 2) {
            continue;
        }
        const BudgetQuery q = query.with_budget(budget);
        for (const BurninRule &rule : rules) {
            std::size_t n0 = 0;
            std::string label;
            switch (rule.type) {
                case BurninRule::Type::fixed:
                    n0 = rule.n0;
                    label = "fixed";
                    break;
                case BurninRule::Type::suggested:
                    n0 = q.beta() > 0.0 ? suggested_burnin(q).n0 : 0;
                    label = "suggested";
                    break;
                case BurninRule::Type::half_budget:
                    n0 = budget / 2;
                    label = "half";
                    break;
                case BurninRule::Type::optimized:
                    n0 = optimize_burnin(q, kind, scaling).n0;
                    label = "optimized";
                    break;
            }
            if (n0 >= budget) {
                continue;
            }
            if (rule.type == BurninRule::Type::fixed) {
                label += "_" + std::to_string(n0);
            }
            rows.push_back({budget, n0, prefix + label, bound_function(q, budget - n0, n0, kind, scaling)});
        }
        rows.push_back({budget, 0, "stationary", stationary_reference(query.beta(), budget)});
    }
    return rows;
}

/// %.17g rendering shared by every CSV writer.
inline std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

inline void write_figure_csv(std::ostream &out, const std::vector<FigureRow> &rows) {
    out << "N,n0,kind,value\n";
    for (const FigureRow &row : rows) {
        out << row.budget << ',' << row.n0 << ',' << row.kind << ',' << format_g17(row.value) << '\n';
    }
}

}  // namespace mcmc_certify
