#include "mcmc_certify/burnin.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace mcmc_certify;

namespace {

struct TableRow {
    std::size_t budget;
    double beta;
    std::size_t n_opt;
    std::size_t suggested;
};

// C = 1e30.
const std::vector<TableRow> kTable{{10000, 0.9, 656, 656},     {100000, 0.9, 656, 656},
                                   {10000, 0.99, 6867, 6873},  {100000, 0.99, 6873, 6873},
                                   {10000, 0.999, 8001, 69043}, {100000, 0.999, 68977, 69043}};

BudgetQuery table_query(const TableRow &row) { return {row.budget, row.beta, 1e30}; }

}  // namespace

TEST(Table, OptimizedBurnIn) {
    for (const auto &row : kTable) {
        for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
            const auto plan = optimize_burnin(table_query(row), kind);
            EXPECT_EQ(plan.n0, row.n_opt) << row.budget << " " << row.beta << " " << to_string(kind);
            EXPECT_EQ(plan.n + plan.n0, row.budget);
        }
    }
}

TEST(Table, SuggestedWithinOne) {
    for (const auto &row : kTable) {
        const auto s = suggested_burnin(table_query(row));
        EXPECT_LE(std::max(s.n0, row.suggested) - std::min(s.n0, row.suggested), 1U) << row.beta;
    }
    EXPECT_EQ(suggested_burnin(0.9, std::log(1e30)).n0, 656U);
    EXPECT_EQ(suggested_burnin(0.99, std::log(1e30)).n0, 6874U);
    EXPECT_NEAR(static_cast<double>(suggested_burnin(0.99, std::log(1e30)).ratio), 6873.1586, 1e-3);
}

TEST(Suggested, SmallConstantGivesZero) {
    for (double beta : {0.1, 0.5, 0.99}) {
        for (double c : {0.5, 1.0}) {
            EXPECT_EQ(suggested_burnin(beta, std::log(c)).n0, 0U);
        }
    }
}

TEST(Suggested, DampsConstantBelowOne) {
    for (double beta : {0.3, 0.9, 0.99, 0.999}) {
        for (double c : {10.0, 1e6, 1e30}) {
            const auto s = suggested_burnin(beta, std::log(c));
            EXPECT_LE(std::log(c) + static_cast<double>(s.n0) * std::log(beta), 1e-9);
            EXPECT_GT(std::log(c) + static_cast<double>(s.n0 - 1) * std::log(beta), -1e-9);
        }
    }
}

TEST(Suggested, BorderlineFlag) {
    // beta = 0.5, C = 2^10: the ratio is exactly 10.
    const auto s = suggested_burnin(0.5, 10.0 * std::log(2.0));
    EXPECT_TRUE(s.borderline);
    EXPECT_EQ(s.n0, 10U);
    EXPECT_FALSE(suggested_burnin(0.9, std::log(1e30)).borderline);
}

TEST(Optimize, SmallConstantMatchesExhaustiveScan) {
    const BudgetQuery q(100, 0.9, 0.5);
    for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
        std::size_t best = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (std::size_t n0 = 0; n0 < 100; ++n0) {
            const double v = bound_function(q, 100 - n0, n0, kind);
            if (v < best_value) {
                best_value = v;
                best = n0;
            }
        }
        const auto plan = optimize_burnin(q, kind);
        EXPECT_EQ(plan.n0, best);
        EXPECT_EQ(plan.n0, 0U);
        EXPECT_EQ(plan.bound_value, best_value);
    }
}

TEST(Optimize, EarlyExitMatchesFullScan) {
    for (const auto &row : kTable) {
        if (row.budget > 10000) {
            continue;
        }
        const auto q = table_query(row);
        std::size_t best = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (std::size_t n0 = 0; n0 < row.budget; ++n0) {
            const double v = bound_function(q, row.budget - n0, n0, BoundKind::b4);
            if (v < best_value) {
                best_value = v;
                best = n0;
            }
        }
        EXPECT_EQ(optimize_burnin(q, BoundKind::b4).n0, best);
    }
}

TEST(Optimize, BeatsSuggestedAndNeighbours) {
    for (const auto &row : kTable) {
        const auto q = table_query(row);
        for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
            const auto opt = optimize_burnin(q, kind);
            const auto sug = suggested_plan(q, kind);
            EXPECT_LE(opt.bound_value, sug.bound_value);
            EXPECT_LE(opt.bound_value, half_budget_plan(q, kind).bound_value);
            for (long offset : {-100L, -10L, -1L, 1L, 10L, 100L}) {
                const long n0 = static_cast<long>(sug.n0) + offset;
                if (n0 < 0 || n0 >= static_cast<long>(row.budget)) {
                    continue;
                }
                const auto m = static_cast<std::size_t>(n0);
                EXPECT_LE(opt.bound_value, bound_function(q, row.budget - m, m, kind));
            }
        }
    }
}

TEST(Optimize, CloseToSuggestedWhenBudgetIsAmple) {
    for (const auto &row : kTable) {
        const auto q = table_query(row);
        const auto s = suggested_burnin(q);
        if (row.budget < 10 * s.n0) {
            continue;
        }
        for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
            const auto opt = optimize_burnin(q, kind);
            const double gap = std::abs(static_cast<double>(opt.n0) - static_cast<double>(s.n0));
            EXPECT_LE(gap / static_cast<double>(row.budget), 0.01);
        }
    }
}

TEST(BoundFunction, StrictlyMonotone) {
    const BudgetQuery q(1000, 0.95, 1e6);
    for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
        for (std::size_t n = 1; n < 300; n += 7) {
            for (std::size_t n0 = 0; n0 < 300; n0 += 11) {
                EXPECT_GT(bound_function(q, n, n0, kind), bound_function(q, n, n0 + 1, kind));
                EXPECT_GT(bound_function(q, n, n0, kind), bound_function(q, n + 1, n0, kind));
            }
        }
    }
}

TEST(BoundFunction, LimitsAndScaling) {
    const BudgetQuery q(1000, 0.9, 1e30);
    const double stationary = std::sqrt(2.0 / (50.0 * 0.1));
    EXPECT_NEAR(bound_function(q, 50, 100000, BoundKind::binf), stationary, 1e-12);
    EXPECT_NEAR(bound_function(q, 50, 100000, BoundKind::b4), stationary, 1e-12);
    const BudgetQuery tiny(1000, 0.9, BudgetQuery::LogC{-1000.0});
    EXPECT_NEAR(bound_function(tiny, 50, 0, BoundKind::binf), stationary, 1e-12);
    for (std::size_t n : {1U, 5U, 100U}) {
        EXPECT_DOUBLE_EQ(bound_function(q, n, 10, BoundKind::b4, CorrectionScaling::printed) >=
                             bound_function(q, n, 10, BoundKind::b4, CorrectionScaling::theorem),
                         true);
    }
    EXPECT_EQ(bound_function(q, 1, 10, BoundKind::b4, CorrectionScaling::printed),
              bound_function(q, 1, 10, BoundKind::b4, CorrectionScaling::theorem));
    // b_inf, theorem scaling, by hand: 2/(n(1-b)) + 2 C b^n0 / (n^2 (1-b)^2).
    const BudgetQuery small(100, 0.5, 4.0);
    EXPECT_NEAR(bound_function(small, 2, 1, BoundKind::binf), std::sqrt(2.0 + 2.0 * 4.0 * 0.5 / (4.0 * 0.25)), 1e-14);
    EXPECT_NEAR(bound_function(small, 2, 1, BoundKind::b4),
                std::sqrt(2.0 + 4.0 * 0.5 / (4.0 * 0.5 * (1.0 - std::sqrt(0.5)))), 1e-14);
}

TEST(BudgetQuery, Validation) {
    EXPECT_THROW(BudgetQuery(1, 0.5, 10.0), CertifyError);
    EXPECT_THROW(BudgetQuery(10, 1.0, 10.0), CertifyError);
    EXPECT_THROW(BudgetQuery(10, -0.1, 10.0), CertifyError);
    EXPECT_THROW(BudgetQuery(10, 0.5, -1.0), CertifyError);
}

TEST(HalfBudget, SplitAndPenalty) {
    const auto plan = half_budget_plan(BudgetQuery(10000, 0.9, 1e30), BoundKind::b4);
    EXPECT_EQ(plan.n0, 5000U);
    EXPECT_EQ(plan.n, 5000U);
    for (BoundKind kind : {BoundKind::b4, BoundKind::binf}) {
        for (double beta : {0.9, 0.99, 0.999}) {
            const double ratio = half_budget_penalty_ratio(BudgetQuery(100000000, beta, 1e30), kind);
            EXPECT_NEAR(ratio, kHalfBudgetPenalty, 0.01 * kHalfBudgetPenalty) << beta;
        }
    }
}

TEST(SuggestedPlan, ClampsToBudget) {
    const auto plan = suggested_plan(BudgetQuery(10000, 0.999, 1e30), BoundKind::b4);
    EXPECT_TRUE(plan.clamped);
    EXPECT_EQ(plan.n0, 9999U);
    EXPECT_EQ(plan.n, 1U);
}

TEST(StationaryReference, Values) {
    for (double b : {-0.5, 0.0, 0.5, 0.99}) {
        EXPECT_NEAR(stationary_reference(b, 1), 1.0, 1e-12);
    }
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < 5000; n += 13) {
        const double v = stationary_reference(0.99, n);
        EXPECT_LT(v, previous);
        previous = v;
    }
}

TEST(Figures, BudgetGrid) {
    const auto grid = log_spaced_budgets(100, 100000, 4);
    EXPECT_EQ(grid.front(), 100U);
    EXPECT_EQ(grid.back(), 100000U);
    EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
    EXPECT_EQ(grid.size(), 13U);
}

TEST(Figures, CurveProperties) {
    const BudgetQuery q(2, 0.99, 1e30);
    const auto budgets = log_spaced_budgets(1000, 100000000, 10);
    const std::vector<BurninRule> rules{BurninRule::fixed(6000),  BurninRule::fixed(6500), BurninRule::suggested(),
                                        BurninRule::fixed(8000), BurninRule::fixed(10000), BurninRule::optimized()};
    const auto rows = figure_series(q, rules, BoundKind::b4, budgets);
    std::map<std::string, std::vector<FigureRow>> curves;
    for (const auto &row : rows) {
        EXPECT_GT(row.value, 0.0);
        EXPECT_LT(row.n0, row.budget);
        curves[row.kind].push_back(row);
    }
    ASSERT_EQ(curves.size(), 7U);
    for (const auto &[kind, curve] : curves) {
        for (std::size_t i = 1; i < curve.size(); ++i) {
            EXPECT_LT(curve[i].value, curve[i - 1].value) << kind << " N=" << curve[i].budget;
        }
    }
    std::map<std::size_t, double> optimized;
    for (const auto &row : curves["b4/optimized"]) {
        optimized[row.budget] = row.value;
    }
    for (const auto &kind : {"b4/fixed_6000", "b4/fixed_6500"}) {
        for (const auto &row : curves[kind]) {
            EXPECT_GE(row.value, optimized.at(row.budget)) << kind;
        }
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto &[kind, curve] : curves) {
        ASSERT_EQ(curve.back().budget, budgets.back()) << kind;
        lo = std::min(lo, curve.back().value);
        hi = std::max(hi, curve.back().value);
    }
    EXPECT_LE(hi / lo, 1.05);
}

TEST(Figures, CsvFormat) {
    std::ostringstream out;
    write_figure_csv(out, {{10, 2, "b4/half", 0.1}});
    EXPECT_EQ(out.str(), "N,n0,kind,value\n10,2,b4/half,0.10000000000000001\n");
}
