#pragma once

#include <cstddef>
#include <vector>

#include "topolens/types.hpp"

namespace topolens {

double mean(const std::vector<double>& x);

// Population convention (divide by n); singleton sets give 0.
double population_std(const std::vector<double>& x);
double population_variance(const std::vector<double>& x);

// ddof = 1; requires n >= 2.
double sample_std(const std::vector<double>& x);

// Linear interpolation between closest order statistics, endpoints inclusive
// (h = (n - 1) q). Input must be sorted ascending and nonempty.
double quantile_sorted(const std::vector<double>& sorted, double q);

// Pearson correlation; returns 0 when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct WelchResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom and a
// two-sided p from the t distribution. Each sample needs >= 2 values and at
// least one positive variance.
WelchResult welch_t(const std::vector<double>& a, const std::vector<double>& b);

// Same test from sufficient statistics (sample variances, ddof = 1).
WelchResult welch_from_stats(double mean_a, double var_a, std::size_t n_a, double mean_b,
                             double var_b, std::size_t n_b);

// Benjamini-Hochberg step-up adjustment with monotonicity enforcement.
// Throws NumericError for p outside [0, 1].
std::vector<double> bh_fdr(const std::vector<double>& p_values);

// AUC-ROC by the rank statistic (Mann-Whitney with midranks for ties).
// labels are 0/1; both classes must be present.
double auc_rank(const std::vector<double>& scores, const std::vector<int>& labels);

struct BudgetCheck {
    std::vector<double> standard_errors;
    std::vector<bool> exceeds; // SE > delta_star / 2
    bool pass = true;
};

// Monte-Carlo subsample budget: SE = sample std / sqrt(K) per feature, checked
// against delta_star / 2. values[f] holds the K per-subsample values of
// feature f. Throws NumericError when K < 2.
BudgetCheck subsample_budget_check(const std::vector<std::vector<double>>& values,
                                   double delta_star);

} // namespace topolens
