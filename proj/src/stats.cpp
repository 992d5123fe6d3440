#include "topolens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace topolens {

double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_variance(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double acc = 0.0;
    for (const double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size());
}

double population_std(const std::vector<double>& x) { return std::sqrt(population_variance(x)); }

double sample_std(const std::vector<double>& x) {
    if (x.size() < 2) throw NumericError("sample standard deviation needs n >= 2");
    const double m = mean(x);
    double acc = 0.0;
    for (const double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 0) throw NumericError("quantile of empty set");
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw NumericError("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

WelchResult welch_from_stats(double mean_a, double var_a, std::size_t n_a, double mean_b,
                             double var_b, std::size_t n_b) {
    if (n_a < 2 || n_b < 2) throw NumericError("welch_t needs >= 2 values per sample");
    const double na = static_cast<double>(n_a);
    const double nb = static_cast<double>(n_b);
    if (var_a == 0.0 && var_b == 0.0) {
        if (mean_a == mean_b) return {0.0, na + nb - 2.0, 1.0};
        throw NumericError("welch_t: both samples have zero variance and different means");
    }
    const double sa = var_a / na;
    const double sb = var_b / nb;
    const double t = (mean_a - mean_b) / std::sqrt(sa + sb);
    const double df = (sa + sb) * (sa + sb) /
                      (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    const boost::math::students_t dist(df);
    const double p = 2.0 * boost::math::cdf(dist, -std::abs(t));
    return {t, df, p};
}

WelchResult welch_t(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw NumericError("welch_t needs >= 2 values per sample");
    const double ma = mean(a);
    const double mb = mean(b);
    double va = 0.0, vb = 0.0;
    for (const double v : a) va += (v - ma) * (v - ma);
    for (const double v : b) vb += (v - mb) * (v - mb);
    va /= static_cast<double>(a.size()) - 1.0;
    vb /= static_cast<double>(b.size()) - 1.0;
    return welch_from_stats(ma, va, a.size(), mb, vb, b.size());
}

std::vector<double> bh_fdr(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (const double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw NumericError("bh_fdr: p-value outside [0, 1]");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        const double scaled = p_values[order[r]] * static_cast<double>(m) /
                              static_cast<double>(r + 1);
        running = std::min(running, std::min(scaled, 1.0));
        // m/rank >= 1, so the adjustment can only round below p; clamp it
        adjusted[order[r]] = std::max(running, p_values[order[r]]);
    }
    return adjusted;
}

double auc_rank(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw NumericError("auc: length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_pos += midrank;
                ++n_pos;
            } else {
                ++n_neg;
            }
        }
        i = j;
    }
    if (n_pos == 0 || n_neg == 0) throw NumericError("auc: both classes required");
    const double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

BudgetCheck subsample_budget_check(const std::vector<std::vector<double>>& values,
                                   double delta_star) {
    BudgetCheck out;
    for (const auto& feature : values) {
        if (feature.size() < 2) throw NumericError("budget check needs K >= 2 subsamples");
        double se = 0.0;
        if (population_variance(feature) > 0.0) {
            se = sample_std(feature) / std::sqrt(static_cast<double>(feature.size()));
        }
        out.standard_errors.push_back(se);
        const bool exceeds = se > delta_star / 2.0;
        out.exceeds.push_back(exceeds);
        if (exceeds) out.pass = false;
    }
    return out;
}

} // namespace topolens
