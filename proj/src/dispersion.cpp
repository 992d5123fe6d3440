#include "topolens/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "topolens/rng.hpp"

namespace topolens {

void DiffRepresentation::validate() const {
    if (rows == 0 || dim == 0) throw NumericError("difference representation is empty");
    if (data.size() != rows * dim) throw NumericError("difference representation size mismatch");
    if (labels.size() != rows) throw NumericError("difference representation label mismatch");
    for (const double v : data) {
        if (!std::isfinite(v)) throw NumericError("non-finite difference representation entry");
    }
}

const char* ablation_mode_name(AblationMode m) {
    switch (m) {
    case AblationMode::clean_clean: return "clean_clean";
    case AblationMode::poisoned_poisoned: return "poisoned_poisoned";
    case AblationMode::mixed_mixed: return "mixed_mixed";
    }
    return "clean_clean";
}

namespace {

constexpr double kEps = 1e-12;

// Dispersion ratios for the rows of one group, neighbors drawn from the same
// group.
DispersionResult group_dispersion(const DiffRepresentation& all,
                                  const std::vector<std::size_t>& group, std::size_t k) {
    const std::size_t m = group.size();
    if (k < 2) throw NumericError("dispersion ratio needs k >= 2");
    if (m <= k) {
        throw NumericError("dispersion ratio needs more than k = " + std::to_string(k) +
                           " rows, got " + std::to_string(m));
    }
    const std::size_t d = all.dim;

    DispersionResult out;
    out.ratios.resize(m);
    out.rank.resize(m);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t qi = 0; qi < static_cast<std::ptrdiff_t>(m); ++qi) {
        const std::size_t q = static_cast<std::size_t>(qi);
        const double* query = all.row(group[q]);

        // k nearest neighbors within the group, ties broken by index
        std::vector<std::pair<double, std::size_t>> dists;
        dists.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == q) continue;
            const double* other = all.row(group[j]);
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = query[c] - other[c];
                acc += diff * diff;
            }
            dists.emplace_back(acc, j);
        }
        std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k),
                          dists.end());

        // PCA of the centered neighbor points via the k x k Gram matrix (the
        // ambient dimension usually exceeds k).
        Eigen::MatrixXd pts(k, d);
        for (std::size_t r = 0; r < k; ++r) {
            const double* rowp = all.row(group[dists[r].second]);
            for (std::size_t c = 0; c < d; ++c) pts(static_cast<Eigen::Index>(r),
                                                    static_cast<Eigen::Index>(c)) = rowp[c];
        }
        pts.rowwise() -= pts.colwise().mean();
        Eigen::MatrixXd gram;
        if (d >= k) gram = pts * pts.transpose();
        else gram = pts.transpose() * pts;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);

        double leading = 0.0, rest = 0.0;
        std::size_t positive = 0;
        for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
            const double lambda = std::max(es.eigenvalues()(e), 0.0);
            if (lambda > 0.0) ++positive;
            if (e + 1 == es.eigenvalues().size()) leading = lambda; // ascending order
            else rest += lambda;
        }
        // the smallest are zero-padded when using the Gram trick; they add 0
        out.ratios[q] = rest / (leading + kEps);
        out.rank[q] = positive;
    }
    return out;
}

std::vector<std::size_t> rows_with(const DiffRepresentation& rows, Condition c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows.rows; ++i) {
        if (rows.labels[i] == c) out.push_back(i);
    }
    return out;
}

GroupComparison compare_groups(const DiffRepresentation& rows,
                               const std::vector<std::size_t>& group_a,
                               const std::vector<std::size_t>& group_b, std::size_t k) {
    const auto disp_a = group_dispersion(rows, group_a, k);
    const auto disp_b = group_dispersion(rows, group_b, k);
    GroupComparison out;
    out.n_a = group_a.size();
    out.n_b = group_b.size();
    out.mean_a = mean(disp_a.ratios);
    out.mean_b = mean(disp_b.ratios);
    out.se_a = sample_std(disp_a.ratios) / std::sqrt(static_cast<double>(group_a.size()));
    out.se_b = sample_std(disp_b.ratios) / std::sqrt(static_cast<double>(group_b.size()));
    out.welch = welch_t(disp_a.ratios, disp_b.ratios);
    return out;
}

} // namespace

DispersionResult local_dispersion_ratio(const DiffRepresentation& rows, std::size_t k) {
    rows.validate();
    std::vector<std::size_t> everyone(rows.rows);
    std::iota(everyone.begin(), everyone.end(), 0);
    return group_dispersion(rows, everyone, k);
}

GroupComparison dispersion_comparison(const DiffRepresentation& rows, std::size_t k) {
    rows.validate();
    return compare_groups(rows, rows_with(rows, Condition::clean),
                          rows_with(rows, Condition::poisoned), k);
}

GroupComparison split_ablation(const DiffRepresentation& rows, AblationMode mode,
                               std::uint64_t seed, std::size_t k) {
    rows.validate();
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(mode) + 5000));

    std::vector<std::size_t> group_a, group_b;
    const auto halve = [&](std::vector<std::size_t> pool) {
        rng.shuffle(pool);
        const std::size_t half = (pool.size() + 1) / 2;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            (i < half ? group_a : group_b).push_back(pool[i]);
        }
    };

    if (mode == AblationMode::clean_clean) {
        halve(rows_with(rows, Condition::clean));
    } else if (mode == AblationMode::poisoned_poisoned) {
        halve(rows_with(rows, Condition::poisoned));
    } else {
        // stratified mixed halves: each side gets half the clean and half the
        // poisoned rows
        halve(rows_with(rows, Condition::clean));
        halve(rows_with(rows, Condition::poisoned));
    }
    return compare_groups(rows, group_a, group_b, k);
}

LayerTestResult fdr_across_layers(const std::vector<std::int32_t>& layers,
                                  const std::vector<GroupComparison>& comparisons,
                                  double alpha) {
    if (layers.size() != comparisons.size()) {
        throw NumericError("fdr_across_layers: layer/comparison mismatch");
    }
    LayerTestResult out;
    out.layers = layers;
    out.comparisons = comparisons;
    out.alpha = alpha;
    std::vector<double> raw;
    for (const auto& c : comparisons) raw.push_back(c.welch.p_value);
    out.p_adjusted = bh_fdr(raw);
    for (const double p : out.p_adjusted) out.significant.push_back(p < alpha);
    return out;
}

double mean_pairwise_cosine_distance(const DiffRepresentation& rows,
                                     const std::vector<std::size_t>& subset) {
    const std::size_t s = subset.size();
    if (s < 2) throw NumericError("mean pairwise distance needs >= 2 rows");
    const std::size_t d = rows.dim;

    // Unit-normalize, then use sum_{i != j} u_i . u_j = |sum u|^2 - s; the
    // result is exactly the mean pairwise cosine distance in O(s d).
    std::vector<double> unit(s * d);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(s); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* src = rows.row(subset[i]);
        double norm = 0.0;
        for (std::size_t c = 0; c < d; ++c) norm += src[c] * src[c];
        norm = std::sqrt(norm);
        for (std::size_t c = 0; c < d; ++c) unit[i * d + c] = src[c] / norm;
    }

    std::vector<double> total(d, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t c = 0; c < d; ++c) total[c] += unit[i * d + c];
    }
    double norm_sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) norm_sq += total[c] * total[c];
    const double pairs = static_cast<double>(s) * static_cast<double>(s - 1);
    const double mean_similarity = (norm_sq - static_cast<double>(s)) / pairs;
    return 1.0 - mean_similarity;
}

CosineBootstrap cosine_bootstrap(const DiffRepresentation& rows_a,
                                 const DiffRepresentation& rows_b, std::size_t subsample,
                                 std::size_t iterations, std::uint64_t seed) {
    rows_a.validate();
    rows_b.validate();
    if (rows_a.dim != rows_b.dim) throw NumericError("cosine bootstrap: dimension mismatch");
    if (iterations < 2) throw NumericError("cosine bootstrap needs >= 2 iterations");

    const auto check_norms = [](const DiffRepresentation& rows, const char* tag) {
        std::string bad;
        for (std::size_t i = 0; i < rows.rows; ++i) {
            double norm = 0.0;
            for (std::size_t c = 0; c < rows.dim; ++c) norm += rows.row(i)[c] * rows.row(i)[c];
            if (norm == 0.0) bad += " " + std::to_string(i);
        }
        if (!bad.empty()) {
            throw NumericError(std::string("cosine bootstrap: zero-norm rows in ") + tag + ":" +
                               bad);
        }
    };
    check_norms(rows_a, "group a");
    check_norms(rows_b, "group b");

    CosineBootstrap out;
    const std::size_t cap = std::min(rows_a.rows, rows_b.rows);
    out.subsample = std::min(subsample, cap);
    out.clamped = out.subsample < subsample;
    if (out.subsample < 2) throw NumericError("cosine bootstrap: groups too small");

    for (std::size_t it = 0; it < iterations; ++it) {
        Rng rng_a(derive_seed(seed, 2 * it));
        Rng rng_b(derive_seed(seed, 2 * it + 1));
        const auto pick_a = rng_a.sample_indices(rows_a.rows, out.subsample);
        const auto pick_b = rng_b.sample_indices(rows_b.rows, out.subsample);
        out.mean_distance_a.push_back(mean_pairwise_cosine_distance(rows_a, pick_a));
        out.mean_distance_b.push_back(mean_pairwise_cosine_distance(rows_b, pick_b));
    }
    out.welch = welch_t(out.mean_distance_a, out.mean_distance_b);
    return out;
}

} // namespace topolens
