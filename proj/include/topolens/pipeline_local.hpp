#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topolens/data_io.hpp"
#include "topolens/types.hpp"

namespace topolens {

enum class EmbeddingVariant { original, normalized, normalized_permuted };
const char* variant_name(EmbeddingVariant v);

// D neuron-level 2D points: point i pairs the activation of neuron i in one
// layer with its activation in another.
struct LayerPairEmbedding {
    PointCloud points; // D x 2
    Condition condition = Condition::unlabeled;
    EmbeddingVariant variant = EmbeddingVariant::original;
    std::int64_t sample_id = -1;
    std::int32_t layer_lo = -1, layer_hi = -1;
};

// Zips two equal-length activation vectors into the 2D embedding, order
// preserved. Throws NumericError on dimension mismatch or D < 2.
LayerPairEmbedding pair_embedding(const std::vector<double>& act_a,
                                  const std::vector<double>& act_b);

// Zero mean, unit population variance. Throws NumericError on a constant
// vector or D < 2.
std::vector<double> normalize_vector(const std::vector<double>& v);

// Re-indexes the second coordinate by an independent uniform permutation,
// leaving the first untouched; deterministic per seed.
LayerPairEmbedding permute_control(const LayerPairEmbedding& embedding, std::uint64_t seed);

// Two-condition activation tensor: data[layer_index][condition][sample] is a
// D-vector. Conditions are fixed as {clean-like, poisoned-like} slots.
struct ActivationStack {
    std::vector<std::int32_t> layers; // ascending ids
    std::size_t dim = 0;
    std::array<Condition, 2> conditions{Condition::clean, Condition::poisoned};
    std::vector<std::array<std::vector<std::vector<double>>, 2>> data;
};

// Reads every manifest layer for the two manifest conditions.
ActivationStack load_activation_stack(const DatasetManifest& manifest);

struct SweepCurve {
    std::vector<double> mean_a;           // condition slot 0 (clean-like)
    std::vector<double> mean_b;           // condition slot 1
    std::vector<double> var_a, var_b;     // per-condition sample variances
    std::vector<double> pooled_variance;  // over both conditions' samples
    std::vector<double> ratio;            // mean_a / mean_b
    std::vector<double> abs_diff;         // |mean_a - mean_b|
};

struct LayerSweep {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs; // shared axis
    std::vector<std::string> statistics;                      // component names
    std::vector<EmbeddingVariant> variants;
    std::size_t n = 0;
    std::array<std::vector<std::size_t>, 2> sample_ids; // reused across pairs
    // curves[variant][statistic]
    std::vector<std::vector<SweepCurve>> curves;
    std::uint64_t seed = 0;

    const SweepCurve& curve(EmbeddingVariant v, const std::string& statistic) const;
};

inline const std::vector<std::string>& default_sweep_statistics() {
    static const std::vector<std::string> stats = {
        "total_persistence_0bars", "total_persistence_1bars", "mean_death_0bars",
        "mean_birth_1bars",        "mean_death_1bars",        "entropy_1bars"};
    return stats;
}

// For every layer pair (l, l+interval) computes per-sample barcodes of the
// three embedding variants and aggregates the requested barcode statistics:
// per-condition means, pooled variance over both conditions, the clean/
// poisoned mean ratio and the absolute mean difference. Per-sample barcodes
// run in parallel; aggregation is a deterministic reduction by index.
LayerSweep layer_sweep(const ActivationStack& stack, std::size_t interval, std::size_t n,
                       const std::vector<std::string>& statistics, std::uint64_t seed);

void write_sweep_csv(const std::filesystem::path& path, const LayerSweep& sweep);
void write_sweep_json(const std::filesystem::path& path, const LayerSweep& sweep);
void write_sweep_svg(const std::filesystem::path& dir, const std::string& prefix,
                     const LayerSweep& sweep);

struct PeakAnalysis {
    double p_at_k = 0.0;
    double p_value = 1.0;
    std::size_t observed_overlap = 0;
    std::vector<std::size_t> top_variance, top_diff;
    std::size_t peaks_variance = 0, peaks_diff = 0;
    bool exact = false; // full enumeration (axis <= 12) vs Monte Carlo
};

// Strict local maxima (endpoints judged against their single neighbor);
// returns indices.
std::vector<std::size_t> detect_peaks(const std::vector<double>& curve);

// Exact null tail: fraction of all k-subsets S of [0, axis) with
// |S ∩ top| >= observed, by full enumeration.
double overlap_p_value_enumeration(std::size_t axis, std::size_t k,
                                   const std::vector<std::size_t>& top, std::size_t observed);

// Monte-Carlo estimate of the same tail with add-one smoothing.
double overlap_p_value_monte_carlo(std::size_t axis, std::size_t k,
                                   const std::vector<std::size_t>& top, std::size_t observed,
                                   std::size_t n_permutations, std::uint64_t seed);

// p@k of the top-k peaks of the two curves plus a permutation p-value
// (enumeration when the axis has <= 12 positions, Monte Carlo otherwise).
// Throws NumericError when either curve has fewer than k peaks.
PeakAnalysis peak_precision_at_k(const std::vector<double>& variance_curve,
                                 const std::vector<double>& diff_curve, std::size_t k,
                                 std::size_t n_permutations, std::uint64_t seed);

} // namespace topolens
