#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topolens/stats.hpp"
#include "topolens/types.hpp"

namespace topolens {

// Per-input activation difference vectors for one layer, with condition
// labels per row.
struct DiffRepresentation {
    std::size_t rows = 0, dim = 0;
    std::vector<double> data; // row-major rows x dim
    std::vector<Condition> labels;
    std::int32_t layer = -1;

    const double* row(std::size_t i) const { return data.data() + i * dim; }
    void validate() const;
};

struct DispersionResult {
    std::vector<double> ratios;       // per row
    std::vector<std::size_t> rank;    // positive eigenvalue count per row (D')
};

// For each row: its k euclidean nearest neighbors (self excluded), PCA over
// the centered neighbor points, then (sum of non-leading eigenvalues) /
// (leading eigenvalue + 1e-12). Rows run in parallel. Throws NumericError
// when M <= k or k < 2.
DispersionResult local_dispersion_ratio(const DiffRepresentation& rows, std::size_t k = 30);

enum class AblationMode { clean_clean, poisoned_poisoned, mixed_mixed };
const char* ablation_mode_name(AblationMode m);

struct GroupComparison {
    double mean_a = 0.0, mean_b = 0.0;
    double se_a = 0.0, se_b = 0.0;
    WelchResult welch;
    std::size_t n_a = 0, n_b = 0;
};

// Dispersion-ratio comparison between the clean and poisoned rows of one
// layer; ratios are computed within each group.
GroupComparison dispersion_comparison(const DiffRepresentation& rows, std::size_t k = 30);

// Null-control split: random balanced halves of the selected label subset
// (clean, poisoned, or the stratified mixed pool), compared like the real
// conditions. Throws NumericError when a half would not exceed k rows.
GroupComparison split_ablation(const DiffRepresentation& rows, AblationMode mode,
                               std::uint64_t seed, std::size_t k = 30);

struct LayerTestResult {
    std::vector<std::int32_t> layers;
    std::vector<GroupComparison> comparisons; // aligned with layers
    std::vector<double> p_adjusted;           // BH-FDR across layers
    std::vector<bool> significant;            // adjusted p < alpha
    double alpha = 0.05;
};

// FDR correction across the per-layer Welch p-values.
LayerTestResult fdr_across_layers(const std::vector<std::int32_t>& layers,
                                  const std::vector<GroupComparison>& comparisons,
                                  double alpha = 0.05);

struct CosineBootstrap {
    std::vector<double> mean_distance_a, mean_distance_b; // one value per iteration
    WelchResult welch;
    std::size_t subsample = 0;
    bool clamped = false; // requested size reduced to the smaller group
};

// Mean pairwise cosine distance of without-replacement subsamples, compared
// across groups with Welch's t-test. No normalization is applied to the
// inputs; cosine distance is scale-invariant. Throws NumericError for
// zero-norm rows (naming the indices).
CosineBootstrap cosine_bootstrap(const DiffRepresentation& rows_a,
                                 const DiffRepresentation& rows_b, std::size_t subsample = 5000,
                                 std::size_t iterations = 3, std::uint64_t seed = 0);

// Exact mean pairwise cosine distance of a row subset.
double mean_pairwise_cosine_distance(const DiffRepresentation& rows,
                                     const std::vector<std::size_t>& subset);

} // namespace topolens
