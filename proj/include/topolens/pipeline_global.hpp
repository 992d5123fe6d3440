#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "topolens/distance.hpp"
#include "topolens/stats.hpp"
#include "topolens/summary.hpp"
#include "topolens/types.hpp"

namespace topolens {

// Per-layer dataset of barcode summaries: M rows of 41 features plus binary
// condition labels (0 = normal, 1 = adversarial).
struct SummaryTable {
    std::vector<BarcodeSummary> rows;
    std::vector<int> labels;
    std::int32_t layer = -1;

    std::size_t size() const { return rows.size(); }
    // Column-extracted feature matrix, row-major M x indices.size().
    std::vector<double> features(const std::vector<std::size_t>& indices) const;
    std::vector<double> column(std::size_t index) const;
};

struct PruneResult {
    std::vector<std::size_t> kept;       // component indices, priority order
    std::vector<std::string> kept_names;
    std::vector<double> correlation;     // 41 x 41 row-major; 0 where undefined
    std::vector<std::size_t> dropped_constant;
    double threshold = 0.5;
};

// Greedy sweep in priority order: a feature is kept iff its absolute Pearson
// correlation with every already-kept feature is <= threshold. Constant
// features are dropped up front. Default priority is the canonical component
// order, which puts mean_death_0bars first.
PruneResult correlation_prune(const SummaryTable& table, double threshold = 0.5,
                              const std::vector<std::string>& priority = {});

struct PcaResult {
    std::size_t n_features = 0;
    std::size_t n_components = 0;
    std::vector<double> loadings;   // n_features x n_components, row-major
    std::vector<double> scores;     // M x n_components, row-major
    std::vector<double> explained_variance_ratio; // per retained component
    std::vector<double> eigenvalues;               // all, descending
    std::vector<double> feature_means, feature_stds;
};

// PCA of the standardized feature matrix (population statistics). Components
// are ordered by descending eigenvalue and signed so the largest-magnitude
// loading of each component is positive. Throws NumericError on zero-variance
// columns or n_components > p. standardize=false switches to centered
// covariance PCA, whose spectrum is invariant under orthogonal transforms.
PcaResult pca(const std::vector<double>& x, std::size_t m, std::size_t p,
              std::size_t n_components, bool standardize = true);

struct CcaResult {
    std::vector<double> correlations; // descending, in [0, 1]
    std::vector<double> loadings;     // corr(feature_j, first canonical variate)
    bool ridged = false;              // rank deficiency handled with ridge 1e-8
};

// Canonical correlation between a feature block and a score block (row
// aligned). Loadings are reported against the first canonical variate of the
// feature side, signed so the largest-magnitude loading is positive.
CcaResult cca_loadings(const std::vector<double>& x, std::size_t m, std::size_t p,
                       const std::vector<double>& y, std::size_t c);

struct LogisticModel {
    std::vector<double> weights; // standardized feature space
    double intercept = 0.0;
    std::vector<double> feature_means, feature_stds; // training statistics
    double lambda = 1.0;

    // Logit of one raw-space feature row.
    double logit(const double* row) const;
};

struct LogisticOptions {
    double train_fraction = 0.7;
    std::size_t cv_folds = 5;
    // L2 strength on the mean cross-entropy objective; the intercept is not
    // penalized. Duplicating every row therefore leaves the optimum unchanged.
    double lambda = 1.0;
    std::uint64_t seed = 0;
};

struct LogisticReport {
    LogisticModel model;
    std::vector<std::size_t> train_indices, test_indices;
    double test_accuracy = 0.0;
    double test_auc = 0.0;
    std::vector<double> cv_accuracies;
    std::uint64_t seed = 0;
};

// Stratified split + Newton-IRLS fit + stratified k-fold CV on the training
// half. Throws NumericError when a split or fold ends up single-class.
LogisticReport fit_logistic(const SummaryTable& table,
                            const std::vector<std::size_t>& feature_indices,
                            const LogisticOptions& options);

// Fit on every row, no split or CV.
LogisticModel fit_logistic_full(const SummaryTable& table,
                                const std::vector<std::size_t>& feature_indices, double lambda);

struct ShapResult {
    std::vector<double> attributions; // M x p, logit space
    double base_value = 0.0;
    std::vector<double> background;   // raw-space training means
    std::vector<std::size_t> importance_order; // features by mean |attribution|
};

// Exact Shapley attributions of a linear model: w_j * (x_j - background_j)
// per feature in logit space; base value is the logit at the background.
ShapResult linear_shap(const LogisticModel& model, const std::vector<double>& x, std::size_t m,
                       std::size_t p);

struct GlobalPipelineOptions {
    std::size_t subsamples_per_condition = 64; // K
    std::size_t subsample_size = 4096;         // k
    Metric metric = Metric::euclidean;
    double prune_threshold = 0.5;
    std::size_t pca_components = 2;
    LogisticOptions logistic;
    SummaryOptions summary;
    double budget_delta_star = 0.05; // budget check flags SE > delta*/2
    std::uint64_t seed = 0;
};

struct GlobalReport {
    std::int32_t layer = -1;
    SummaryTable table;
    PruneResult prune;
    PcaResult pca;
    CcaResult cca;
    LogisticReport regression;
    ShapResult shap;
    BudgetCheck budget_normal, budget_adversarial;
    GlobalPipelineOptions options;
};

// The layer-wise analysis end to end: K subsamples of k points per condition,
// barcodes, 41-feature summaries, correlation pruning, PCA + CCA, logistic
// regression and Shapley attributions. Subsample barcodes run in parallel;
// every randomized stage derives its seed from options.seed.
GlobalReport run_global_pipeline(const PointCloud& normal, const PointCloud& adversarial,
                                 std::int32_t layer, const GlobalPipelineOptions& options);

// Serializes the report as JSON plus per-figure CSVs (summaries, PCA scores,
// CCA loadings, SHAP matrix) under out_dir with the given file prefix.
void write_global_report(const std::filesystem::path& out_dir, const std::string& prefix,
                         const GlobalReport& report, bool svg);

} // namespace topolens
