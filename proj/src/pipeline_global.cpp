#include "topolens/pipeline_global.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>
#include <json.hpp>

#include "topolens/data_io.hpp"
#include "topolens/rips.hpp"
#include "topolens/rng.hpp"
#include "topolens/svg.hpp"

namespace topolens {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> map_matrix(const std::vector<double>& x, std::size_t m,
                                      std::size_t p) {
    if (x.size() != m * p) throw NumericError("matrix size mismatch");
    return Eigen::Map<const RowMajor>(x.data(), static_cast<Eigen::Index>(m),
                                      static_cast<Eigen::Index>(p));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

std::vector<double> SummaryTable::features(const std::vector<std::size_t>& indices) const {
    std::vector<double> out(rows.size() * indices.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < indices.size(); ++j) {
            out[i * indices.size() + j] = rows[i].values[indices[j]];
        }
    }
    return out;
}

std::vector<double> SummaryTable::column(std::size_t index) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].values[index];
    return out;
}

PruneResult correlation_prune(const SummaryTable& table, double threshold,
                              const std::vector<std::string>& priority) {
    if (table.size() < 2) throw NumericError("correlation pruning needs at least 2 rows");
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw NumericError("prune threshold must be in (0, 1]");
    }

    std::vector<std::size_t> order;
    if (priority.empty()) {
        order.resize(kSummarySize);
        std::iota(order.begin(), order.end(), 0);
    } else {
        if (priority.size() != kSummarySize) {
            throw NumericError("priority must cover all " + std::to_string(kSummarySize) +
                               " feature names");
        }
        std::vector<bool> seen(kSummarySize, false);
        for (const auto& name : priority) {
            const std::size_t idx = summary_component_index(name);
            if (seen[idx]) throw NumericError("priority repeats feature " + name);
            seen[idx] = true;
            order.push_back(idx);
        }
    }

    std::vector<std::vector<double>> columns(kSummarySize);
    std::vector<bool> constant(kSummarySize, false);
    for (std::size_t f = 0; f < kSummarySize; ++f) {
        columns[f] = table.column(f);
        constant[f] = population_variance(columns[f]) == 0.0;
    }

    PruneResult result;
    result.threshold = threshold;
    result.correlation.assign(kSummarySize * kSummarySize, 0.0);
    for (std::size_t a = 0; a < kSummarySize; ++a) {
        result.correlation[a * kSummarySize + a] = constant[a] ? 0.0 : 1.0;
        for (std::size_t b = a + 1; b < kSummarySize; ++b) {
            const double r = pearson(columns[a], columns[b]);
            result.correlation[a * kSummarySize + b] = r;
            result.correlation[b * kSummarySize + a] = r;
        }
    }

    for (std::size_t f = 0; f < kSummarySize; ++f) {
        if (constant[f]) result.dropped_constant.push_back(f);
    }

    for (const std::size_t f : order) {
        if (constant[f]) continue;
        bool ok = true;
        for (const std::size_t g : result.kept) {
            if (std::abs(result.correlation[f * kSummarySize + g]) > threshold) {
                ok = false;
                break;
            }
        }
        if (ok) {
            result.kept.push_back(f);
            result.kept_names.push_back(summary_component_names()[f]);
        }
    }
    return result;
}

PcaResult pca(const std::vector<double>& x, std::size_t m, std::size_t p,
              std::size_t n_components, bool standardize) {
    if (n_components == 0 || n_components > p) {
        throw NumericError("pca: n_components must be in [1, p]");
    }
    if (m < 2) throw NumericError("pca needs at least 2 rows");
    const auto X = map_matrix(x, m, p);

    PcaResult out;
    out.n_features = p;
    out.n_components = n_components;
    out.feature_means.resize(p);
    out.feature_stds.resize(p);

    RowMajor Z(m, p);
    for (std::size_t j = 0; j < p; ++j) {
        const double mu = X.col(static_cast<Eigen::Index>(j)).mean();
        const double var =
            (X.col(static_cast<Eigen::Index>(j)).array() - mu).square().sum() /
            static_cast<double>(m);
        if (standardize && var == 0.0) {
            throw NumericError("pca: zero-variance input column " + std::to_string(j));
        }
        const double sd = standardize ? std::sqrt(var) : 1.0;
        out.feature_means[j] = mu;
        out.feature_stds[j] = sd;
        Z.col(static_cast<Eigen::Index>(j)) =
            (X.col(static_cast<Eigen::Index>(j)).array() - mu) / sd;
    }

    const Eigen::MatrixXd cov = Z.transpose() * Z / static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");

    const double total = solver.eigenvalues().sum();
    out.eigenvalues.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        out.eigenvalues[j] = solver.eigenvalues()(static_cast<Eigen::Index>(p - 1 - j));
    }

    Eigen::MatrixXd V(p, n_components);
    for (std::size_t c = 0; c < n_components; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(p - 1 - c));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        V.col(static_cast<Eigen::Index>(c)) = v;
        out.explained_variance_ratio.push_back(total > 0.0 ? out.eigenvalues[c] / total : 0.0);
    }

    const RowMajor scores = Z * V;
    // Eigen matrices are column-major; store loadings row-major.
    out.loadings.resize(p * n_components);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t c = 0; c < n_components; ++c) {
            out.loadings[j * n_components + c] =
                V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
        }
    }
    out.scores.assign(scores.data(), scores.data() + scores.size());
    return out;
}

CcaResult cca_loadings(const std::vector<double>& x, std::size_t m, std::size_t p,
                       const std::vector<double>& y, std::size_t c) {
    if (m < 3) throw NumericError("cca needs at least 3 rows");
    const auto X = map_matrix(x, m, p);
    const auto Y = map_matrix(y, m, c);

    Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd Yc = Y.rowwise() - Y.colwise().mean();
    const double denom = static_cast<double>(m - 1);
    Eigen::MatrixXd Sxx = Xc.transpose() * Xc / denom;
    Eigen::MatrixXd Syy = Yc.transpose() * Yc / denom;
    const Eigen::MatrixXd Sxy = Xc.transpose() * Yc / denom;

    CcaResult out;
    const auto inv_sqrt = [&out](Eigen::MatrixXd& S) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        const double top = es.eigenvalues().maxCoeff();
        Eigen::VectorXd ev = es.eigenvalues();
        if (top <= 0.0 || ev.minCoeff() < 1e-12 * top) {
            // rank deficient: regularized solve, documented ridge
            S += 1e-8 * Eigen::MatrixXd::Identity(S.rows(), S.cols());
            es.compute(S);
            ev = es.eigenvalues();
            out.ridged = true;
        }
        Eigen::VectorXd inv = ev.array().max(1e-300).rsqrt();
        return Eigen::MatrixXd(es.eigenvectors() * inv.asDiagonal() *
                               es.eigenvectors().transpose());
    };

    const Eigen::MatrixXd Wx = inv_sqrt(Sxx);
    const Eigen::MatrixXd Wy = inv_sqrt(Syy);
    const Eigen::MatrixXd M = Wx * Sxy * Wy;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);

    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        out.correlations.push_back(std::clamp(svd.singularValues()(i), 0.0, 1.0));
    }

    Eigen::VectorXd a = Wx * svd.matrixU().col(0);
    Eigen::VectorXd variate = Xc * a;
    out.loadings.resize(p);
    std::vector<double> u(variate.data(), variate.data() + m);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> xj(m);
        for (std::size_t i = 0; i < m; ++i) xj[i] = Xc(static_cast<Eigen::Index>(i),
                                                       static_cast<Eigen::Index>(j));
        out.loadings[j] = pearson(xj, u);
    }
    std::size_t arg = 0;
    for (std::size_t j = 1; j < p; ++j) {
        if (std::abs(out.loadings[j]) > std::abs(out.loadings[arg])) arg = j;
    }
    if (p > 0 && out.loadings[arg] < 0.0) {
        for (double& l : out.loadings) l = -l;
    }
    return out;
}

double LogisticModel::logit(const double* row) const {
    double z = intercept;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        z += weights[j] * (row[j] - feature_means[j]) / feature_stds[j];
    }
    return z;
}

namespace {

// Newton-IRLS on mean cross-entropy + (lambda/2)|w|^2, intercept unpenalized.
// X is standardized, row-major m x p.
void newton_fit(const std::vector<double>& X, const std::vector<int>& y, std::size_t m,
                std::size_t p, double lambda, std::vector<double>& w, double& b) {
    w.assign(p, 0.0);
    b = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p + 1),
                                                     static_cast<Eigen::Index>(p + 1));
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = X.data() + i * p;
            double z = theta(static_cast<Eigen::Index>(p));
            for (std::size_t j = 0; j < p; ++j) z += theta(static_cast<Eigen::Index>(j)) * row[j];
            const double prob = sigmoid(z);
            const double r = (prob - static_cast<double>(y[i])) * inv_m;
            const double wgt = std::max(prob * (1.0 - prob), 1e-12) * inv_m;
            for (std::size_t j = 0; j < p; ++j) {
                grad(static_cast<Eigen::Index>(j)) += r * row[j];
                for (std::size_t k = j; k < p; ++k) {
                    hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
                        wgt * row[j] * row[k];
                }
                hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)) += wgt * row[j];
            }
            grad(static_cast<Eigen::Index>(p)) += r;
            hess(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) += wgt;
        }
        for (std::size_t j = 0; j < p; ++j) {
            grad(static_cast<Eigen::Index>(j)) += lambda * theta(static_cast<Eigen::Index>(j));
            hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += lambda;
        }
        hess = hess.selfadjointView<Eigen::Upper>();
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        theta -= step;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-10 || step.lpNorm<Eigen::Infinity>() < 1e-12) {
            break;
        }
    }
    for (std::size_t j = 0; j < p; ++j) w[j] = theta(static_cast<Eigen::Index>(j));
    b = theta(static_cast<Eigen::Index>(p));
}

struct Standardization {
    std::vector<double> means, stds;
};

Standardization standardize_train(std::vector<double>& X, std::size_t m, std::size_t p) {
    Standardization s;
    s.means.resize(p);
    s.stds.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) mu += X[i * p + j];
        mu /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = X[i * p + j] - mu;
            var += d * d;
        }
        var /= static_cast<double>(m);
        if (var == 0.0) {
            throw NumericError("logistic: zero-variance feature column " + std::to_string(j) +
                               " in training split");
        }
        s.means[j] = mu;
        s.stds[j] = std::sqrt(var);
        for (std::size_t i = 0; i < m; ++i) X[i * p + j] = (X[i * p + j] - mu) / s.stds[j];
    }
    return s;
}

} // namespace

LogisticReport fit_logistic(const SummaryTable& table,
                            const std::vector<std::size_t>& feature_indices,
                            const LogisticOptions& options) {
    const std::size_t m = table.size();
    const std::size_t p = feature_indices.size();
    if (m < 4) throw NumericError("logistic regression needs at least 4 rows");
    if (p == 0) throw NumericError("logistic regression needs at least one feature");
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw NumericError("train fraction must be in (0, 1)");
    }

    std::vector<std::size_t> class0, class1;
    for (std::size_t i = 0; i < m; ++i) (table.labels[i] == 1 ? class1 : class0).push_back(i);
    if (class0.empty() || class1.empty()) {
        throw NumericError("stratification error: both classes required");
    }

    Rng rng(derive_seed(options.seed, 101));
    rng.shuffle(class0);
    rng.shuffle(class1);

    LogisticReport report;
    report.seed = options.seed;
    const auto take = [&](const std::vector<std::size_t>& cls) {
        const std::size_t n_train =
            static_cast<std::size_t>(std::llround(options.train_fraction *
                                                  static_cast<double>(cls.size())));
        if (n_train == 0 || n_train == cls.size()) {
            throw NumericError("stratification error: class with " +
                               std::to_string(cls.size()) +
                               " rows cannot fill both splits");
        }
        for (std::size_t i = 0; i < cls.size(); ++i) {
            (i < n_train ? report.train_indices : report.test_indices).push_back(cls[i]);
        }
    };
    take(class0);
    take(class1);
    std::sort(report.train_indices.begin(), report.train_indices.end());
    std::sort(report.test_indices.begin(), report.test_indices.end());

    const std::vector<double> all = table.features(feature_indices);
    const auto gather = [&](const std::vector<std::size_t>& idx, std::vector<double>& X,
                            std::vector<int>& y) {
        X.resize(idx.size() * p);
        y.resize(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            std::copy_n(all.data() + idx[r] * p, p, X.data() + r * p);
            y[r] = table.labels[idx[r]];
        }
    };

    std::vector<double> x_train;
    std::vector<int> y_train;
    gather(report.train_indices, x_train, y_train);
    std::vector<double> x_train_raw = x_train;
    const Standardization st = standardize_train(x_train, report.train_indices.size(), p);

    report.model.lambda = options.lambda;
    report.model.feature_means = st.means;
    report.model.feature_stds = st.stds;
    newton_fit(x_train, y_train, report.train_indices.size(), p, options.lambda,
               report.model.weights, report.model.intercept);

    // held-out metrics
    std::vector<double> scores;
    std::vector<int> truth;
    std::size_t correct = 0;
    for (const std::size_t i : report.test_indices) {
        const double z = report.model.logit(all.data() + i * p);
        scores.push_back(z);
        truth.push_back(table.labels[i]);
        if ((z > 0.0 ? 1 : 0) == table.labels[i]) ++correct;
    }
    report.test_accuracy = static_cast<double>(correct) / static_cast<double>(scores.size());
    report.test_auc = auc_rank(scores, truth);

    // stratified k-fold CV over the training half
    const std::size_t folds = options.cv_folds;
    if (folds >= 2) {
        std::vector<std::size_t> fold_of(report.train_indices.size());
        Rng cv_rng(derive_seed(options.seed, 211));
        std::vector<std::size_t> pos, neg;
        for (std::size_t r = 0; r < report.train_indices.size(); ++r) {
            (y_train[r] == 1 ? pos : neg).push_back(r);
        }
        cv_rng.shuffle(pos);
        cv_rng.shuffle(neg);
        for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
        for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;

        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<double> xf;
            std::vector<int> yf;
            std::vector<std::size_t> held;
            for (std::size_t r = 0; r < report.train_indices.size(); ++r) {
                if (fold_of[r] == f) {
                    held.push_back(r);
                    continue;
                }
                xf.insert(xf.end(), x_train_raw.begin() + static_cast<std::ptrdiff_t>(r * p),
                          x_train_raw.begin() + static_cast<std::ptrdiff_t>((r + 1) * p));
                yf.push_back(y_train[r]);
            }
            if (held.empty()) throw NumericError("stratification error: empty CV fold");
            if (std::count(yf.begin(), yf.end(), 1) == 0 ||
                std::count(yf.begin(), yf.end(), 0) == 0) {
                throw NumericError("stratification error: single-class CV fold");
            }
            std::vector<double> xf_std = xf;
            const Standardization stf = standardize_train(xf_std, yf.size(), p);
            LogisticModel fold_model;
            fold_model.lambda = options.lambda;
            fold_model.feature_means = stf.means;
            fold_model.feature_stds = stf.stds;
            newton_fit(xf_std, yf, yf.size(), p, options.lambda, fold_model.weights,
                       fold_model.intercept);
            std::size_t ok = 0;
            for (const std::size_t r : held) {
                const double z = fold_model.logit(x_train_raw.data() + r * p);
                if ((z > 0.0 ? 1 : 0) == y_train[r]) ++ok;
            }
            report.cv_accuracies.push_back(static_cast<double>(ok) /
                                           static_cast<double>(held.size()));
        }
    }
    return report;
}

LogisticModel fit_logistic_full(const SummaryTable& table,
                                const std::vector<std::size_t>& feature_indices, double lambda) {
    const std::size_t m = table.size();
    const std::size_t p = feature_indices.size();
    if (m < 2 || p == 0) throw NumericError("logistic fit needs rows and features");
    std::vector<double> X = table.features(feature_indices);
    const Standardization st = standardize_train(X, m, p);
    LogisticModel model;
    model.lambda = lambda;
    model.feature_means = st.means;
    model.feature_stds = st.stds;
    newton_fit(X, table.labels, m, p, lambda, model.weights, model.intercept);
    return model;
}

ShapResult linear_shap(const LogisticModel& model, const std::vector<double>& x, std::size_t m,
                       std::size_t p) {
    if (p != model.weights.size()) throw NumericError("shap: feature count mismatch");
    ShapResult out;
    out.background = model.feature_means;
    out.base_value = model.intercept; // logit at the background means
    out.attributions.resize(m * p);
    std::vector<double> importance(p, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double a = model.weights[j] * (x[i * p + j] - model.feature_means[j]) /
                             model.feature_stds[j];
            out.attributions[i * p + j] = a;
            importance[j] += std::abs(a);
        }
    }
    out.importance_order.resize(p);
    std::iota(out.importance_order.begin(), out.importance_order.end(), 0);
    std::stable_sort(out.importance_order.begin(), out.importance_order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
    return out;
}

GlobalReport run_global_pipeline(const PointCloud& normal, const PointCloud& adversarial,
                                 std::int32_t layer, const GlobalPipelineOptions& options) {
    const std::size_t K = options.subsamples_per_condition;
    if (K < 2) throw NumericError("global pipeline needs K >= 2 subsamples per condition");

    GlobalReport report;
    report.layer = layer;
    report.options = options;
    report.table.layer = layer;
    report.table.rows.resize(2 * K);
    report.table.labels.resize(2 * K);

    // One barcode per subsample; independent jobs, deterministic aggregation
    // by index.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(2 * K); ++job) {
        const std::size_t idx = static_cast<std::size_t>(job);
        const bool adversarial_side = idx >= K;
        const PointCloud& source = adversarial_side ? adversarial : normal;
        const PointCloud sample = subsample(source, options.subsample_size,
                                            derive_seed(options.seed, 1000000 + idx));
        const auto dist = distance_matrix(sample, options.metric);
        const auto barcode = rips_persistence(dist, 1);
        BarcodeSummary summary = summarize(barcode, options.summary);
        summary.sample_id = static_cast<std::int64_t>(adversarial_side ? idx - K : idx);
        summary.layer = layer;
        summary.condition = adversarial_side ? Condition::poisoned : Condition::clean;
        report.table.rows[idx] = summary;
        report.table.labels[idx] = adversarial_side ? 1 : 0;
    }

    const auto per_feature = [&](std::size_t offset) {
        std::vector<std::vector<double>> values(kSummarySize);
        for (std::size_t f = 0; f < kSummarySize; ++f) {
            for (std::size_t i = 0; i < K; ++i) {
                values[f].push_back(report.table.rows[offset + i].values[f]);
            }
        }
        return values;
    };
    report.budget_normal = subsample_budget_check(per_feature(0), options.budget_delta_star);
    report.budget_adversarial = subsample_budget_check(per_feature(K), options.budget_delta_star);

    report.prune = correlation_prune(report.table, options.prune_threshold);
    if (report.prune.kept.empty()) throw NumericError("pruning removed every feature");

    const std::vector<double> X = report.table.features(report.prune.kept);
    const std::size_t p = report.prune.kept.size();
    const std::size_t n_comp = std::min(options.pca_components, p);
    report.pca = pca(X, report.table.size(), p, n_comp);
    report.cca = cca_loadings(X, report.table.size(), p, report.pca.scores, n_comp);

    LogisticOptions logit_options = options.logistic;
    logit_options.seed = derive_seed(options.seed, 401);
    report.regression = fit_logistic(report.table, report.prune.kept, logit_options);
    report.shap = linear_shap(report.regression.model, X, report.table.size(), p);
    return report;
}

void write_global_report(const std::filesystem::path& out_dir, const std::string& prefix,
                         const GlobalReport& report, bool svg) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    write_summary_csv(out_dir / (prefix + "_summaries.csv"), report.table.rows);

    // PCA scores per row with condition labels (scatter input)
    {
        std::ofstream out(out_dir / (prefix + "_pca_scores.csv"), std::ios::trunc);
        out << "row,condition";
        for (std::size_t c = 0; c < report.pca.n_components; ++c) out << ",pc" << c + 1;
        out << '\n';
        for (std::size_t i = 0; i < report.table.size(); ++i) {
            out << i << ',' << condition_name(report.table.rows[i].condition);
            for (std::size_t c = 0; c < report.pca.n_components; ++c) {
                out << ',' << format_double(report.pca.scores[i * report.pca.n_components + c]);
            }
            out << '\n';
        }
    }

    {
        std::ofstream out(out_dir / (prefix + "_cca_loadings.csv"), std::ios::trunc);
        out << "feature,loading\n";
        for (std::size_t j = 0; j < report.prune.kept_names.size(); ++j) {
            out << report.prune.kept_names[j] << ',' << format_double(report.cca.loadings[j])
                << '\n';
        }
    }

    {
        std::ofstream out(out_dir / (prefix + "_shap.csv"), std::ios::trunc);
        out << "row,condition";
        for (const auto& name : report.prune.kept_names) out << ',' << name;
        out << '\n';
        const std::size_t p = report.prune.kept.size();
        for (std::size_t i = 0; i < report.table.size(); ++i) {
            out << i << ',' << condition_name(report.table.rows[i].condition);
            for (std::size_t j = 0; j < p; ++j) {
                out << ',' << format_double(report.shap.attributions[i * p + j]);
            }
            out << '\n';
        }
    }

    nlohmann::json j;
    j["layer"] = report.layer;
    j["options"] = {{"subsamples_per_condition", report.options.subsamples_per_condition},
                    {"subsample_size", report.options.subsample_size},
                    {"metric", metric_name(report.options.metric)},
                    {"prune_threshold", report.options.prune_threshold},
                    {"pca_components", report.options.pca_components},
                    {"lambda", report.options.logistic.lambda},
                    {"train_fraction", report.options.logistic.train_fraction},
                    {"cv_folds", report.options.logistic.cv_folds},
                    {"budget_delta_star", report.options.budget_delta_star},
                    {"seed", report.options.seed}};
    j["kept_features"] = report.prune.kept_names;
    j["dropped_constant"] = report.prune.dropped_constant;
    j["correlation_matrix"] = report.prune.correlation;
    j["pca"] = {{"explained_variance_ratio", report.pca.explained_variance_ratio},
                {"eigenvalues", report.pca.eigenvalues},
                {"loadings", report.pca.loadings}};
    j["cca"] = {{"correlations", report.cca.correlations},
                {"loadings", report.cca.loadings},
                {"ridged", report.cca.ridged}};
    j["regression"] = {{"weights", report.regression.model.weights},
                       {"intercept", report.regression.model.intercept},
                       {"feature_means", report.regression.model.feature_means},
                       {"feature_stds", report.regression.model.feature_stds},
                       {"lambda", report.regression.model.lambda},
                       {"train_indices", report.regression.train_indices},
                       {"test_indices", report.regression.test_indices},
                       {"test_accuracy", report.regression.test_accuracy},
                       {"test_auc", report.regression.test_auc},
                       {"cv_accuracies", report.regression.cv_accuracies},
                       {"seed", report.regression.seed}};
    j["shap"] = {{"base_value", report.shap.base_value},
                 {"background", report.shap.background},
                 {"importance_order", report.shap.importance_order}};
    j["budget"] = {{"normal_se", report.budget_normal.standard_errors},
                   {"normal_pass", report.budget_normal.pass},
                   {"adversarial_se", report.budget_adversarial.standard_errors},
                   {"adversarial_pass", report.budget_adversarial.pass}};
    std::ofstream out(out_dir / (prefix + "_report.json"), std::ios::trunc);
    out << j.dump(2) << '\n';

    if (svg) {
        svg_scatter(out_dir / (prefix + "_pca.svg"), report);
        svg_beeswarm(out_dir / (prefix + "_shap.svg"), report);
    }
}

} // namespace topolens
