#include "topolens/pipeline_local.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "topolens/rips.hpp"
#include "topolens/rng.hpp"
#include "topolens/stats.hpp"
#include "topolens/summary.hpp"
#include "topolens/svg.hpp"

namespace topolens {

const char* variant_name(EmbeddingVariant v) {
    switch (v) {
    case EmbeddingVariant::original: return "original";
    case EmbeddingVariant::normalized: return "normalized";
    case EmbeddingVariant::normalized_permuted: return "normalized_permuted";
    }
    return "original";
}

LayerPairEmbedding pair_embedding(const std::vector<double>& act_a,
                                  const std::vector<double>& act_b) {
    if (act_a.size() != act_b.size()) {
        throw NumericError("pair_embedding: dimension mismatch " + std::to_string(act_a.size()) +
                           " vs " + std::to_string(act_b.size()));
    }
    if (act_a.size() < 2) throw NumericError("pair_embedding needs D >= 2");
    LayerPairEmbedding out;
    out.points = PointCloud(act_a.size(), 2);
    for (std::size_t i = 0; i < act_a.size(); ++i) {
        out.points(i, 0) = act_a[i];
        out.points(i, 1) = act_b[i];
    }
    return out;
}

std::vector<double> normalize_vector(const std::vector<double>& v) {
    if (v.size() < 2) throw NumericError("normalize_vector needs D >= 2");
    const double mu = mean(v);
    double var = 0.0;
    for (const double x : v) var += (x - mu) * (x - mu);
    var /= static_cast<double>(v.size());
    if (var == 0.0) throw NumericError("normalize_vector: constant vector is degenerate");
    const double sd = std::sqrt(var);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mu) / sd;
    return out;
}

LayerPairEmbedding permute_control(const LayerPairEmbedding& embedding, std::uint64_t seed) {
    LayerPairEmbedding out = embedding;
    out.variant = EmbeddingVariant::normalized_permuted;
    Rng rng(seed);
    const auto perm = rng.permutation(embedding.points.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out.points(i, 1) = embedding.points(perm[i], 1);
    }
    return out;
}

ActivationStack load_activation_stack(const DatasetManifest& manifest) {
    if (manifest.conditions.size() != 2) {
        throw DataError(DataError::Code::coverage,
                        "local analysis needs exactly two manifest conditions");
    }
    validate_manifest(manifest);
    ActivationStack stack;
    stack.layers = manifest.layers;
    std::sort(stack.layers.begin(), stack.layers.end());
    stack.dim = manifest.dim;
    stack.conditions = {manifest.conditions[0], manifest.conditions[1]};
    stack.data.resize(stack.layers.size());
    for (std::size_t li = 0; li < stack.layers.size(); ++li) {
        for (int cond = 0; cond < 2; ++cond) {
            const auto cloud = read_activations(
                manifest.files.at(stack.layers[li]).at(stack.conditions[cond]));
            auto& block = stack.data[li][cond];
            block.resize(cloud.size());
            for (std::size_t s = 0; s < cloud.size(); ++s) {
                block[s].assign(cloud.row(s), cloud.row(s) + cloud.dim());
            }
        }
    }
    return stack;
}

const SweepCurve& LayerSweep::curve(EmbeddingVariant v, const std::string& statistic) const {
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        if (variants[vi] != v) continue;
        for (std::size_t si = 0; si < statistics.size(); ++si) {
            if (statistics[si] == statistic) return curves[vi][si];
        }
    }
    throw DataError(DataError::Code::parse,
                    std::string("no sweep curve for ") + variant_name(v) + "/" + statistic);
}

LayerSweep layer_sweep(const ActivationStack& stack, std::size_t interval, std::size_t n,
                       const std::vector<std::string>& statistics, std::uint64_t seed) {
    if (interval < 1) throw NumericError("layer interval must be >= 1");
    if (interval >= stack.layers.size()) {
        throw NumericError("layer interval " + std::to_string(interval) +
                           " leaves an empty axis over " + std::to_string(stack.layers.size()) +
                           " layers");
    }
    if (statistics.empty()) throw NumericError("layer sweep needs at least one statistic");
    std::vector<std::size_t> stat_idx;
    for (const auto& name : statistics) stat_idx.push_back(summary_component_index(name));

    // Samples must be present in every layer of the sweep for their condition.
    std::array<std::size_t, 2> available{};
    for (int cond = 0; cond < 2; ++cond) {
        std::size_t lo = stack.data.empty() ? 0 : stack.data[0][cond].size();
        std::vector<std::string> short_layers;
        for (std::size_t li = 0; li < stack.layers.size(); ++li) {
            lo = std::min(lo, stack.data[li][cond].size());
            if (stack.data[li][cond].size() < n) {
                short_layers.push_back(std::to_string(stack.layers[li]));
            }
        }
        if (lo < n) {
            std::string msg = std::string("condition ") + condition_name(stack.conditions[cond]) +
                              " has fewer than " + std::to_string(n) + " samples in layers:";
            for (const auto& l : short_layers) msg += " " + l;
            throw DataError(DataError::Code::coverage, msg);
        }
        available[cond] = lo;
    }

    LayerSweep sweep;
    sweep.n = n;
    sweep.seed = seed;
    sweep.statistics = statistics;
    sweep.variants = {EmbeddingVariant::original, EmbeddingVariant::normalized,
                      EmbeddingVariant::normalized_permuted};
    for (std::size_t li = 0; li + interval < stack.layers.size(); ++li) {
        sweep.pairs.emplace_back(stack.layers[li], stack.layers[li + interval]);
    }
    for (int cond = 0; cond < 2; ++cond) {
        Rng rng(derive_seed(seed, 7000 + static_cast<std::uint64_t>(cond)));
        sweep.sample_ids[cond] = rng.sample_indices(available[cond], n);
    }

    const std::size_t n_pairs = sweep.pairs.size();
    const std::size_t n_variants = sweep.variants.size();
    const std::size_t n_stats = stat_idx.size();
    // job grid: pair x condition x variant x sample -> per-statistic values
    const std::size_t jobs = n_pairs * 2 * n_variants * n;
    std::vector<double> values(jobs * n_stats, 0.0);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(jobs); ++job) {
        std::size_t rem = static_cast<std::size_t>(job);
        const std::size_t s = rem % n;
        rem /= n;
        const std::size_t vi = rem % n_variants;
        rem /= n_variants;
        const std::size_t cond = rem % 2;
        rem /= 2;
        const std::size_t pi = rem;

        const std::size_t row = sweep.sample_ids[cond][s];
        const auto& act_a = stack.data[pi][cond][row];
        const auto& act_b = stack.data[pi + interval][cond][row];

        LayerPairEmbedding embedding;
        const EmbeddingVariant variant = sweep.variants[vi];
        if (variant == EmbeddingVariant::original) {
            embedding = pair_embedding(act_a, act_b);
        } else {
            embedding = pair_embedding(normalize_vector(act_a), normalize_vector(act_b));
            if (variant == EmbeddingVariant::normalized_permuted) {
                embedding = permute_control(
                    embedding, derive_seed(seed, 9000 + static_cast<std::uint64_t>(job)));
            }
        }
        embedding.condition = stack.conditions[cond];
        embedding.variant = variant;
        embedding.sample_id = static_cast<std::int64_t>(row);
        embedding.layer_lo = sweep.pairs[pi].first;
        embedding.layer_hi = sweep.pairs[pi].second;

        const auto dist = distance_matrix(embedding.points, Metric::euclidean);
        const auto summary = summarize(rips_persistence(dist, 1));
        for (std::size_t st = 0; st < n_stats; ++st) {
            values[static_cast<std::size_t>(job) * n_stats + st] = summary.values[stat_idx[st]];
        }
    }

    const auto value_at = [&](std::size_t pi, std::size_t cond, std::size_t vi, std::size_t s,
                              std::size_t st) {
        const std::size_t job = ((pi * 2 + cond) * n_variants + vi) * n + s;
        return values[job * n_stats + st];
    };

    sweep.curves.assign(n_variants, std::vector<SweepCurve>(n_stats));
    for (std::size_t vi = 0; vi < n_variants; ++vi) {
        for (std::size_t st = 0; st < n_stats; ++st) {
            SweepCurve& curve = sweep.curves[vi][st];
            for (std::size_t pi = 0; pi < n_pairs; ++pi) {
                std::vector<double> pooled;
                pooled.reserve(2 * n);
                std::array<std::vector<double>, 2> per_cond;
                for (std::size_t cond = 0; cond < 2; ++cond) {
                    for (std::size_t s = 0; s < n; ++s) {
                        const double v = value_at(pi, cond, vi, s, st);
                        per_cond[cond].push_back(v);
                        pooled.push_back(v);
                    }
                }
                const double mean_a = mean(per_cond[0]);
                const double mean_b = mean(per_cond[1]);
                curve.mean_a.push_back(mean_a);
                curve.mean_b.push_back(mean_b);
                const double ddof = n > 1 ? static_cast<double>(n) / (n - 1.0) : 0.0;
                curve.var_a.push_back(population_variance(per_cond[0]) * ddof);
                curve.var_b.push_back(population_variance(per_cond[1]) * ddof);
                curve.pooled_variance.push_back(population_variance(pooled));
                double ratio;
                if (mean_b != 0.0) ratio = mean_a / mean_b;
                else ratio = mean_a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
                curve.ratio.push_back(ratio);
                curve.abs_diff.push_back(std::abs(mean_a - mean_b));
            }
        }
    }
    return sweep;
}

void write_sweep_csv(const std::filesystem::path& path, const LayerSweep& sweep) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << "layer_lo,layer_hi,variant,statistic,mean_clean,mean_poisoned,var_clean,"
           "var_poisoned,pooled_variance,ratio,abs_diff\n";
    for (std::size_t vi = 0; vi < sweep.variants.size(); ++vi) {
        for (std::size_t st = 0; st < sweep.statistics.size(); ++st) {
            const SweepCurve& c = sweep.curves[vi][st];
            for (std::size_t pi = 0; pi < sweep.pairs.size(); ++pi) {
                out << sweep.pairs[pi].first << ',' << sweep.pairs[pi].second << ','
                    << variant_name(sweep.variants[vi]) << ',' << sweep.statistics[st] << ','
                    << format_double(c.mean_a[pi]) << ',' << format_double(c.mean_b[pi]) << ','
                    << format_double(c.var_a[pi]) << ',' << format_double(c.var_b[pi]) << ','
                    << format_double(c.pooled_variance[pi]) << ',' << format_double(c.ratio[pi])
                    << ',' << format_double(c.abs_diff[pi]) << '\n';
            }
        }
    }
}

void write_sweep_json(const std::filesystem::path& path, const LayerSweep& sweep) {
    nlohmann::json j;
    j["n"] = sweep.n;
    j["seed"] = sweep.seed;
    j["statistics"] = sweep.statistics;
    nlohmann::json axis = nlohmann::json::array();
    for (const auto& [lo, hi] : sweep.pairs) axis.push_back({lo, hi});
    j["pairs"] = axis;
    j["sample_ids"] = {sweep.sample_ids[0], sweep.sample_ids[1]};
    for (std::size_t vi = 0; vi < sweep.variants.size(); ++vi) {
        nlohmann::json v;
        for (std::size_t st = 0; st < sweep.statistics.size(); ++st) {
            const SweepCurve& c = sweep.curves[vi][st];
            v[sweep.statistics[st]] = {{"mean_clean", c.mean_a},
                                       {"mean_poisoned", c.mean_b},
                                       {"var_clean", c.var_a},
                                       {"var_poisoned", c.var_b},
                                       {"pooled_variance", c.pooled_variance},
                                       {"ratio", c.ratio},
                                       {"abs_diff", c.abs_diff}};
        }
        j["curves"][variant_name(sweep.variants[vi])] = std::move(v);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_sweep_svg(const std::filesystem::path& dir, const std::string& prefix,
                     const LayerSweep& sweep) {
    std::vector<double> x;
    for (const auto& [lo, hi] : sweep.pairs) x.push_back(static_cast<double>(lo));
    for (std::size_t st = 0; st < sweep.statistics.size(); ++st) {
        std::vector<SvgSeries> ratio_series;
        for (std::size_t vi = 0; vi < sweep.variants.size(); ++vi) {
            ratio_series.push_back(
                {variant_name(sweep.variants[vi]), sweep.curves[vi][st].ratio});
        }
        svg_line_chart(dir / (prefix + "_ratio_" + sweep.statistics[st] + ".svg"),
                       "clean/poisoned ratio: " + sweep.statistics[st], x, ratio_series);

        const SweepCurve& orig = sweep.curves[0][st];
        svg_line_chart(dir / (prefix + "_variance_" + sweep.statistics[st] + ".svg"),
                       "pooled variance and |mean difference|: " + sweep.statistics[st], x,
                       {{"pooled_variance", orig.pooled_variance}, {"abs_diff", orig.abs_diff}});
    }
}

std::vector<std::size_t> detect_peaks(const std::vector<double>& curve) {
    std::vector<std::size_t> peaks;
    const std::size_t L = curve.size();
    if (L == 0) return peaks;
    if (L == 1) return {0};
    for (std::size_t i = 0; i < L; ++i) {
        const bool left_ok = i == 0 || curve[i] > curve[i - 1];
        const bool right_ok = i + 1 == L || curve[i] > curve[i + 1];
        if (left_ok && right_ok) peaks.push_back(i);
    }
    return peaks;
}

namespace {

std::vector<std::size_t> top_k_peaks(const std::vector<double>& curve,
                                     const std::vector<std::size_t>& peaks, std::size_t k) {
    std::vector<std::size_t> order = peaks;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (curve[a] != curve[b]) return curve[a] > curve[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::size_t overlap_count(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t count = 0;
    for (const std::size_t x : a) {
        if (std::find(b.begin(), b.end(), x) != b.end()) ++count;
    }
    return count;
}

} // namespace

double overlap_p_value_enumeration(std::size_t axis, std::size_t k,
                                   const std::vector<std::size_t>& top, std::size_t observed) {
    if (k > axis) throw NumericError("k exceeds axis length");
    std::vector<std::size_t> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    std::size_t total = 0, hits = 0;
    while (true) {
        ++total;
        if (overlap_count(subset, top) >= observed) ++hits;
        // next k-combination of [0, axis)
        std::size_t i = k;
        while (i-- > 0) {
            if (subset[i] + (k - i) < axis) {
                ++subset[i];
                for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
                break;
            }
            if (i == 0) return static_cast<double>(hits) / static_cast<double>(total);
        }
    }
}

double overlap_p_value_monte_carlo(std::size_t axis, std::size_t k,
                                   const std::vector<std::size_t>& top, std::size_t observed,
                                   std::size_t n_permutations, std::uint64_t seed) {
    if (k > axis) throw NumericError("k exceeds axis length");
    if (n_permutations == 0) throw NumericError("need at least one permutation");
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t it = 0; it < n_permutations; ++it) {
        const auto subset = rng.sample_indices(axis, k);
        if (overlap_count(subset, top) >= observed) ++hits;
    }
    return static_cast<double>(hits + 1) / static_cast<double>(n_permutations + 1);
}

PeakAnalysis peak_precision_at_k(const std::vector<double>& variance_curve,
                                 const std::vector<double>& diff_curve, std::size_t k,
                                 std::size_t n_permutations, std::uint64_t seed) {
    if (variance_curve.size() != diff_curve.size()) {
        throw NumericError("peak analysis: curves must share an axis");
    }
    if (k == 0) throw NumericError("peak analysis needs k >= 1");
    const auto peaks_var = detect_peaks(variance_curve);
    const auto peaks_diff = detect_peaks(diff_curve);
    if (peaks_var.size() < k || peaks_diff.size() < k) {
        throw NumericError("peak analysis: need " + std::to_string(k) + " peaks, found " +
                           std::to_string(peaks_var.size()) + " (variance) and " +
                           std::to_string(peaks_diff.size()) + " (difference)");
    }

    PeakAnalysis out;
    out.peaks_variance = peaks_var.size();
    out.peaks_diff = peaks_diff.size();
    out.top_variance = top_k_peaks(variance_curve, peaks_var, k);
    out.top_diff = top_k_peaks(diff_curve, peaks_diff, k);
    out.observed_overlap = overlap_count(out.top_variance, out.top_diff);
    out.p_at_k = static_cast<double>(out.observed_overlap) / static_cast<double>(k);

    const std::size_t axis = variance_curve.size();
    if (axis <= 12) {
        out.exact = true;
        out.p_value = overlap_p_value_enumeration(axis, k, out.top_diff, out.observed_overlap);
    } else {
        out.exact = false;
        out.p_value = overlap_p_value_monte_carlo(axis, k, out.top_diff, out.observed_overlap,
                                                  n_permutations, derive_seed(seed, 31));
    }
    return out;
}

} // namespace topolens
