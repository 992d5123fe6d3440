// topolens command-line tool: surrogate data generation, Vietoris-Rips
// barcodes, barcode-summary featurization, the layer-wise (global) and
// neuron-level (local) analysis pipelines, and dispersion metrics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "topolens/data_io.hpp"
#include "topolens/dispersion.hpp"
#include "topolens/generators.hpp"
#include "topolens/pipeline_global.hpp"
#include "topolens/pipeline_local.hpp"
#include "topolens/rips.hpp"
#include "topolens/rng.hpp"
#include "topolens/summary.hpp"
#include "topolens/svg.hpp"

namespace fs = std::filesystem;
using namespace topolens;

namespace {

constexpr const char* kVersion = "0.2.0";

fs::path default_out_dir() {
    if (const char* env = std::getenv("TOPOLENS_OUT")) return fs::path(env);
    return fs::path("topolens-out");
}

// Every run records its resolved configuration and seeds; re-running with the
// recorded values reproduces all outputs byte-identically.
void write_run_report(const fs::path& out_dir, const std::string& subcommand,
                      const nlohmann::json& config) {
    nlohmann::json j;
    j["tool"] = "topolens";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["threads"] = omp_get_max_threads();
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "run_report.json", std::ios::trunc);
    out << j.dump(2) << '\n';
}

PointCloud load_cloud(const fs::path& path) {
    if (path.extension() == ".csv") return read_cloud_csv(path);
    return read_activations(path);
}

std::vector<std::int32_t> select_layers(const DatasetManifest& manifest,
                                        const std::vector<std::int32_t>& requested) {
    if (requested.empty()) return manifest.layers;
    std::vector<std::string> missing;
    for (const std::int32_t layer : requested) {
        if (std::find(manifest.layers.begin(), manifest.layers.end(), layer) ==
            manifest.layers.end()) {
            missing.push_back(std::to_string(layer));
        }
    }
    if (!missing.empty()) {
        std::string msg = "layers not in manifest:";
        for (const auto& l : missing) msg += " " + l;
        throw DataError(DataError::Code::coverage, msg);
    }
    return requested;
}

// ---------------------------------------------------------------- barcode --

struct BarcodeArgs {
    std::string input;
    std::string metric = "euclidean";
    int max_dim = 1;
    double threshold = -1.0; // <0 selects the enclosing-radius auto policy
    std::string out;
    bool svg = false;
};

int cmd_barcode(const BarcodeArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    const auto cloud = load_cloud(args.input);
    const Metric metric = metric_from_name(args.metric);
    const std::optional<double> threshold =
        args.threshold < 0.0 ? std::nullopt : std::optional<double>(args.threshold);

    const auto dist = distance_matrix(cloud, metric);
    const auto barcode = rips_persistence(dist, args.max_dim, threshold);

    fs::create_directories(out_dir);
    write_barcode_csv(out_dir / "barcode.csv", barcode);
    std::vector<BarcodeSummary> rows = {summarize(barcode)};
    write_summary_csv(out_dir / "summary.csv", rows);
    if (args.svg) svg_barcode(out_dir / "barcode.svg", barcode);

    write_run_report(out_dir, "barcode",
                     {{"input", fs::absolute(args.input).string()},
                      {"metric", args.metric},
                      {"max_dim", args.max_dim},
                      {"threshold", args.threshold},
                      {"threshold_used", barcode.threshold},
                      {"svg", args.svg},
                      {"out", fs::absolute(out_dir).string()}});
    std::cout << "barcode: " << barcode.count(0) << " dim-0 bars, " << barcode.count(1)
              << " dim-1 bars (threshold " << barcode.threshold << ")\n";
    return 0;
}

// -------------------------------------------------------------------- gen --

int cmd_gen_two_circles(std::size_t n, double sigma, std::uint64_t seed, const std::string& out) {
    const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
    fs::create_directories(out_dir);
    const auto cloud = gen_two_circles(n, sigma, seed);
    write_activations(out_dir / "two_circles.tlns", cloud, 0, Condition::unlabeled);
    write_cloud_csv(out_dir / "two_circles.csv", cloud);
    write_run_report(out_dir, "gen two-circles",
                     {{"n", n}, {"sigma", sigma}, {"seed", seed},
                      {"out", fs::absolute(out_dir).string()}});
    std::cout << "wrote " << (out_dir / "two_circles.tlns").string() << '\n';
    return 0;
}

int cmd_gen_ngon(std::size_t n, double radius, const std::string& out) {
    const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
    fs::create_directories(out_dir);
    const auto cloud = gen_regular_ngon(n, radius);
    write_activations(out_dir / "ngon.tlns", cloud, 0, Condition::unlabeled);
    write_cloud_csv(out_dir / "ngon.csv", cloud);
    write_run_report(out_dir, "gen ngon",
                     {{"n", n}, {"radius", radius}, {"out", fs::absolute(out_dir).string()}});
    return 0;
}

struct GenSurrogateArgs {
    std::vector<std::int32_t> layers = {0};
    std::size_t samples = 8192;
    std::size_t dim = 16;
    double spread_clean = 0.05;
    double spread_poisoned = 0.6;
    bool same_families = false;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen_surrogate(const GenSurrogateArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.model = "surrogate";
    manifest.dim = args.dim;
    manifest.layers = args.layers;
    manifest.conditions = {Condition::clean, Condition::poisoned};
    for (const std::int32_t layer : args.layers) {
        SurrogateOptions opts;
        opts.n_samples = args.samples;
        opts.dim = args.dim;
        opts.spread_clean = args.spread_clean;
        opts.spread_poisoned = args.spread_poisoned;
        opts.seed = derive_seed(args.seed, static_cast<std::uint64_t>(layer));
        if (args.same_families) {
            opts.poisoned_circles = opts.clean_circles;
            opts.poisoned_radius = opts.clean_radius;
            opts.spread_poisoned = opts.spread_clean;
        }
        const auto pair = gen_condition_surrogate(opts);
        const std::string base = "layer" + std::to_string(layer);
        write_activations(out_dir / (base + "_clean.tlns"), pair.clean, layer, Condition::clean);
        write_activations(out_dir / (base + "_poisoned.tlns"), pair.poisoned, layer,
                          Condition::poisoned);
        manifest.files[layer][Condition::clean] = base + "_clean.tlns";
        manifest.files[layer][Condition::poisoned] = base + "_poisoned.tlns";
        manifest.counts[layer][Condition::clean] = args.samples;
        manifest.counts[layer][Condition::poisoned] = args.samples;
    }
    save_manifest(out_dir / "manifest.json", manifest);
    write_run_report(out_dir, "gen surrogate",
                     {{"layers", args.layers},
                      {"samples", args.samples},
                      {"dim", args.dim},
                      {"spread_clean", args.spread_clean},
                      {"spread_poisoned", args.spread_poisoned},
                      {"same_families", args.same_families},
                      {"seed", args.seed},
                      {"out", fs::absolute(out_dir).string()}});
    std::cout << "wrote surrogate manifest " << (out_dir / "manifest.json").string() << '\n';
    return 0;
}

struct GenLocalArgs {
    std::size_t layers = 6;
    std::size_t samples = 256;
    std::size_t dim = 128;
    std::vector<std::size_t> loop_layers;
    double loop_radius = 4.0;
    double noise = 0.25;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen_local(const GenLocalArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    fs::create_directories(out_dir);

    LocalSurrogateOptions opts;
    opts.layers = args.layers;
    opts.samples = args.samples;
    opts.dim = args.dim;
    opts.loop_layers = args.loop_layers;
    opts.loop_radius = args.loop_radius;
    opts.noise = args.noise;
    opts.seed = args.seed;
    const auto stack = gen_local_surrogate(opts);

    DatasetManifest manifest;
    manifest.model = "local-surrogate";
    manifest.dim = args.dim;
    manifest.layers = stack.layers;
    manifest.conditions = {Condition::clean, Condition::poisoned};
    for (std::size_t li = 0; li < stack.layers.size(); ++li) {
        for (int cond = 0; cond < 2; ++cond) {
            PointCloud cloud(args.samples, args.dim);
            for (std::size_t s = 0; s < args.samples; ++s) {
                for (std::size_t c = 0; c < args.dim; ++c) {
                    cloud(s, c) = stack.data[li][cond][s][c];
                }
            }
            const std::string name = "layer" + std::to_string(stack.layers[li]) + "_" +
                                     condition_name(stack.conditions[cond]) + ".tlns";
            write_activations(out_dir / name, cloud, stack.layers[li], stack.conditions[cond]);
            manifest.files[stack.layers[li]][stack.conditions[cond]] = name;
            manifest.counts[stack.layers[li]][stack.conditions[cond]] = args.samples;
        }
    }
    save_manifest(out_dir / "manifest.json", manifest);
    write_run_report(out_dir, "gen local-surrogate",
                     {{"layers", args.layers},
                      {"samples", args.samples},
                      {"dim", args.dim},
                      {"loop_layers", args.loop_layers},
                      {"loop_radius", args.loop_radius},
                      {"noise", args.noise},
                      {"seed", args.seed},
                      {"out", fs::absolute(out_dir).string()}});
    std::cout << "wrote local surrogate manifest " << (out_dir / "manifest.json").string() << '\n';
    return 0;
}

// ----------------------------------------------------------------- global --

struct GlobalArgs {
    std::string manifest;
    std::vector<std::int32_t> layers;
    std::size_t K = 64;
    std::size_t k = 4096;
    std::string metric = "euclidean";
    double prune_threshold = 0.5;
    std::size_t pca_components = 2;
    double lambda = 1.0;
    double train_fraction = 0.7;
    std::size_t folds = 5;
    double budget_delta_star = 0.05;
    bool count_infinite = false;
    std::uint64_t seed = 0;
    std::string out;
    bool svg = false;
};

int cmd_global(const GlobalArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    const auto manifest = load_manifest(args.manifest);
    validate_manifest(manifest);
    if (manifest.conditions.size() != 2) {
        throw DataError(DataError::Code::coverage,
                        "global analysis needs exactly two manifest conditions");
    }
    const auto layers = select_layers(manifest, args.layers);

    write_run_report(out_dir, "global",
                     {{"manifest", fs::absolute(args.manifest).string()},
                      {"layers", layers},
                      {"K", args.K},
                      {"k", args.k},
                      {"metric", args.metric},
                      {"prune_threshold", args.prune_threshold},
                      {"pca_components", args.pca_components},
                      {"lambda", args.lambda},
                      {"train_fraction", args.train_fraction},
                      {"folds", args.folds},
                      {"budget_delta_star", args.budget_delta_star},
                      {"count_infinite", args.count_infinite},
                      {"seed", args.seed},
                      {"svg", args.svg},
                      {"out", fs::absolute(out_dir).string()}});

    for (const std::int32_t layer : layers) {
        const auto clean = read_activations(manifest.files.at(layer).at(manifest.conditions[0]));
        const auto poisoned =
            read_activations(manifest.files.at(layer).at(manifest.conditions[1]));

        GlobalPipelineOptions opts;
        opts.subsamples_per_condition = args.K;
        opts.subsample_size = args.k;
        opts.metric = metric_from_name(args.metric);
        opts.prune_threshold = args.prune_threshold;
        opts.pca_components = args.pca_components;
        opts.logistic.lambda = args.lambda;
        opts.logistic.train_fraction = args.train_fraction;
        opts.logistic.cv_folds = args.folds;
        opts.budget_delta_star = args.budget_delta_star;
        opts.summary.count_infinite_0bar = args.count_infinite;
        opts.seed = derive_seed(args.seed, static_cast<std::uint64_t>(layer) + 1);

        const auto report = run_global_pipeline(clean, poisoned, layer, opts);
        write_global_report(out_dir, "layer" + std::to_string(layer), report, args.svg);
        std::cout << "layer " << layer << ": kept " << report.prune.kept.size()
                  << " features, test accuracy " << report.regression.test_accuracy << ", AUC "
                  << report.regression.test_auc << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------ local --

struct LocalArgs {
    std::string manifest;
    std::vector<std::size_t> intervals = {1};
    std::size_t n = 1000;
    std::vector<std::string> stats;
    std::vector<std::size_t> k_list = {1, 3, 5};
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
    std::string out;
    bool svg = false;
};

int cmd_local(const LocalArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    const auto manifest = load_manifest(args.manifest);
    const auto stack = load_activation_stack(manifest);
    const auto stats = args.stats.empty() ? default_sweep_statistics() : args.stats;

    write_run_report(out_dir, "local",
                     {{"manifest", fs::absolute(args.manifest).string()},
                      {"intervals", args.intervals},
                      {"n", args.n},
                      {"stats", stats},
                      {"k_list", args.k_list},
                      {"permutations", args.permutations},
                      {"seed", args.seed},
                      {"svg", args.svg},
                      {"out", fs::absolute(out_dir).string()}});

    std::ofstream peaks(out_dir / "peaks.csv", std::ios::trunc);
    peaks << "interval,statistic,k,p_at_k,p_value,overlap,exact,status\n";

    for (const std::size_t interval : args.intervals) {
        const auto sweep = layer_sweep(stack, interval, args.n, stats,
                                       derive_seed(args.seed, interval));
        const std::string prefix = "interval" + std::to_string(interval);
        write_sweep_csv(out_dir / (prefix + "_sweep.csv"), sweep);
        write_sweep_json(out_dir / (prefix + "_sweep.json"), sweep);
        if (args.svg) write_sweep_svg(out_dir, prefix, sweep);

        for (const auto& stat : stats) {
            const auto& curve = sweep.curve(EmbeddingVariant::original, stat);
            for (const std::size_t k : args.k_list) {
                peaks << interval << ',' << stat << ',' << k << ',';
                try {
                    const auto analysis =
                        peak_precision_at_k(curve.pooled_variance, curve.abs_diff, k,
                                            args.permutations, derive_seed(args.seed, 77 + k));
                    peaks << format_double(analysis.p_at_k) << ','
                          << format_double(analysis.p_value) << ',' << analysis.observed_overlap
                          << ',' << (analysis.exact ? 1 : 0) << ",ok\n";
                } catch (const NumericError& e) {
                    peaks << ",,,,\"" << e.what() << "\"\n";
                }
            }
        }
        std::cout << "interval " << interval << ": axis length " << sweep.pairs.size() << '\n';
    }
    return 0;
}

// ------------------------------------------------------------- dispersion --

struct DispersionArgs {
    std::string manifest;
    std::vector<std::int32_t> layers;
    std::size_t k_neighbors = 30;
    std::size_t subsample = 5000;
    std::size_t iterations = 3;
    double alpha = 0.05;
    bool ablations = true;
    std::uint64_t seed = 0;
    std::string out;
};

DiffRepresentation load_diff_rows(const DatasetManifest& manifest, std::int32_t layer) {
    DiffRepresentation rows;
    rows.layer = layer;
    for (const Condition cond : manifest.conditions) {
        const auto cloud = read_activations(manifest.files.at(layer).at(cond));
        if (rows.dim == 0) rows.dim = cloud.dim();
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            rows.data.insert(rows.data.end(), cloud.row(i), cloud.row(i) + cloud.dim());
            rows.labels.push_back(cond);
        }
        rows.rows += cloud.size();
    }
    return rows;
}

int cmd_dispersion(const DispersionArgs& args) {
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    const auto manifest = load_manifest(args.manifest);
    validate_manifest(manifest);
    const auto layers = select_layers(manifest, args.layers);

    write_run_report(out_dir, "dispersion",
                     {{"manifest", fs::absolute(args.manifest).string()},
                      {"layers", layers},
                      {"k_neighbors", args.k_neighbors},
                      {"subsample", args.subsample},
                      {"iterations", args.iterations},
                      {"alpha", args.alpha},
                      {"ablations", args.ablations},
                      {"seed", args.seed},
                      {"out", fs::absolute(out_dir).string()}});

    std::vector<GroupComparison> main_comparisons;
    std::vector<std::array<GroupComparison, 3>> ablation_rows;
    std::vector<CosineBootstrap> cosine_rows;
    for (const std::int32_t layer : layers) {
        const auto rows = load_diff_rows(manifest, layer);
        main_comparisons.push_back(dispersion_comparison(rows, args.k_neighbors));
        if (args.ablations) {
            ablation_rows.push_back(
                {split_ablation(rows, AblationMode::clean_clean,
                                derive_seed(args.seed, layer), args.k_neighbors),
                 split_ablation(rows, AblationMode::poisoned_poisoned,
                                derive_seed(args.seed, layer), args.k_neighbors),
                 split_ablation(rows, AblationMode::mixed_mixed, derive_seed(args.seed, layer),
                                args.k_neighbors)});
        }

        // per-layer cosine bootstrap of the two label groups
        DiffRepresentation a, b;
        a.dim = b.dim = rows.dim;
        a.layer = b.layer = layer;
        for (std::size_t i = 0; i < rows.rows; ++i) {
            auto& dst = rows.labels[i] == manifest.conditions[0] ? a : b;
            dst.data.insert(dst.data.end(), rows.row(i), rows.row(i) + rows.dim);
            dst.labels.push_back(rows.labels[i]);
            ++dst.rows;
        }
        cosine_rows.push_back(
            cosine_bootstrap(a, b, args.subsample, args.iterations, derive_seed(args.seed, 900 + layer)));
    }

    const auto tests = fdr_across_layers(layers, main_comparisons, args.alpha);
    {
        std::ofstream out(out_dir / "dispersion_tests.csv", std::ios::trunc);
        out << "layer,mean_clean,mean_poisoned,se_clean,se_poisoned,t,p_raw,p_adjusted,"
               "significant\n";
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& c = tests.comparisons[i];
            out << layers[i] << ',' << format_double(c.mean_a) << ',' << format_double(c.mean_b)
                << ',' << format_double(c.se_a) << ',' << format_double(c.se_b) << ','
                << format_double(c.welch.statistic) << ',' << format_double(c.welch.p_value)
                << ',' << format_double(tests.p_adjusted[i]) << ','
                << (tests.significant[i] ? 1 : 0) << '\n';
        }
    }
    if (args.ablations) {
        std::ofstream out(out_dir / "ablations.csv", std::ios::trunc);
        out << "layer,mode,mean_a,mean_b,t,p_raw\n";
        for (std::size_t i = 0; i < layers.size(); ++i) {
            for (int mode = 0; mode < 3; ++mode) {
                const auto& c = ablation_rows[i][static_cast<std::size_t>(mode)];
                out << layers[i] << ',' << ablation_mode_name(static_cast<AblationMode>(mode))
                    << ',' << format_double(c.mean_a) << ',' << format_double(c.mean_b) << ','
                    << format_double(c.welch.statistic) << ',' << format_double(c.welch.p_value)
                    << '\n';
            }
        }
    }
    {
        std::ofstream out(out_dir / "cosine_bootstrap.csv", std::ios::trunc);
        out << "layer,iteration,mean_distance_clean,mean_distance_poisoned,subsample,clamped,"
               "t,p\n";
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& c = cosine_rows[i];
            for (std::size_t it = 0; it < c.mean_distance_a.size(); ++it) {
                out << layers[i] << ',' << it << ',' << format_double(c.mean_distance_a[it])
                    << ',' << format_double(c.mean_distance_b[it]) << ',' << c.subsample << ','
                    << (c.clamped ? 1 : 0) << ',' << format_double(c.welch.statistic) << ','
                    << format_double(c.welch.p_value) << '\n';
            }
        }
    }

    nlohmann::json j;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& c = tests.comparisons[i];
        j["layers"].push_back({{"layer", layers[i]},
                               {"mean_clean", c.mean_a},
                               {"mean_poisoned", c.mean_b},
                               {"se_clean", c.se_a},
                               {"se_poisoned", c.se_b},
                               {"welch_t", c.welch.statistic},
                               {"p_raw", c.welch.p_value},
                               {"p_adjusted", tests.p_adjusted[i]},
                               {"significant", static_cast<bool>(tests.significant[i])}});
    }
    std::ofstream jn(out_dir / "dispersion_tests.json", std::ios::trunc);
    jn << j.dump(2) << '\n';

    std::cout << "dispersion: " << layers.size() << " layers, "
              << std::count(tests.significant.begin(), tests.significant.end(), true)
              << " significant at alpha " << args.alpha << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topological analysis of activation point clouds"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    int jobs = 0;
    app.add_option("--jobs", jobs, "worker pool size (default: available parallelism)");

    BarcodeArgs barcode_args;
    auto* barcode = app.add_subcommand("barcode", "compute a Vietoris-Rips barcode");
    barcode->add_option("input", barcode_args.input, "activation file (.tlns) or cloud CSV")
        ->required();
    barcode->add_option("--metric", barcode_args.metric, "euclidean | cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    barcode->add_option("--max-dim", barcode_args.max_dim, "homology dimension cap (0 or 1)")
        ->check(CLI::Range(0, 1));
    barcode->add_option("--threshold", barcode_args.threshold,
                        "filtration cutoff; negative means auto (enclosing radius)");
    barcode->add_option("--out", barcode_args.out, "output directory");
    barcode->add_flag("--svg", barcode_args.svg, "emit an SVG barcode plot");

    auto* gen = app.add_subcommand("gen", "generate synthetic datasets");
    gen->require_subcommand(1);

    std::size_t tc_n = 50;
    double tc_sigma = 0.05;
    std::uint64_t tc_seed = 1;
    std::string tc_out;
    auto* gen_tc = gen->add_subcommand("two-circles", "two noisy circles (barcode fixture)");
    gen_tc->add_option("--n", tc_n, "total points");
    gen_tc->add_option("--sigma", tc_sigma, "radial noise");
    gen_tc->add_option("--seed", tc_seed, "rng seed");
    gen_tc->add_option("--out", tc_out, "output directory");

    std::size_t ngon_n = 4;
    double ngon_radius = 1.0;
    std::string ngon_out;
    auto* gen_ngon = gen->add_subcommand("ngon", "regular n-gon (exact dim-1 fixture)");
    gen_ngon->add_option("--n", ngon_n, "vertex count");
    gen_ngon->add_option("--radius", ngon_radius, "circumradius");
    gen_ngon->add_option("--out", ngon_out, "output directory");

    GenSurrogateArgs sur_args;
    auto* gen_sur = gen->add_subcommand("surrogate", "clean/poisoned condition surrogate");
    gen_sur->add_option("--layers", sur_args.layers, "layer ids")->delimiter(',');
    gen_sur->add_option("--samples", sur_args.samples, "points per condition per layer");
    gen_sur->add_option("--dim", sur_args.dim, "ambient dimension");
    gen_sur->add_option("--spread-clean", sur_args.spread_clean, "clean family dispersion");
    gen_sur->add_option("--spread-poisoned", sur_args.spread_poisoned,
                        "poisoned family dispersion");
    gen_sur->add_flag("--same-families", sur_args.same_families,
                      "make both conditions draw from one family (null control)");
    gen_sur->add_option("--seed", sur_args.seed, "rng seed");
    gen_sur->add_option("--out", sur_args.out, "output directory");

    GenLocalArgs local_gen_args;
    auto* gen_local = gen->add_subcommand("local-surrogate", "layer stack for local analysis");
    gen_local->add_option("--layers", local_gen_args.layers, "layer count");
    gen_local->add_option("--samples", local_gen_args.samples, "samples per condition");
    gen_local->add_option("--dim", local_gen_args.dim, "neurons per layer");
    gen_local->add_option("--loop-layers", local_gen_args.loop_layers,
                          "layers whose poisoned pairs carry an injected cycle")->delimiter(',');
    gen_local->add_option("--loop-radius", local_gen_args.loop_radius, "injected ring radius");
    gen_local->add_option("--noise", local_gen_args.noise, "injected ring noise");
    gen_local->add_option("--seed", local_gen_args.seed, "rng seed");
    gen_local->add_option("--out", local_gen_args.out, "output directory");

    GlobalArgs global_args;
    auto* global = app.add_subcommand("global", "layer-wise pipeline (prune/PCA/CCA/logistic/SHAP)");
    global->add_option("manifest", global_args.manifest, "dataset manifest JSON")->required();
    global->add_option("--layers", global_args.layers, "subset of manifest layers")->delimiter(',');
    global->add_option("--K", global_args.K, "subsamples per condition");
    global->add_option("--k", global_args.k, "points per subsample");
    global->add_option("--metric", global_args.metric, "euclidean | cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}));
    global->add_option("--prune-threshold", global_args.prune_threshold,
                       "correlation pruning threshold");
    global->add_option("--pca-components", global_args.pca_components, "retained components");
    global->add_option("--lambda", global_args.lambda, "L2 strength on mean cross-entropy");
    global->add_option("--train-fraction", global_args.train_fraction, "train split fraction");
    global->add_option("--folds", global_args.folds, "cross-validation folds");
    global->add_option("--budget-delta-star", global_args.budget_delta_star,
                       "subsample budget target");
    global->add_flag("--count-infinite", global_args.count_infinite,
                     "count the infinite bar in n_bars_0bars");
    global->add_option("--seed", global_args.seed, "rng seed");
    global->add_option("--out", global_args.out, "output directory");
    global->add_flag("--svg", global_args.svg, "emit SVG scatter/beeswarm");

    LocalArgs local_args;
    auto* local = app.add_subcommand("local", "neuron-level layer-pair sweep");
    local->add_option("manifest", local_args.manifest, "dataset manifest JSON")->required();
    local->add_option("--interval", local_args.intervals, "layer-pair intervals")->delimiter(',');
    local->add_option("--n", local_args.n, "samples per condition");
    local->add_option("--stats", local_args.stats, "barcode statistics to track")->delimiter(',');
    local->add_option("--k-list", local_args.k_list, "p@k values")->delimiter(',');
    local->add_option("--permutations", local_args.permutations, "Monte-Carlo permutations");
    local->add_option("--seed", local_args.seed, "rng seed");
    local->add_option("--out", local_args.out, "output directory");
    local->add_flag("--svg", local_args.svg, "emit SVG line charts");

    DispersionArgs disp_args;
    auto* dispersion = app.add_subcommand("dispersion", "k-NN dispersion and cosine analyses");
    dispersion->add_option("manifest", disp_args.manifest, "dataset manifest JSON")->required();
    dispersion->add_option("--layers", disp_args.layers, "subset of manifest layers")->delimiter(',');
    dispersion->add_option("--k-neighbors", disp_args.k_neighbors, "neighborhood size");
    dispersion->add_option("--subsample", disp_args.subsample, "cosine bootstrap subsample");
    dispersion->add_option("--iterations", disp_args.iterations, "bootstrap iterations");
    dispersion->add_option("--alpha", disp_args.alpha, "FDR significance level");
    dispersion->add_flag("!--no-ablations", disp_args.ablations, "skip split ablations");
    dispersion->add_option("--seed", disp_args.seed, "rng seed");
    dispersion->add_option("--out", disp_args.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    if (jobs > 0) omp_set_num_threads(jobs);

    try {
        if (*barcode) return cmd_barcode(barcode_args);
        if (*gen_tc) return cmd_gen_two_circles(tc_n, tc_sigma, tc_seed, tc_out);
        if (*gen_ngon) return cmd_gen_ngon(ngon_n, ngon_radius, ngon_out);
        if (*gen_sur) return cmd_gen_surrogate(sur_args);
        if (*gen_local) return cmd_gen_local(local_gen_args);
        if (*global) return cmd_global(global_args);
        if (*local) return cmd_local(local_args);
        if (*dispersion) return cmd_dispersion(disp_args);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
