// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits nonzero if any fails. Budgets are wall-clock and enforced.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "topolens/data_io.hpp"
#include "topolens/dispersion.hpp"
#include "topolens/generators.hpp"
#include "topolens/pipeline_global.hpp"
#include "topolens/pipeline_local.hpp"
#include "topolens/rips.hpp"
#include "topolens/rng.hpp"
#include "topolens/stats.hpp"
#include "topolens/summary.hpp"

using namespace topolens;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

struct Check {
    std::string label;
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

void run_criterion(int number, const std::string& label, double budget_seconds,
                   const std::function<void(Check&)>& body) {
    Check check;
    check.label = label;
    const auto t0 = clock_type::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (budget_seconds > 0.0 && elapsed > budget_seconds) {
        check.expect(false, "runtime " + std::to_string(elapsed) + "s exceeds budget " +
                                std::to_string(budget_seconds) + "s");
    }
    if (check.ok) {
        std::printf("[PASS] criterion %2d: %s (%.1fs)\n", number, label.c_str(), elapsed);
    } else {
        std::printf("[FAIL] criterion %2d: %s (%.1fs) -- %s\n", number, label.c_str(), elapsed,
                    check.detail.c_str());
        ++failures;
    }
    std::fflush(stdout);
}

std::vector<double> sorted_dim1_persistences(const Barcode& barcode) {
    std::vector<double> pers;
    for (const auto* bar : barcode.bars(1)) pers.push_back(bar->persistence());
    std::sort(pers.rbegin(), pers.rend());
    return pers;
}

GlobalReport surrogate_global_run(std::uint64_t seed, bool same_families, std::size_t K,
                                  std::size_t k) {
    SurrogateOptions gen;
    gen.n_samples = 6000;
    gen.dim = 16;
    gen.seed = derive_seed(seed, 555);
    if (same_families) {
        gen.poisoned_circles = gen.clean_circles;
        gen.poisoned_radius = gen.clean_radius;
        gen.spread_poisoned = gen.spread_clean;
    }
    const auto pair = gen_condition_surrogate(gen);

    GlobalPipelineOptions opts;
    opts.subsamples_per_condition = K;
    opts.subsample_size = k;
    opts.seed = seed;
    return run_global_pipeline(pair.clean, pair.poisoned, 0, opts);
}

std::map<fs::path, std::string> snapshot_dir(const fs::path& dir) {
    std::map<fs::path, std::string> bytes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        bytes[fs::relative(entry.path(), dir)] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return bytes;
}

} // namespace

int main() {
    run_criterion(1, "dim-0 deaths equal independent Kruskal MST weights bitwise", 10.0,
                  [](Check& check) {
                      Rng rng(101);
                      for (int trial = 0; trial < 100; ++trial) {
                          const std::size_t n = 2 + rng.uniform_below(199);  // <= 200
                          const std::size_t d = 1 + rng.uniform_below(16);   // <= 16
                          const auto cloud = oracles::random_cloud(n, d, 9000 + trial);
                          const auto dist = distance_matrix(cloud, Metric::euclidean);
                          auto deaths = rips_persistence(dist, 0).finite_deaths(0);
                          std::sort(deaths.begin(), deaths.end());
                          const auto mst = oracles::kruskal_mst_weights(dist);
                          check.expect(deaths.size() == mst.size(),
                                       "death count mismatch at trial " + std::to_string(trial));
                          for (std::size_t i = 0; i < mst.size() && check.ok; ++i) {
                              check.expect(deaths[i] == mst[i],
                                           "weight mismatch at trial " + std::to_string(trial));
                          }
                      }
                  });

    run_criterion(2, "full barcodes equal naive boundary-matrix reduction", 60.0,
                  [](Check& check) {
                      Rng rng(202);
                      for (int trial = 0; trial < 100; ++trial) {
                          const std::size_t n = 3 + rng.uniform_below(28); // <= 30
                          const std::size_t d = 1 + rng.uniform_below(6);
                          const auto cloud = oracles::random_cloud(n, d, 11000 + trial);
                          const auto dist = distance_matrix(cloud, Metric::euclidean);
                          const auto fast = rips_persistence(dist, 1);
                          const auto naive = reference::rips_persistence_naive(dist, 1);
                          check.expect(oracles::same_barcode(fast, naive),
                                       "barcode mismatch at trial " + std::to_string(trial));
                      }
                  });

    run_criterion(3, "fixture exactness: unit square, 3-gon, two 16-gons", 10.0,
                  [](Check& check) {
                      PointCloud square(4, 2);
                      square(1, 0) = 1.0;
                      square(2, 0) = 1.0;
                      square(2, 1) = 1.0;
                      square(3, 1) = 1.0;
                      const auto sq =
                          rips_persistence(distance_matrix(square, Metric::euclidean), 1);
                      const auto bars = sq.bars(1);
                      check.expect(bars.size() == 1, "square: expected one dim-1 bar");
                      if (!bars.empty()) {
                          check.expect(std::abs(bars[0]->birth - 1.0) < 1e-12, "square birth");
                          check.expect(std::abs(bars[0]->death - std::sqrt(2.0)) < 1e-12,
                                       "square death");
                      }

                      const auto tri = gen_regular_ngon(3, 1.0);
                      check.expect(rips_persistence(distance_matrix(tri, Metric::euclidean), 1)
                                           .count(1) == 0,
                                   "3-gon should have no dim-1 bar");

                      const auto circles = gen_two_circles(32, 0.0, 1);
                      const auto bc =
                          rips_persistence(distance_matrix(circles, Metric::euclidean), 1);
                      const auto pers = sorted_dim1_persistences(bc);
                      check.expect(pers.size() == 2, "16-gons: expected exactly 2 dim-1 bars");
                      if (pers.size() == 2) {
                          check.expect(std::abs(pers[0] - pers[1]) < 1e-9,
                                       "16-gons: persistences differ");
                      }
                  });

    run_criterion(4, "two-circles sample shows two dominant dim-1 bars", 1.0, [](Check& check) {
        const auto cloud = gen_two_circles(50, 0.05, 7);
        const auto bc = rips_persistence(distance_matrix(cloud, Metric::euclidean), 1);
        const auto pers = sorted_dim1_persistences(bc);
        check.expect(pers.size() >= 2, "need at least two dim-1 bars");
        if (pers.size() >= 2) {
            const double third = pers.size() > 2 ? pers[2] : 0.0;
            check.expect(pers[0] > 5.0 * third && pers[1] > 5.0 * third,
                         "top-two bars do not dominate 5x");
        }
    });

    run_criterion(5, "persistent entropy: ln n, single bar, scale invariance", 10.0,
                  [](Check& check) {
                      for (const std::size_t n : {2u, 4u, 16u, 256u}) {
                          const double e = persistent_entropy(std::vector<double>(n, 1.0));
                          check.expect(std::abs(e - std::log(double(n))) < 1e-6,
                                       "ln n failed at n=" + std::to_string(n));
                      }
                      check.expect(std::abs(persistent_entropy({3.0})) < 1e-9, "single bar");
                      const std::vector<double> base = {0.2, 1.7, 0.9, 3.1, 0.4};
                      const double e0 = persistent_entropy(base);
                      for (const double c : {1e-3, 1e-2, 1e2, 1e3}) {
                          std::vector<double> scaled;
                          for (const double l : base) scaled.push_back(c * l);
                          check.expect(std::abs(persistent_entropy(scaled) - e0) < 1e-9,
                                       "scale invariance at c=" + std::to_string(c));
                      }
                  });

    run_criterion(6, "summaries have 41 components in fixed order with defined zeros", 10.0,
                  [](Check& check) {
                      check.expect(summary_component_names().size() == 41, "name count");
                      check.expect(summary_component_names()[0] == "mean_death_0bars",
                                   "first component");
                      check.expect(summary_component_names()[40] == "entropy_1bars",
                                   "last component");
                      Barcode lonely;
                      lonely.intervals.push_back({0, 0.0, kInfiniteDeath, false});
                      const auto s = summarize(lonely);
                      check.expect(s.values.size() == 41, "value count");
                      for (const double v : s.values) {
                          check.expect(v == 0.0, "degenerate barcode must give all zeros");
                      }
                      const auto circles = gen_two_circles(24, 0.02, 3);
                      const auto s2 = summarize(rips_persistence(
                          distance_matrix(circles, Metric::euclidean), 1));
                      for (const double v : s2.values) {
                          check.expect(std::isfinite(v), "non-finite summary component");
                      }
                  });

    run_criterion(7, "global pipeline: surrogate separation and null control", 300.0,
                  [](Check& check) {
                      double null_auc_sum = 0.0;
                      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                          const auto report = surrogate_global_run(seed, false, 32, 256);
                          check.expect(report.regression.test_accuracy >= 0.95,
                                       "accuracy below 0.95 at seed " + std::to_string(seed));
                          check.expect(report.regression.test_auc >= 0.95,
                                       "AUC below 0.95 at seed " + std::to_string(seed));
                          const auto null_report = surrogate_global_run(seed, true, 64, 256);
                          null_auc_sum += null_report.regression.test_auc;
                      }
                      const double null_auc = null_auc_sum / 5.0;
                      check.expect(null_auc >= 0.4 && null_auc <= 0.6,
                                   "null AUC " + std::to_string(null_auc) + " outside [0.4,0.6]");
                  });

    run_criterion(8, "SHAP additivity: base + sum of attributions equals the logit", 60.0,
                  [](Check& check) {
                      const auto report = surrogate_global_run(11, false, 16, 128);
                      const std::size_t p = report.prune.kept.size();
                      const auto X = report.table.features(report.prune.kept);
                      for (std::size_t i = 0; i < report.table.size(); ++i) {
                          double sum = report.shap.base_value;
                          for (std::size_t j = 0; j < p; ++j) {
                              sum += report.shap.attributions[i * p + j];
                          }
                          const double logit = report.regression.model.logit(X.data() + i * p);
                          check.expect(std::abs(sum - logit) < 1e-9,
                                       "additivity broken on row " + std::to_string(i));
                      }
                  });

    run_criterion(9, "pruning: deterministic, threshold-satisfying, duplicate-collapsing", 30.0,
                  [](Check& check) {
                      Rng rng(42);
                      SummaryTable table;
                      table.labels.assign(120, 0);
                      for (std::size_t i = 60; i < 120; ++i) table.labels[i] = 1;
                      table.rows.resize(120);
                      for (std::size_t i = 0; i < 120; ++i) {
                          for (std::size_t f = 0; f < kSummarySize; ++f) {
                              table.rows[i].values[f] = rng.normal();
                          }
                          // component 5 duplicates component 0
                          table.rows[i].values[5] = table.rows[i].values[0];
                      }
                      const auto a = correlation_prune(table, 0.5);
                      const auto b = correlation_prune(table, 0.5);
                      check.expect(a.kept == b.kept, "pruning not deterministic");
                      check.expect(std::find(a.kept.begin(), a.kept.end(), 0) != a.kept.end(),
                                   "priority representative dropped");
                      check.expect(std::find(a.kept.begin(), a.kept.end(), 5) == a.kept.end(),
                                   "duplicate column survived");
                      for (std::size_t x = 0; x < a.kept.size(); ++x) {
                          for (std::size_t y = x + 1; y < a.kept.size(); ++y) {
                              const double r =
                                  a.correlation[a.kept[x] * kSummarySize + a.kept[y]];
                              check.expect(std::abs(r) <= 0.5, "kept pair exceeds threshold");
                          }
                      }
                  });

    run_criterion(10, "local pipeline: permuted control flat, injected loops detected", 600.0,
                  [](Check& check) {
                      LocalSurrogateOptions iid;
                      iid.layers = 2;
                      iid.samples = 200;
                      iid.dim = 512;
                      iid.seed = 21;
                      const auto iid_sweep = layer_sweep(gen_local_surrogate(iid), 1, 200,
                                                         {"total_persistence_1bars"}, 5);
                      const auto& control = iid_sweep.curve(EmbeddingVariant::normalized_permuted,
                                                            "total_persistence_1bars");
                      for (std::size_t pi = 0; pi < control.ratio.size(); ++pi) {
                          check.expect(control.ratio[pi] >= 0.95 && control.ratio[pi] <= 1.05,
                                       "control ratio " + std::to_string(control.ratio[pi]) +
                                           " outside [0.95,1.05]");
                          // conditions are statistically indistinguishable here
                          const auto w = welch_from_stats(control.mean_a[pi], control.var_a[pi],
                                                          200, control.mean_b[pi],
                                                          control.var_b[pi], 200);
                          check.expect(w.p_value > 0.01,
                                       "control Welch p " + std::to_string(w.p_value) +
                                           " below 0.01");
                      }

                      LocalSurrogateOptions looped = iid;
                      looped.layers = 3;
                      looped.seed = 22;
                      looped.loop_layers = {1};
                      const auto loop_sweep = layer_sweep(gen_local_surrogate(looped), 1, 200,
                                                          {"total_persistence_1bars"}, 6);
                      const auto& original = loop_sweep.curve(EmbeddingVariant::original,
                                                              "total_persistence_1bars");
                      // pair index 1 = (1, 2) carries the injected cycle
                      check.expect(original.ratio[1] < 0.8 || original.ratio[1] > 1.25,
                                   "flagged-layer ratio " + std::to_string(original.ratio[1]) +
                                       " inside [0.8,1.25]");
                  });

    run_criterion(11, "p@k estimator: enumeration vs Monte Carlo, degenerate cases", 60.0,
                  [](Check& check) {
                      const std::vector<double> curve = {0, 7, 1, 6, 0, 5, 1, 4, 0, 3};
                      for (const std::size_t k : {1u, 2u, 3u}) {
                          const auto r = peak_precision_at_k(curve, curve, k, 2000, 3);
                          check.expect(r.p_at_k == 1.0, "identical curves p@k != 1");
                      }
                      const std::vector<double> left = {9, 0, 8, 0, 0, 0, 0, 0};
                      const std::vector<double> right = {0, 0, 0, 0, 0, 7, 0, 6};
                      check.expect(peak_precision_at_k(left, right, 2, 2000, 3).p_at_k == 0.0,
                                   "disjoint curves p@k != 0");

                      Rng rng(77);
                      for (std::size_t axis = 6; axis <= 12; ++axis) {
                          const std::size_t k = 3;
                          auto top = rng.sample_indices(axis, k);
                          std::sort(top.begin(), top.end());
                          for (std::size_t obs = 0; obs <= k; ++obs) {
                              const double exact =
                                  overlap_p_value_enumeration(axis, k, top, obs);
                              const std::size_t n_perm = 6000;
                              const double mc = overlap_p_value_monte_carlo(axis, k, top, obs,
                                                                            n_perm, 13 + axis);
                              const double se =
                                  std::sqrt(std::max(exact * (1.0 - exact), 1e-12) /
                                            double(n_perm)) +
                                  1.0 / double(n_perm);
                              check.expect(std::abs(mc - exact) <= 3.0 * se + 1e-9,
                                           "MC deviates beyond 3 SE at axis " +
                                               std::to_string(axis));
                          }
                      }
                  });

    run_criterion(12, "statistics kernels: Welch fixture, BH fixture, collinear dispersion",
                  30.0, [](Check& check) {
                      const auto w = welch_t({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
                      check.expect(std::abs(w.statistic + 1.0) < 1e-3, "Welch t");
                      check.expect(std::abs(w.p_value - 0.3466) < 1e-3, "Welch p");

                      const auto adj = bh_fdr({0.01, 0.02, 0.03});
                      for (const double a : adj) {
                          check.expect(std::abs(a - 0.03) < 1e-15, "BH adjustment");
                      }

                      DiffRepresentation rows;
                      rows.rows = 30;
                      rows.dim = 4;
                      rows.data.resize(120);
                      rows.labels.assign(30, Condition::clean);
                      for (std::size_t i = 0; i < 30; ++i) {
                          const double t = 0.1 * double(i) + 0.3;
                          rows.data[i * 4] = t;
                          rows.data[i * 4 + 1] = -2.0 * t;
                          rows.data[i * 4 + 2] = 0.5 * t;
                          rows.data[i * 4 + 3] = 3.0 * t;
                      }
                      const auto disp = local_dispersion_ratio(rows, 8);
                      for (const double r : disp.ratios) {
                          check.expect(r < 1e-6, "collinear dispersion ratio too large");
                      }
                  });

    run_criterion(13, "subsample budget: SE formula against the reference values", 10.0,
                  [](Check& check) {
                      const double a = 0.1 * std::sqrt(19.0 / 20.0);
                      std::vector<double> values;
                      for (int i = 0; i < 20; ++i) values.push_back(i % 2 ? a : -a);
                      const auto result = subsample_budget_check({values}, 0.05);
                      check.expect(std::abs(result.standard_errors[0] - 0.02236) < 1e-5,
                                   "SE mismatch: " + std::to_string(result.standard_errors[0]));
                      check.expect(result.pass, "SE 0.02236 must pass against 0.025");
                  });

    run_criterion(14, "CLI determinism: rerun reproduces outputs byte-identically", 120.0,
                  [](Check& check) {
#ifndef TOPOLENS_CLI_PATH
                      check.expect(false, "CLI path not configured");
#else
                      const fs::path cli = TOPOLENS_CLI_PATH;
                      const fs::path root =
                          fs::temp_directory_path() /
                          ("topolens_accept_" + std::to_string(::getpid()));
                      fs::remove_all(root);
                      fs::create_directories(root);
                      const auto run_all = [&]() {
                          const std::string base = root.string();
                          std::vector<std::string> commands = {
                              " gen two-circles --n 40 --sigma 0.04 --seed 5 --out " + base +
                                  "/tc",
                              " barcode " + base + "/tc/two_circles.tlns --svg --out " + base +
                                  "/bc",
                              " gen surrogate --layers 0,1 --samples 600 --dim 8 --seed 2 "
                              "--out " +
                                  base + "/sur",
                              " global " + base +
                                  "/sur/manifest.json --K 8 --k 64 --seed 3 --svg --out " + base +
                                  "/glb",
                              " gen local-surrogate --layers 3 --samples 8 --dim 32 "
                              "--loop-layers 1 --seed 4 --out " +
                                  base + "/loc",
                              " local " + base +
                                  "/loc/manifest.json --interval 1,2 --n 8 --k-list 1 "
                                  "--permutations 200 --seed 6 --svg --out " +
                                  base + "/locout",
                              " dispersion " + base +
                                  "/sur/manifest.json --k-neighbors 10 --subsample 80 --seed 7 "
                                  "--out " +
                                  base + "/disp",
                          };
                          for (const auto& cmd : commands) {
                              const std::string full =
                                  cli.string() + cmd + " >/dev/null 2>&1";
                              if (std::system(full.c_str()) != 0) {
                                  return std::string("command failed:") + cmd;
                              }
                          }
                          return std::string();
                      };

                      std::string err = run_all();
                      check.expect(err.empty(), err);
                      const auto first = snapshot_dir(root);
                      // wipe the outputs but keep nothing; rerun from scratch
                      fs::remove_all(root);
                      fs::create_directories(root);
                      err = run_all();
                      check.expect(err.empty(), err);
                      const auto second = snapshot_dir(root);
                      check.expect(first.size() == second.size(), "file set changed");
                      for (const auto& [rel, bytes] : first) {
                          const auto it = second.find(rel);
                          check.expect(it != second.end(), "missing " + rel.string());
                          if (it != second.end()) {
                              check.expect(it->second == bytes,
                                           "bytes differ in " + rel.string());
                          }
                      }
                      fs::remove_all(root);
#endif
                  });

    std::printf("\n%d of 14 criteria passed\n", 14 - failures);
    return failures == 0 ? 0 : 1;
}
