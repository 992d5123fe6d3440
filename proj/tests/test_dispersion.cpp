#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topolens/dispersion.hpp"
#include "topolens/rng.hpp"

using namespace topolens;

namespace {

DiffRepresentation make_rows(std::size_t m, std::size_t d, std::uint64_t seed,
                             Condition label = Condition::clean) {
    DiffRepresentation rows;
    rows.rows = m;
    rows.dim = d;
    rows.data.resize(m * d);
    rows.labels.assign(m, label);
    Rng rng(seed);
    for (double& v : rows.data) v = rng.normal();
    return rows;
}

} // namespace

TEST_CASE("dispersion ratio vanishes on collinear neighborhoods") {
    DiffRepresentation rows;
    rows.rows = 40;
    rows.dim = 3;
    rows.data.resize(40 * 3);
    rows.labels.assign(40, Condition::clean);
    for (std::size_t i = 0; i < 40; ++i) {
        const double t = static_cast<double>(i) * 0.37;
        rows.data[i * 3] = 2.0 * t;
        rows.data[i * 3 + 1] = -1.0 * t;
        rows.data[i * 3 + 2] = 0.5 * t;
    }
    const auto result = local_dispersion_ratio(rows, 8);
    for (const double r : result.ratios) CHECK(r < 1e-6);
}

TEST_CASE("dispersion ratio is near 1 for isotropic 2D neighborhoods") {
    const auto rows = make_rows(400, 2, 1);
    const auto result = local_dispersion_ratio(rows, 30);
    CHECK(mean(result.ratios) == doctest::Approx(1.0).epsilon(0.2));
    for (const std::size_t r : result.rank) CHECK(r >= 1);
}

TEST_CASE("dispersion ratio is invariant under rotation and uniform scaling") {
    const auto rows = make_rows(80, 3, 2);
    const auto base = local_dispersion_ratio(rows, 10);

    DiffRepresentation scaled = rows;
    for (double& v : scaled.data) v *= 37.5;
    const auto s = local_dispersion_ratio(scaled, 10);

    // Householder reflection through a fixed unit vector
    const double u[3] = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    DiffRepresentation rotated = rows;
    for (std::size_t i = 0; i < rows.rows; ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < 3; ++c) dot += rows.data[i * 3 + c] * u[c];
        for (std::size_t c = 0; c < 3; ++c) {
            rotated.data[i * 3 + c] = rows.data[i * 3 + c] - 2.0 * dot * u[c];
        }
    }
    const auto r = local_dispersion_ratio(rotated, 10);

    for (std::size_t i = 0; i < rows.rows; ++i) {
        const double denom = std::max(std::abs(base.ratios[i]), 1e-30);
        CHECK(std::abs(s.ratios[i] - base.ratios[i]) / denom < 1e-6);
        CHECK(std::abs(r.ratios[i] - base.ratios[i]) / denom < 1e-6);
    }
}

TEST_CASE("dispersion ratio size errors") {
    const auto rows = make_rows(10, 2, 3);
    CHECK_THROWS_AS((void)local_dispersion_ratio(rows, 10), NumericError);
    CHECK_THROWS_AS((void)local_dispersion_ratio(rows, 1), NumericError);
}

TEST_CASE("split ablation partitions are disjoint and exhaustive") {
    auto rows = make_rows(60, 4, 4);
    for (std::size_t i = 30; i < 60; ++i) rows.labels[i] = Condition::poisoned;
    const auto cc = split_ablation(rows, AblationMode::clean_clean, 0, 5);
    CHECK(cc.n_a + cc.n_b == 30);
    const auto mm = split_ablation(rows, AblationMode::mixed_mixed, 0, 5);
    CHECK(mm.n_a + mm.n_b == 60);
    CHECK(mm.n_a == 30);
}

TEST_CASE("clean-vs-clean ablation stays null across seeds") {
    auto rows = make_rows(80, 3, 5);
    std::size_t flagged = 0;
    const std::size_t seeds = 20;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        const auto r = split_ablation(rows, AblationMode::clean_clean, seed, 8);
        if (r.welch.p_value < 0.05) ++flagged;
    }
    CHECK(flagged <= seeds / 10 + 1);
}

TEST_CASE("mixed ablation mean difference centers on zero across seeds") {
    auto rows = make_rows(80, 3, 6);
    for (std::size_t i = 40; i < 80; ++i) rows.labels[i] = Condition::poisoned;
    double acc = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = split_ablation(rows, AblationMode::mixed_mixed, seed, 8);
        acc += r.mean_a - r.mean_b;
    }
    CHECK(std::abs(acc / 20.0) < 0.05);
}

TEST_CASE("fdr across layers flags only adjusted p below alpha") {
    std::vector<GroupComparison> comps(3);
    comps[0].welch.p_value = 0.001;
    comps[1].welch.p_value = 0.5;
    comps[2].welch.p_value = 0.04;
    const auto result = fdr_across_layers({1, 2, 3}, comps, 0.05);
    REQUIRE(result.p_adjusted.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(result.p_adjusted[i] >= comps[i].welch.p_value);
        CHECK(result.significant[i] == (result.p_adjusted[i] < 0.05));
    }
}

TEST_CASE("mean pairwise cosine distance: identical and orthogonal fixtures") {
    DiffRepresentation same;
    same.rows = 6;
    same.dim = 3;
    same.labels.assign(6, Condition::clean);
    same.data.resize(18);
    for (std::size_t i = 0; i < 6; ++i) {
        same.data[i * 3] = 2.0;
        same.data[i * 3 + 1] = -1.0;
        same.data[i * 3 + 2] = 0.5;
    }
    std::vector<std::size_t> all = {0, 1, 2, 3, 4, 5};
    CHECK(std::abs(mean_pairwise_cosine_distance(same, all)) < 1e-12);

    DiffRepresentation ortho;
    ortho.rows = 4;
    ortho.dim = 4;
    ortho.labels.assign(4, Condition::clean);
    ortho.data.assign(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i) ortho.data[i * 4 + i] = 3.0;
    CHECK(mean_pairwise_cosine_distance(ortho, {0, 1, 2, 3}) == doctest::Approx(1.0));
}

TEST_CASE("mean pairwise cosine distance concentrates near 1 in high dimension") {
    const auto rows = make_rows(300, 512, 7);
    std::vector<std::size_t> all(300);
    std::iota(all.begin(), all.end(), 0);
    CHECK(mean_pairwise_cosine_distance(rows, all) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("cosine distance is exactly invariant under power-of-two row rescaling") {
    auto rows = make_rows(40, 16, 8);
    std::vector<std::size_t> all(40);
    std::iota(all.begin(), all.end(), 0);
    const double base = mean_pairwise_cosine_distance(rows, all);

    Rng rng(9);
    DiffRepresentation scaled = rows;
    for (std::size_t i = 0; i < 40; ++i) {
        const double factor = std::ldexp(1.0, static_cast<int>(rng.uniform_below(7)) - 3);
        for (std::size_t c = 0; c < 16; ++c) scaled.data[i * 16 + c] *= factor;
    }
    CHECK(mean_pairwise_cosine_distance(scaled, all) == base);
}

TEST_CASE("cosine bootstrap: clamping, determinism and zero-norm reporting") {
    const auto a = make_rows(50, 8, 10, Condition::clean);
    const auto b = make_rows(64, 8, 11, Condition::poisoned);
    const auto boot = cosine_bootstrap(a, b, 100, 3, 5);
    CHECK(boot.clamped);
    CHECK(boot.subsample == 50);
    CHECK(boot.mean_distance_a.size() == 3);
    const auto again = cosine_bootstrap(a, b, 100, 3, 5);
    CHECK(boot.mean_distance_a == again.mean_distance_a);
    CHECK(boot.mean_distance_b == again.mean_distance_b);

    auto with_zero = a;
    for (std::size_t c = 0; c < 8; ++c) with_zero.data[3 * 8 + c] = 0.0;
    try {
        (void)cosine_bootstrap(with_zero, b, 10, 3, 5);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("cosine bootstrap separates genuinely different dispersions") {
    auto tight = make_rows(200, 32, 12, Condition::clean);
    // tight cluster: common direction plus small noise
    for (std::size_t i = 0; i < 200; ++i) {
        for (std::size_t c = 0; c < 32; ++c) {
            tight.data[i * 32 + c] = (c == 0 ? 10.0 : 0.0) + 0.5 * tight.data[i * 32 + c];
        }
    }
    const auto spread = make_rows(200, 32, 13, Condition::poisoned);
    const auto boot = cosine_bootstrap(tight, spread, 150, 3, 6);
    CHECK(mean(boot.mean_distance_a) < mean(boot.mean_distance_b));
    CHECK(boot.welch.p_value < 0.05);
}
