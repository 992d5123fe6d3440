#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "topolens/distance.hpp"
#include "topolens/rips.hpp"

using namespace topolens;

namespace {

DistanceMatrix dm_of(const PointCloud& cloud) { return distance_matrix(cloud, Metric::euclidean); }

PointCloud cloud_from(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.begin()->size();
    PointCloud cloud(n, d);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const double x : row) cloud(i, j++) = x;
        ++i;
    }
    return cloud;
}

} // namespace

TEST_CASE("two points: one merge event") {
    const auto cloud = cloud_from({{0.0, 0.0}, {3.0, 4.0}});
    const auto barcode = rips_persistence(dm_of(cloud), 1);
    REQUIRE(barcode.intervals.size() == 2);
    CHECK(barcode.intervals[0].dim == 0);
    CHECK(barcode.intervals[0].birth == 0.0);
    CHECK(barcode.intervals[0].death == 5.0);
    CHECK(barcode.intervals[1].death == kInfiniteDeath);
    CHECK(barcode.count(1) == 0);
}

TEST_CASE("unit square: single dim-1 bar [1, sqrt2)") {
    const auto cloud = cloud_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto barcode = rips_persistence(dm_of(cloud), 1);
    const auto bars1 = barcode.bars(1);
    REQUIRE(bars1.size() == 1);
    CHECK(bars1[0]->birth == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bars1[0]->death == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_FALSE(bars1[0]->truncated);

    const auto naive = reference::rips_persistence_naive(dm_of(cloud), 1);
    CHECK(oracles::same_barcode(barcode, naive));
}

TEST_CASE("equilateral triangle has no dim-1 bar") {
    const auto cloud = cloud_from({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
    const auto barcode = rips_persistence(dm_of(cloud), 1);
    CHECK(barcode.count(1) == 0);
    CHECK(barcode.count(0) == 3);
}

TEST_CASE("dim-0 deaths match independent Kruskal MST exactly") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t n = 3 + static_cast<std::size_t>(seed * 17 % 160);
        const std::size_t d = 1 + static_cast<std::size_t>(seed % 8);
        const auto cloud = oracles::random_cloud(n, d, 1000 + seed);
        const auto dist = dm_of(cloud);
        auto deaths = rips_persistence(dist, 0).finite_deaths(0);
        std::sort(deaths.begin(), deaths.end());
        const auto mst = oracles::kruskal_mst_weights(dist);
        REQUIRE(deaths.size() == mst.size());
        for (std::size_t i = 0; i < mst.size(); ++i) CHECK(deaths[i] == mst[i]);
    }
}

TEST_CASE("full barcode matches naive boundary-matrix reduction") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const std::size_t n = 3 + static_cast<std::size_t>(seed % 28);
        const std::size_t d = 2 + static_cast<std::size_t>(seed % 5);
        const auto cloud = oracles::random_cloud(n, d, 2000 + seed);
        const auto dist = dm_of(cloud);
        const auto fast = rips_persistence(dist, 1);
        const auto naive = reference::rips_persistence_naive(dist, 1);
        CHECK(oracles::same_barcode(fast, naive));
    }
}

TEST_CASE("truncated thresholds match the naive reduction too") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto cloud = oracles::random_cloud(18, 2, 3000 + seed);
        const auto dist = dm_of(cloud);
        const double radius = dist.enclosing_radius();
        for (const double frac : {0.25, 0.5, 0.75}) {
            const double t = radius * frac;
            const auto fast = rips_persistence(dist, 1, t);
            const auto naive = reference::rips_persistence_naive(dist, 1, t);
            CHECK(oracles::same_barcode(fast, naive));
        }
    }
}

TEST_CASE("lowering the threshold never creates new dim-1 intervals") {
    const auto cloud = oracles::random_cloud(24, 3, 77);
    const auto dist = dm_of(cloud);
    const double radius = dist.enclosing_radius();
    const auto full = rips_persistence(dist, 1);
    for (const double frac : {0.3, 0.6, 0.9}) {
        const auto cut = rips_persistence(dist, 1, radius * frac);
        for (const auto& iv : cut.intervals) {
            if (iv.dim != 1) continue;
            const bool present = std::any_of(
                full.intervals.begin(), full.intervals.end(), [&](const Interval& f) {
                    return f.dim == 1 && f.birth == iv.birth && f.death >= iv.death;
                });
            CHECK(present);
        }
    }
}

TEST_CASE("scale equivariance of the barcode") {
    const auto cloud = oracles::random_cloud(20, 3, 42);
    const double scale = 3.5;
    PointCloud scaled = cloud;
    for (double& x : scaled.data()) x *= scale;

    const auto base = rips_persistence(dm_of(cloud), 1);
    const auto big = rips_persistence(dm_of(scaled), 1);
    REQUIRE(base.intervals.size() == big.intervals.size());
    for (std::size_t i = 0; i < base.intervals.size(); ++i) {
        const auto& a = base.intervals[i];
        const auto& b = big.intervals[i];
        CHECK(a.dim == b.dim);
        if (a.finite()) {
            CHECK(b.birth == doctest::Approx(scale * a.birth).epsilon(1e-12));
            CHECK(b.death == doctest::Approx(scale * a.death).epsilon(1e-12));
        }
    }
}

TEST_CASE("point order does not change the interval multiset") {
    const auto cloud = oracles::random_cloud(22, 2, 11);
    Rng rng(5);
    const auto perm = rng.permutation(cloud.size());
    PointCloud shuffled(cloud.size(), cloud.dim());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t j = 0; j < cloud.dim(); ++j) shuffled(i, j) = cloud(perm[i], j);

    auto a = rips_persistence(dm_of(cloud), 1);
    auto b = rips_persistence(dm_of(shuffled), 1);
    const auto key = [](const Interval& iv) { return std::make_tuple(iv.dim, iv.birth, iv.death); };
    const auto lt = [&](const Interval& x, const Interval& y) { return key(x) < key(y); };
    std::sort(a.intervals.begin(), a.intervals.end(), lt);
    std::sort(b.intervals.begin(), b.intervals.end(), lt);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (std::size_t i = 0; i < a.intervals.size(); ++i)
        CHECK(key(a.intervals[i]) == key(b.intervals[i]));
}

TEST_CASE("errors: unsupported dimension and negative threshold") {
    const auto cloud = cloud_from({{0.0, 0.0}, {1.0, 0.0}});
    const auto dist = dm_of(cloud);
    CHECK_THROWS_AS((void)rips_persistence(dist, 2), NumericError);
    CHECK_THROWS_AS((void)rips_persistence(dist, 1, -0.5), NumericError);
}

TEST_CASE("single point gives only the essential bar") {
    PointCloud cloud(1, 3);
    const auto barcode = rips_persistence(dm_of(cloud), 1);
    REQUIRE(barcode.intervals.size() == 1);
    CHECK(barcode.intervals[0].death == kInfiniteDeath);
}
