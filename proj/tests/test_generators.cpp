#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topolens/generators.hpp"
#include "topolens/rips.hpp"
#include "topolens/summary.hpp"

using namespace topolens;

TEST_CASE("noiseless two-circles: exactly 2 dim-1 bars of equal persistence") {
    const auto cloud = gen_two_circles(32, 0.0, 1);
    const auto barcode = rips_persistence(distance_matrix(cloud, Metric::euclidean), 1);
    const auto bars = barcode.bars(1);
    REQUIRE(bars.size() == 2);
    CHECK(std::abs(bars[0]->persistence() - bars[1]->persistence()) < 1e-9);
}

TEST_CASE("noisy 50-point two-circles matches the qualitative shape") {
    const auto cloud = gen_two_circles(50, 0.05, 7);
    const auto barcode = rips_persistence(distance_matrix(cloud, Metric::euclidean), 1);
    std::vector<double> pers;
    for (const auto* bar : barcode.bars(1)) pers.push_back(bar->persistence());
    std::sort(pers.rbegin(), pers.rend());
    REQUIRE(pers.size() >= 2);
    const double third = pers.size() > 2 ? pers[2] : 0.0;
    CHECK(pers[0] >= 5.0 * third);
    CHECK(pers[1] >= 5.0 * third);
}

TEST_CASE("two-circles generator is deterministic per seed") {
    const auto a = gen_two_circles(20, 0.1, 5);
    const auto b = gen_two_circles(20, 0.1, 5);
    const auto c = gen_two_circles(20, 0.1, 6);
    CHECK(a.data() == b.data());
    CHECK(a.data() != c.data());
    CHECK_THROWS_AS((void)gen_two_circles(4, 0.0, 1), NumericError);
}

TEST_CASE("regular n-gon barcodes: square and triangle fixtures") {
    // circumradius 1/sqrt(2) -> side exactly ~1
    const auto square = gen_regular_ngon(4, 1.0 / std::sqrt(2.0));
    const auto bars = rips_persistence(distance_matrix(square, Metric::euclidean), 1).bars(1);
    REQUIRE(bars.size() == 1);
    CHECK(bars[0]->birth == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bars[0]->death == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const auto triangle = gen_regular_ngon(3, 1.0);
    CHECK(rips_persistence(distance_matrix(triangle, Metric::euclidean), 1).count(1) == 0);

    CHECK_THROWS_AS((void)gen_regular_ngon(2, 1.0), NumericError);
}

TEST_CASE("n-gon intervals scale linearly with the radius") {
    const auto small = gen_regular_ngon(12, 1.0);
    const auto big = gen_regular_ngon(12, 2.5);
    const auto b_small = rips_persistence(distance_matrix(small, Metric::euclidean), 1);
    const auto b_big = rips_persistence(distance_matrix(big, Metric::euclidean), 1);
    REQUIRE(b_small.intervals.size() == b_big.intervals.size());
    for (std::size_t i = 0; i < b_small.intervals.size(); ++i) {
        if (!b_small.intervals[i].finite()) continue;
        CHECK(b_big.intervals[i].death ==
              doctest::Approx(2.5 * b_small.intervals[i].death).epsilon(1e-12));
    }
}

TEST_CASE("condition surrogate separates the families in the intended direction") {
    SurrogateOptions opts;
    opts.n_samples = 2000;
    opts.dim = 8;
    opts.seed = 3;
    const auto pair = gen_condition_surrogate(opts);
    CHECK(pair.clean.metadata()[0].condition == Condition::clean);
    CHECK(pair.poisoned.metadata()[0].condition == Condition::poisoned);

    double clean_mean = 0.0, poisoned_mean = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto sub_c = subsample(pair.clean, 128, 100 + s);
        const auto sub_p = subsample(pair.poisoned, 128, 200 + s);
        const auto sum_c =
            summarize(rips_persistence(distance_matrix(sub_c, Metric::euclidean), 1));
        const auto sum_p =
            summarize(rips_persistence(distance_matrix(sub_p, Metric::euclidean), 1));
        clean_mean += sum_c.named("mean_death_0bars");
        poisoned_mean += sum_p.named("mean_death_0bars");
    }
    CHECK(clean_mean < poisoned_mean);
}

TEST_CASE("local surrogate shapes and loop-layer validation") {
    LocalSurrogateOptions opts;
    opts.layers = 4;
    opts.samples = 6;
    opts.dim = 16;
    const auto stack = gen_local_surrogate(opts);
    CHECK(stack.layers.size() == 4);
    CHECK(stack.data[0][0].size() == 6);
    CHECK(stack.data[0][0][0].size() == 16);

    LocalSurrogateOptions bad = opts;
    bad.loop_layers = {3};
    CHECK_THROWS_AS((void)gen_local_surrogate(bad), NumericError);
}
