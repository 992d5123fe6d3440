#include <doctest.h>

#include <cmath>

#include "topolens/rng.hpp"
#include "topolens/summary.hpp"

using namespace topolens;

namespace {

Barcode barcode_of(std::initializer_list<Interval> ivs) {
    Barcode b;
    b.intervals = ivs;
    return b;
}

} // namespace

TEST_CASE("persistent entropy: uniform lengths reach ln n") {
    for (const std::size_t n : {2u, 4u, 16u, 256u}) {
        const std::vector<double> lengths(n, 0.7);
        CHECK(persistent_entropy(lengths) ==
              doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-6));
    }
}

TEST_CASE("persistent entropy: single bar is ~0, empty is 0") {
    CHECK(std::abs(persistent_entropy({5.0})) < 1e-9);
    CHECK(persistent_entropy({}) == 0.0);
}

TEST_CASE("persistent entropy: hand value for lengths {1,3}") {
    CHECK(persistent_entropy({1.0, 3.0}) == doctest::Approx(0.562335).epsilon(1e-5));
}

TEST_CASE("persistent entropy: scale invariance within 1e-9") {
    const std::vector<double> base = {0.3, 1.1, 2.4, 0.9};
    const double e = persistent_entropy(base);
    for (const double c : {1e-3, 0.1, 10.0, 1e3}) {
        std::vector<double> scaled;
        for (const double l : base) scaled.push_back(c * l);
        CHECK(std::abs(persistent_entropy(scaled) - e) < 1e-9);
    }
}

TEST_CASE("persistent entropy: permutation invariant, errors on nonpositive") {
    CHECK(persistent_entropy({1.0, 2.0, 3.0}) == persistent_entropy({3.0, 1.0, 2.0}));
    CHECK_THROWS_AS((void)persistent_entropy({1.0, 0.0}), NumericError);
    CHECK_THROWS_AS((void)persistent_entropy({-1.0}), NumericError);
}

TEST_CASE("summary has exactly 41 named components") {
    CHECK(summary_component_names().size() == kSummarySize);
    CHECK(summary_component_index("mean_death_0bars") == 0);
    CHECK(summary_component_index("entropy_1bars") == 40);
    CHECK_THROWS_AS((void)summary_component_index("nope"), DataError);
}

TEST_CASE("summary of dim-0 deaths {1,2,3} with empty dim-1") {
    const auto b = barcode_of({{0, 0.0, 1.0, false},
                               {0, 0.0, 2.0, false},
                               {0, 0.0, 3.0, false},
                               {0, 0.0, kInfiniteDeath, false}});
    const auto s = summarize(b);
    CHECK(s.named("mean_death_0bars") == 2.0);
    CHECK(s.named("n_bars_1bars") == 0.0);
    CHECK(s.named("entropy_1bars") == 0.0);
    CHECK(s.named("n_bars_0bars") == 3.0);
    CHECK(s.named("total_persistence_0bars") == 6.0);
    for (const double v : s.values) CHECK(std::isfinite(v));
}

TEST_CASE("summary counts can include the infinite bar on request") {
    const auto b = barcode_of({{0, 0.0, 1.0, false}, {0, 0.0, kInfiniteDeath, false}});
    CHECK(summarize(b).named("n_bars_0bars") == 1.0);
    SummaryOptions opts;
    opts.count_infinite_0bar = true;
    CHECK(summarize(b, opts).named("n_bars_0bars") == 2.0);
}

TEST_CASE("summary of a single dim-1 bar [1,2)") {
    const auto b = barcode_of({{0, 0.0, kInfiniteDeath, false}, {1, 1.0, 2.0, false}});
    const auto s = summarize(b);
    for (const char* stat : {"mean", "min", "q1", "median", "q3", "max"}) {
        CHECK(s.named(std::string(stat) + "_ratio_birth_death_1bars") == 0.5);
        CHECK(s.named(std::string(stat) + "_persistence_1bars") == 1.0);
    }
    CHECK(s.named("std_ratio_birth_death_1bars") == 0.0);
    CHECK(s.named("std_persistence_1bars") == 0.0);
    CHECK(s.named("n_bars_1bars") == 1.0);
}

TEST_CASE("summary is invariant under interval reordering") {
    const auto a = barcode_of({{0, 0.0, 1.0, false},
                               {0, 0.0, 2.5, false},
                               {0, 0.0, kInfiniteDeath, false},
                               {1, 0.5, 1.5, false},
                               {1, 0.25, 2.0, false}});
    auto b = a;
    std::swap(b.intervals[0], b.intervals[4]);
    std::swap(b.intervals[1], b.intervals[3]);
    const auto sa = summarize(a);
    const auto sb = summarize(b);
    for (std::size_t i = 0; i < kSummarySize; ++i) CHECK(sa.values[i] == sb.values[i]);
}

TEST_CASE("quartile components are ordered for any bar set") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Barcode b;
        b.intervals.push_back({0, 0.0, kInfiniteDeath, false});
        const std::size_t bars = 1 + rng.uniform_below(9);
        for (std::size_t i = 0; i < bars; ++i) {
            const double birth = rng.uniform();
            b.intervals.push_back({1, birth, birth + rng.uniform() + 1e-3, false});
            b.intervals.push_back({0, 0.0, rng.uniform() + 1e-3, false});
        }
        const auto s = summarize(b);
        for (const char* q : {"death_0bars", "birth_1bars", "death_1bars", "persistence_1bars",
                              "ratio_birth_death_1bars"}) {
            const std::string suffix = std::string("_") + q;
            CHECK(s.named("min" + suffix) <= s.named("q1" + suffix));
            CHECK(s.named("q1" + suffix) <= s.named("median" + suffix));
            CHECK(s.named("median" + suffix) <= s.named("q3" + suffix));
            CHECK(s.named("q3" + suffix) <= s.named("max" + suffix));
        }
    }
}
