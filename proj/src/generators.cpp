#include "topolens/generators.hpp"

#include <cmath>

#include "topolens/rng.hpp"

namespace topolens {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

PointCloud gen_two_circles(std::size_t n, double noise_sigma, std::uint64_t seed) {
    if (n < 8) throw NumericError("gen_two_circles needs n >= 8");
    Rng rng(seed);
    const std::size_t n_first = (n + 1) / 2;
    PointCloud cloud(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const bool first = i < n_first;
        const std::size_t m = first ? n_first : n - n_first;
        const std::size_t k = first ? i : i - n_first;
        const double cx = first ? 0.0 : 3.0;
        const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
        const double radius = 1.0 + noise_sigma * rng.normal();
        cloud(i, 0) = cx + radius * std::cos(angle);
        cloud(i, 1) = radius * std::sin(angle);
    }
    return cloud;
}

PointCloud gen_regular_ngon(std::size_t n, double radius) {
    if (n < 3) throw NumericError("gen_regular_ngon needs n >= 3");
    PointCloud cloud(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        cloud(i, 0) = radius * std::cos(angle);
        cloud(i, 1) = radius * std::sin(angle);
    }
    return cloud;
}

namespace {

// Circle centers on a coarse grid so mixtures never overlap.
void fill_family(PointCloud& cloud, std::size_t n, std::size_t dim, std::size_t circles,
                 double radius, double spread, Condition condition, Rng& rng) {
    std::vector<PointMeta> meta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = rng.uniform_below(circles);
        const double cx = static_cast<double>(c % 4) * 12.0;
        const double cy = static_cast<double>(c / 4) * 12.0;
        const double angle = kTwoPi * rng.uniform();
        const double r = radius + spread * rng.normal();
        cloud(i, 0) = cx + r * std::cos(angle);
        cloud(i, 1) = cy + r * std::sin(angle);
        for (std::size_t j = 2; j < dim; ++j) cloud(i, j) = 0.25 * spread * rng.normal();
        meta[i] = PointMeta{condition, -1, static_cast<std::int64_t>(i)};
    }
    cloud.set_metadata(std::move(meta));
}

} // namespace

SurrogatePair gen_condition_surrogate(const SurrogateOptions& options) {
    if (options.spread_clean <= 0.0 || options.spread_poisoned <= 0.0) {
        throw NumericError("surrogate spreads must be positive");
    }
    if (options.dim < 2) throw NumericError("surrogate dim must be >= 2");
    if (options.clean_circles == 0 || options.poisoned_circles == 0) {
        throw NumericError("surrogate families need at least one circle");
    }

    SurrogatePair out{PointCloud(options.n_samples, options.dim),
                      PointCloud(options.n_samples, options.dim)};
    Rng rng_clean(derive_seed(options.seed, 0));
    Rng rng_poisoned(derive_seed(options.seed, 1));
    fill_family(out.clean, options.n_samples, options.dim, options.clean_circles,
                options.clean_radius, options.spread_clean, Condition::clean, rng_clean);
    fill_family(out.poisoned, options.n_samples, options.dim, options.poisoned_circles,
                options.poisoned_radius, options.spread_poisoned, Condition::poisoned,
                rng_poisoned);
    return out;
}

ActivationStack gen_local_surrogate(const LocalSurrogateOptions& options) {
    if (options.layers < 2) throw NumericError("local surrogate needs >= 2 layers");
    if (options.dim < 8) throw NumericError("local surrogate needs dim >= 8");
    for (const std::size_t l : options.loop_layers) {
        if (l + 1 >= options.layers) {
            throw NumericError("loop layer " + std::to_string(l) + " has no successor");
        }
    }

    ActivationStack out;
    out.dim = options.dim;
    out.layers.resize(options.layers);
    for (std::size_t layer = 0; layer < options.layers; ++layer) {
        out.layers[layer] = static_cast<std::int32_t>(layer);
    }
    out.data.resize(options.layers);
    for (std::size_t layer = 0; layer < options.layers; ++layer) {
        for (int cond = 0; cond < 2; ++cond) {
            auto& block = out.data[layer][cond];
            block.resize(options.samples);
            for (std::size_t s = 0; s < options.samples; ++s) {
                Rng rng(derive_seed(options.seed, (layer * 2 + cond) * options.samples + s));
                auto& vec = block[s];
                vec.resize(options.dim);
                for (std::size_t i = 0; i < options.dim; ++i) vec[i] = rng.normal();
            }
        }
    }

    // Ring injection: for a flagged layer l, the poisoned (l, l+1) pairs of
    // every vector trace a noisy circle, so the consecutive-pair embedding
    // carries one large 1-cycle.
    for (const std::size_t l : options.loop_layers) {
        auto& lo = out.data[l][1];
        auto& hi = out.data[l + 1][1];
        for (std::size_t s = 0; s < options.samples; ++s) {
            Rng rng(derive_seed(options.seed ^ 0x5bd1e995u, l * options.samples + s));
            const double phase = kTwoPi * rng.uniform();
            for (std::size_t i = 0; i < options.dim; ++i) {
                const double angle =
                    phase + kTwoPi * static_cast<double>(i) / static_cast<double>(options.dim);
                lo[s][i] = options.loop_radius * std::cos(angle) + options.noise * rng.normal();
                hi[s][i] = options.loop_radius * std::sin(angle) + options.noise * rng.normal();
            }
        }
    }
    return out;
}

} // namespace topolens
