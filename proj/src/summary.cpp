#include "topolens/summary.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "topolens/stats.hpp"

namespace topolens {

namespace {

constexpr double kEntropyEps = 1e-12;

const std::array<std::string, 7> kStats = {"mean", "min", "q1", "median", "q3", "max", "std"};
const std::array<std::string, 5> kQuantities = {"death_0bars", "birth_1bars", "death_1bars",
                                                "persistence_1bars", "ratio_birth_death_1bars"};

std::array<std::string, kSummarySize> build_names() {
    std::array<std::string, kSummarySize> names;
    std::size_t i = 0;
    for (const auto& quantity : kQuantities) {
        for (const auto& stat : kStats) names[i++] = stat + "_" + quantity;
    }
    for (const char* dim : {"0bars", "1bars"}) {
        names[i++] = std::string("total_persistence_") + dim;
        names[i++] = std::string("n_bars_") + dim;
        names[i++] = std::string("entropy_") + dim;
    }
    return names;
}

// Writes the 7-stat block for one quantity; zeros for an empty set.
void stat_block(std::vector<double> values, double* out) {
    if (values.empty()) {
        std::fill(out, out + 7, 0.0);
        return;
    }
    out[0] = mean(values);
    std::sort(values.begin(), values.end());
    out[1] = values.front();
    out[2] = quantile_sorted(values, 0.25);
    out[3] = quantile_sorted(values, 0.5);
    out[4] = quantile_sorted(values, 0.75);
    out[5] = values.back();
    out[6] = population_std(values);
}

} // namespace

const std::array<std::string, kSummarySize>& summary_component_names() {
    static const std::array<std::string, kSummarySize> names = build_names();
    return names;
}

std::size_t summary_component_index(const std::string& name) {
    static const std::unordered_map<std::string, std::size_t> index = [] {
        std::unordered_map<std::string, std::size_t> m;
        const auto& names = summary_component_names();
        for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = i;
        return m;
    }();
    const auto it = index.find(name);
    if (it == index.end()) throw DataError(DataError::Code::parse, "unknown summary component: " + name);
    return it->second;
}

double persistent_entropy(const std::vector<double>& lengths) {
    if (lengths.empty()) return 0.0;
    double total = 0.0;
    for (const double l : lengths) {
        if (!(l > 0.0)) throw NumericError("persistent entropy needs positive lengths");
        total += l;
    }
    double e = 0.0;
    for (const double l : lengths) {
        const double p = l / total;
        e -= p * std::log(p + kEntropyEps);
    }
    return e;
}

BarcodeSummary summarize(const Barcode& barcode, const SummaryOptions& options) {
    BarcodeSummary out;

    std::vector<double> deaths0;
    std::vector<double> births1, deaths1, pers1, ratios1;
    std::size_t infinite0 = 0;
    for (const auto& iv : barcode.intervals) {
        if (iv.dim == 0) {
            if (iv.finite()) deaths0.push_back(iv.death);
            else ++infinite0;
        } else if (iv.dim == 1) {
            births1.push_back(iv.birth);
            deaths1.push_back(iv.death);
            pers1.push_back(iv.death - iv.birth);
            ratios1.push_back(iv.death > 0.0 ? iv.birth / iv.death : 0.0);
        }
    }

    double* v = out.values.data();
    stat_block(deaths0, v + 0);
    stat_block(births1, v + 7);
    stat_block(deaths1, v + 14);
    stat_block(pers1, v + 21);
    stat_block(ratios1, v + 28);

    // Bar lengths for entropy: dim-0 births are 0, so lengths are the deaths;
    // zero-length bars carry no mass and are excluded.
    std::vector<double> lengths0;
    for (const double d : deaths0)
        if (d > 0.0) lengths0.push_back(d);
    std::vector<double> lengths1;
    for (const double p : pers1)
        if (p > 0.0) lengths1.push_back(p);

    double total0 = 0.0;
    for (const double d : deaths0) total0 += d;
    double total1 = 0.0;
    for (const double p : pers1) total1 += p;

    v[35] = total0;
    v[36] = static_cast<double>(deaths0.size() + (options.count_infinite_0bar ? infinite0 : 0));
    v[37] = persistent_entropy(lengths0);
    v[38] = total1;
    v[39] = static_cast<double>(births1.size());
    v[40] = persistent_entropy(lengths1);
    return out;
}

} // namespace topolens
