#pragma once

#include <array>
#include <string>
#include <vector>

#include "topolens/types.hpp"

namespace topolens {

// 41-component barcode summary: a 7-statistic x 5-quantity grid over
// {death of 0-bars, birth of 1-bars, death of 1-bars, persistence of 1-bars,
// birth/death ratio of 1-bars}, followed by total persistence, bar count and
// persistent entropy for each of the two dimensions.
inline constexpr std::size_t kSummarySize = 41;

// Canonical component names, fixed order. Grid components are named
// <stat>_<quantity> with stats {mean,min,q1,median,q3,max,std} grouped per
// quantity; the tail is {total_persistence,n_bars,entropy} x {0bars,1bars}.
const std::array<std::string, kSummarySize>& summary_component_names();

// Index of a named component; throws DataError for unknown names.
std::size_t summary_component_index(const std::string& name);

struct SummaryOptions {
    // Count only finite dim-0 bars (N - 1). Toggle to include the infinite bar
    // so either counting convention can be reproduced.
    bool count_infinite_0bar = false;
};

struct BarcodeSummary {
    std::array<double, kSummarySize> values{};
    // provenance
    std::int64_t sample_id = -1;
    std::int32_t layer = -1;
    Condition condition = Condition::unlabeled;

    double operator[](std::size_t i) const { return values[i]; }
    double named(const std::string& name) const { return values[summary_component_index(name)]; }
};

// Statistics are over finite dim-0 deaths and all recorded dim-1 bars
// (truncated bars carry their clipped death). Empty bar sets contribute
// zeros, so every barcode yields exactly 41 finite components.
BarcodeSummary summarize(const Barcode& barcode, const SummaryOptions& options = {});

// E = -sum p_i ln(p_i + eps) with p_i = l_i / sum l_j and eps = 1e-12.
// Empty input gives 0; nonpositive lengths raise NumericError.
double persistent_entropy(const std::vector<double>& lengths);

} // namespace topolens
