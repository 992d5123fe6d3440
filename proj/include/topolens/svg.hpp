#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "topolens/types.hpp"

namespace topolens {

struct GlobalReport;

// Static SVG emission, no external dependencies. Tabular CSV/JSON is always
// written alongside; these renderings are optional conveniences.

void svg_barcode(const std::filesystem::path& path, const Barcode& barcode);

struct SvgSeries {
    std::string name;
    std::vector<double> values;
};

void svg_line_chart(const std::filesystem::path& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<SvgSeries>& series);

// PCA scatter of the first two components, colored by condition.
void svg_scatter(const std::filesystem::path& path, const GlobalReport& report);

// Beeswarm of per-row attributions, one lane per feature ordered by
// importance, colored by feature value.
void svg_beeswarm(const std::filesystem::path& path, const GlobalReport& report);

} // namespace topolens
