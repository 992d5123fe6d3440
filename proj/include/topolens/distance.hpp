#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topolens/types.hpp"

namespace topolens {

enum class Metric { euclidean, cosine };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

// Symmetric pairwise distances with zero diagonal, stored as the strict lower
// triangle so symmetry is exact by construction.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, Metric metric)
        : n_(n), metric_(metric), lower_(n * (n - 1) / 2, 0.0) {}

    // Validates symmetry, zero diagonal, finiteness and nonnegativity of a
    // dense row-major n x n matrix. Throws NumericError on violation.
    static DistanceMatrix from_dense(const std::vector<double>& dense, std::size_t n, Metric metric);

    std::size_t size() const { return n_; }
    Metric metric() const { return metric_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i > j ? lower_[tri_index(i, j)] : lower_[tri_index(j, i)];
    }

    double& at_lower(std::size_t i, std::size_t j) { return lower_[tri_index(i, j)]; }

    const std::vector<double>& lower() const { return lower_; }

    // min over i of max over j of d(i, j); past this scale the complex is a
    // cone and carries no dim-1 homology.
    double enclosing_radius() const;

private:
    // i > j
    std::size_t tri_index(std::size_t i, std::size_t j) const { return i * (i - 1) / 2 + j; }

    std::size_t n_ = 0;
    Metric metric_ = Metric::euclidean;
    std::vector<double> lower_;
};

// Exact pairwise distances for the chosen metric. Cosine distance is
// 1 - (u.v)/(|u||v|); a zero-norm point under the cosine metric raises
// NumericError naming the point index.
DistanceMatrix distance_matrix(const PointCloud& cloud, Metric metric);

} // namespace topolens
