#include "topolens/distance.hpp"

#include <cmath>

namespace topolens {

const char* metric_name(Metric m) {
    return m == Metric::euclidean ? "euclidean" : "cosine";
}

Metric metric_from_name(const std::string& name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "cosine") return Metric::cosine;
    throw DataError(DataError::Code::parse, "unknown metric: " + name);
}

DistanceMatrix DistanceMatrix::from_dense(const std::vector<double>& dense, std::size_t n,
                                          Metric metric) {
    if (n == 0) throw NumericError("distance matrix must have at least one point");
    if (dense.size() != n * n) throw NumericError("dense distance matrix size mismatch");
    DistanceMatrix out(n, metric);
    for (std::size_t i = 0; i < n; ++i) {
        if (dense[i * n + i] != 0.0) {
            throw NumericError("distance matrix diagonal nonzero at " + std::to_string(i));
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double a = dense[i * n + j];
            const double b = dense[j * n + i];
            if (a != b) {
                throw NumericError("distance matrix asymmetric at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
            }
            if (!std::isfinite(a) || a < 0.0) {
                throw NumericError("invalid distance at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
            }
            out.at_lower(i, j) = a;
        }
    }
    return out;
}

double DistanceMatrix::enclosing_radius() const {
    if (n_ == 1) return 0.0;
    double radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            row_max = std::max(row_max, (*this)(i, j));
        }
        radius = std::min(radius, row_max);
    }
    return radius;
}

namespace {

double euclidean_dist(const double* u, const double* v, std::size_t d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = u[k] - v[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

} // namespace

DistanceMatrix distance_matrix(const PointCloud& cloud, Metric metric) {
    cloud.validate();
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim();
    DistanceMatrix out(n, metric);

    if (metric == Metric::euclidean) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 1; i < static_cast<std::ptrdiff_t>(n); ++i) {
            for (std::size_t j = 0; j < static_cast<std::size_t>(i); ++j) {
                out.at_lower(static_cast<std::size_t>(i), j) =
                    euclidean_dist(cloud.row(static_cast<std::size_t>(i)), cloud.row(j), d);
            }
        }
        return out;
    }

    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = cloud.row(i);
        for (std::size_t k = 0; k < d; ++k) acc += row[k] * row[k];
        norms[i] = std::sqrt(acc);
        if (norms[i] == 0.0) {
            throw NumericError("cosine metric undefined for zero-norm point " + std::to_string(i));
        }
    }
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 1; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* u = cloud.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < static_cast<std::size_t>(i); ++j) {
            const double* v = cloud.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += u[k] * v[k];
            const double dist = 1.0 - dot / (norms[static_cast<std::size_t>(i)] * norms[j]);
            out.at_lower(static_cast<std::size_t>(i), j) = dist < 0.0 ? 0.0 : dist;
        }
    }
    return out;
}

} // namespace topolens
