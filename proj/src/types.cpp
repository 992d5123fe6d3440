#include "topolens/types.hpp"

#include <cmath>
#include <utility>

#include "topolens/rng.hpp"

namespace topolens {

const char* condition_name(Condition c) {
    switch (c) {
    case Condition::unlabeled: return "unlabeled";
    case Condition::clean: return "clean";
    case Condition::poisoned: return "poisoned";
    case Condition::locked: return "locked";
    case Condition::elicited: return "elicited";
    case Condition::executed: return "executed";
    case Condition::refused: return "refused";
    case Condition::ignored: return "ignored";
    }
    return "unlabeled";
}

Condition condition_from_name(const std::string& name) {
    for (int c = 0; c <= 7; ++c) {
        if (name == condition_name(static_cast<Condition>(c))) return static_cast<Condition>(c);
    }
    throw DataError(DataError::Code::parse, "unknown condition label: " + name);
}

PointCloud::PointCloud(std::size_t n, std::size_t d, std::vector<double> data)
    : n_(n), d_(d), data_(std::move(data)) {
    if (data_.size() != n * d) {
        throw NumericError("point cloud data size " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(n) + "x" + std::to_string(d));
    }
}

void PointCloud::set_metadata(std::vector<PointMeta> meta) {
    if (!meta.empty() && meta.size() != n_) {
        throw NumericError("metadata has " + std::to_string(meta.size()) + " entries for " +
                           std::to_string(n_) + " points");
    }
    meta_ = std::move(meta);
}

void PointCloud::validate() const {
    if (n_ == 0 || d_ == 0) throw NumericError("point cloud must have N >= 1 and D >= 1");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw NumericError("non-finite coordinate at point " + std::to_string(i / d_) +
                               ", component " + std::to_string(i % d_));
        }
    }
    if (!meta_.empty() && meta_.size() != n_) throw NumericError("metadata size mismatch");
}

std::size_t Barcode::count(int dim) const {
    std::size_t c = 0;
    for (const auto& iv : intervals)
        if (iv.dim == dim) ++c;
    return c;
}

std::vector<double> Barcode::finite_deaths(int dim) const {
    std::vector<double> out;
    for (const auto& iv : intervals)
        if (iv.dim == dim && iv.finite()) out.push_back(iv.death);
    return out;
}

std::vector<const Interval*> Barcode::bars(int dim) const {
    std::vector<const Interval*> out;
    for (const auto& iv : intervals)
        if (iv.dim == dim) out.push_back(&iv);
    return out;
}

PointCloud subsample(const PointCloud& cloud, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw NumericError("subsample size must be positive");
    if (k > cloud.size()) {
        throw NumericError("subsample size " + std::to_string(k) + " exceeds cloud size " +
                           std::to_string(cloud.size()));
    }
    Rng rng(seed);
    const auto idx = rng.sample_indices(cloud.size(), k);

    PointCloud out(k, cloud.dim());
    for (std::size_t r = 0; r < k; ++r) {
        const double* src = cloud.row(idx[r]);
        double* dst = out.row(r);
        for (std::size_t j = 0; j < cloud.dim(); ++j) dst[j] = src[j];
    }
    if (cloud.has_metadata()) {
        std::vector<PointMeta> meta(k);
        for (std::size_t r = 0; r < k; ++r) meta[r] = cloud.metadata()[idx[r]];
        out.set_metadata(std::move(meta));
    }
    return out;
}

} // namespace topolens
