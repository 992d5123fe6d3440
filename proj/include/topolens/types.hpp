#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace topolens {

// Input / format / coverage problems. CLI maps these to exit code 3.
class DataError : public std::runtime_error {
public:
    enum class Code {
        generic,
        bad_magic,
        bad_version,
        bad_dtype,
        truncated_payload,
        trailing_bytes,
        bad_header,
        missing_file,
        manifest_mismatch,
        coverage,
        parse,
    };

    DataError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    explicit DataError(const std::string& what) : DataError(Code::generic, what) {}

    Code code() const { return code_; }

private:
    Code code_;
};

// Numerical / degenerate-input problems (size errors, domain errors,
// stratification failures, ...). CLI maps these to exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

enum class Condition : std::int32_t {
    unlabeled = 0,
    clean = 1,
    poisoned = 2,
    locked = 3,
    elicited = 4,
    executed = 5,
    refused = 6,
    ignored = 7,
};

const char* condition_name(Condition c);
Condition condition_from_name(const std::string& name);

struct PointMeta {
    Condition condition = Condition::unlabeled;
    std::int32_t layer = -1;
    std::int64_t sample_id = -1;
};

// N points in R^D, row-major float64 storage. Metadata is either empty or
// carries exactly one entry per point.
class PointCloud {
public:
    PointCloud() = default;
    PointCloud(std::size_t n, std::size_t d)
        : n_(n), d_(d), data_(n * d, 0.0) {}
    PointCloud(std::size_t n, std::size_t d, std::vector<double> data);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }

    const double* row(std::size_t i) const { return data_.data() + i * d_; }
    double* row(std::size_t i) { return data_.data() + i * d_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool has_metadata() const { return !meta_.empty(); }
    const std::vector<PointMeta>& metadata() const { return meta_; }
    void set_metadata(std::vector<PointMeta> meta);

    // Throws NumericError on empty cloud or non-finite coordinates.
    void validate() const;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
    std::vector<PointMeta> meta_;
};

constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

struct Interval {
    int dim = 0;
    double birth = 0.0;
    double death = 0.0;
    // True when the class was still alive at the filtration threshold and the
    // recorded death is the threshold, not a homological death.
    bool truncated = false;

    bool finite() const { return death != kInfiniteDeath; }
    double persistence() const { return death - birth; }
};

struct Barcode {
    std::vector<Interval> intervals;
    // Scale at which the dim-1 complex was cut off (enclosing radius under
    // the auto policy).
    double threshold = kInfiniteDeath;

    std::size_t count(int dim) const;
    // Deaths of finite bars in the given dimension, in stored order.
    std::vector<double> finite_deaths(int dim) const;
    std::vector<const Interval*> bars(int dim) const;
};

// Uniform sampling of k points without replacement; deterministic per seed,
// metadata carried through. Throws NumericError when k > N or k == 0.
PointCloud subsample(const PointCloud& cloud, std::size_t k, std::uint64_t seed);

} // namespace topolens
