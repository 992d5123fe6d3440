#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "topolens/summary.hpp"
#include "topolens/types.hpp"

namespace topolens {

// Binary activation file, the canonical on-disk carrier. Little-endian layout:
//   bytes 0..3   magic "TLNS"
//   u32          format version (currently 1)
//   u32          dtype tag (1 = float32, the only defined value)
//   i32          layer id
//   i32          condition label code
//   u64          N (rows)
//   u64          D (columns)
//   N*D*4 bytes  row-major float32 payload, exactly
// Values are widened losslessly to float64 on read; writes narrow to float32.
inline constexpr std::uint32_t kActivationFormatVersion = 1;

struct ActivationHeader {
    std::uint32_t version = kActivationFormatVersion;
    std::uint32_t dtype = 1;
    std::int32_t layer = -1;
    Condition condition = Condition::unlabeled;
    std::uint64_t n = 0;
    std::uint64_t d = 0;
};

PointCloud read_activations(const std::filesystem::path& path);
ActivationHeader read_activation_header(const std::filesystem::path& path);
void write_activations(const std::filesystem::path& path, const PointCloud& cloud,
                       std::int32_t layer, Condition condition);

// CSV interoperability path: header row with D column names, one point per
// row. Binary is canonical; this exists for third-party dumps.
PointCloud read_cloud_csv(const std::filesystem::path& path);
void write_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud);

struct DatasetManifest {
    std::string model;
    std::uint64_t dim = 0;
    std::vector<std::int32_t> layers;
    std::vector<Condition> conditions;
    // layer -> condition -> file path (resolved against the manifest location)
    std::map<std::int32_t, std::map<Condition, std::filesystem::path>> files;
    // layer -> condition -> declared sample count
    std::map<std::int32_t, std::map<Condition, std::uint64_t>> counts;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Verifies every referenced file exists and its header matches the declared
// layer, condition, N and D. Throws DataError before any pipeline starts.
void validate_manifest(const DatasetManifest& manifest);

// Summary tables: one row per subsample, provenance columns then the 41 named
// components.
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<BarcodeSummary>& rows);
void write_summary_json(const std::filesystem::path& path,
                        const std::vector<BarcodeSummary>& rows);

// Barcode CSV with columns dim,birth,death,truncated; infinite deaths are
// written as "inf".
void write_barcode_csv(const std::filesystem::path& path, const Barcode& barcode);

// Fixed-width round-trip-exact float formatting used by every CSV writer.
std::string format_double(double value);

} // namespace topolens
