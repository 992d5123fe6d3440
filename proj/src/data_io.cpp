#include "topolens/data_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace topolens {

namespace {

constexpr char kMagic[4] = {'T', 'L', 'N', 'S'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 4 + 8 + 8;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

std::uint64_t get_u64(const unsigned char* p) {
    return std::uint64_t(get_u32(p)) | std::uint64_t(get_u32(p + 4)) << 32;
}

float load_f32_le(const unsigned char* p) {
    const std::uint32_t bits = get_u32(p);
    float out;
    std::memcpy(&out, &bits, 4);
    return out;
}

void store_f32_le(std::string& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(buf, bits);
}

ActivationHeader parse_header(const unsigned char* p, const std::string& path) {
    if (std::memcmp(p, kMagic, 4) != 0) {
        throw DataError(DataError::Code::bad_magic, path + ": bad magic bytes");
    }
    ActivationHeader h;
    h.version = get_u32(p + 4);
    if (h.version != kActivationFormatVersion) {
        throw DataError(DataError::Code::bad_version,
                        path + ": unsupported format version " + std::to_string(h.version));
    }
    h.dtype = get_u32(p + 8);
    if (h.dtype != 1) {
        throw DataError(DataError::Code::bad_dtype,
                        path + ": unsupported dtype tag " + std::to_string(h.dtype));
    }
    h.layer = static_cast<std::int32_t>(get_u32(p + 12));
    const std::int32_t cond = static_cast<std::int32_t>(get_u32(p + 16));
    if (cond < 0 || cond > 7) {
        throw DataError(DataError::Code::bad_header,
                        path + ": condition code out of range: " + std::to_string(cond));
    }
    h.condition = static_cast<Condition>(cond);
    h.n = get_u64(p + 20);
    h.d = get_u64(p + 28);
    if (h.n == 0 || h.d == 0) {
        throw DataError(DataError::Code::bad_header, path + ": header declares empty cloud");
    }
    if (h.n > std::numeric_limits<std::uint64_t>::max() / 4 / h.d) {
        throw DataError(DataError::Code::bad_header, path + ": header payload size overflows");
    }
    return h;
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Code::missing_file, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

} // namespace

ActivationHeader read_activation_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Code::missing_file, "cannot open " + path.string());
    char raw[kHeaderBytes];
    in.read(raw, kHeaderBytes);
    if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
        throw DataError(DataError::Code::truncated_payload, path.string() + ": truncated header");
    }
    return parse_header(reinterpret_cast<const unsigned char*>(raw), path.string());
}

PointCloud read_activations(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() < kHeaderBytes) {
        throw DataError(DataError::Code::truncated_payload, path.string() + ": truncated header");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const ActivationHeader h = parse_header(p, path.string());

    const std::uint64_t expected = h.n * h.d * 4;
    const std::uint64_t actual = bytes.size() - kHeaderBytes;
    if (actual < expected) {
        throw DataError(DataError::Code::truncated_payload,
                        path.string() + ": payload short by " + std::to_string(expected - actual) +
                            " bytes");
    }
    if (actual > expected) {
        throw DataError(DataError::Code::trailing_bytes,
                        path.string() + ": " + std::to_string(actual - expected) +
                            " trailing bytes after payload");
    }

    PointCloud cloud(h.n, h.d);
    const unsigned char* payload = p + kHeaderBytes;
    for (std::size_t i = 0; i < h.n * h.d; ++i) {
        cloud.data()[i] = static_cast<double>(load_f32_le(payload + 4 * i));
    }
    std::vector<PointMeta> meta(h.n);
    for (std::size_t i = 0; i < h.n; ++i) {
        meta[i] = PointMeta{h.condition, h.layer, static_cast<std::int64_t>(i)};
    }
    cloud.set_metadata(std::move(meta));
    return cloud;
}

void write_activations(const std::filesystem::path& path, const PointCloud& cloud,
                       std::int32_t layer, Condition condition) {
    cloud.validate();
    std::string buf;
    buf.reserve(kHeaderBytes + cloud.data().size() * 4);
    buf.append(kMagic, 4);
    put_u32(buf, kActivationFormatVersion);
    put_u32(buf, 1); // dtype float32
    put_u32(buf, static_cast<std::uint32_t>(layer));
    put_u32(buf, static_cast<std::uint32_t>(condition));
    put_u64(buf, cloud.size());
    put_u64(buf, cloud.dim());
    for (const double v : cloud.data()) store_f32_le(buf, static_cast<float>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(DataError::Code::missing_file, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(DataError::Code::parse, path.string() + ": missing header row");
    }
    std::size_t d = 1;
    for (const char c : line)
        if (c == ',') ++d;

    std::vector<double> values;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t got = 0;
        while (std::getline(row, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError(DataError::Code::parse,
                                path.string() + ": bad numeric cell '" + cell + "'");
            }
            ++got;
        }
        if (got != d) {
            throw DataError(DataError::Code::parse,
                            path.string() + ": row " + std::to_string(n + 1) + " has " +
                                std::to_string(got) + " cells, expected " + std::to_string(d));
        }
        ++n;
    }
    if (n == 0) throw DataError(DataError::Code::parse, path.string() + ": no data rows");
    return PointCloud(n, d, std::move(values));
}

void write_cloud_csv(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
        if (j) out << ',';
        out << "x" << j;
    }
    out << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (std::size_t j = 0; j < cloud.dim(); ++j) {
            if (j) out << ',';
            out << format_double(cloud(i, j));
        }
        out << '\n';
    }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json j;
    {
        std::ifstream in(path);
        if (!in) throw DataError(DataError::Code::missing_file, "cannot open " + path.string());
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw DataError(DataError::Code::parse,
                            path.string() + ": invalid JSON: " + e.what());
        }
    }
    try {
        DatasetManifest m;
        m.model = j.at("model").get<std::string>();
        m.dim = j.at("dim").get<std::uint64_t>();
        m.layers = j.at("layers").get<std::vector<std::int32_t>>();
        for (const auto& name : j.at("conditions")) {
            m.conditions.push_back(condition_from_name(name.get<std::string>()));
        }
        const auto base = path.has_parent_path() ? path.parent_path()
                                                 : std::filesystem::path(".");
        for (const auto& [layer_key, per_cond] : j.at("files").items()) {
            const std::int32_t layer = std::stoi(layer_key);
            for (const auto& [cond_name, file] : per_cond.items()) {
                const Condition cond = condition_from_name(cond_name);
                std::filesystem::path p = file.get<std::string>();
                if (p.is_relative()) p = base / p;
                m.files[layer][cond] = p;
            }
        }
        if (j.contains("counts")) {
            for (const auto& [layer_key, per_cond] : j.at("counts").items()) {
                const std::int32_t layer = std::stoi(layer_key);
                for (const auto& [cond_name, count] : per_cond.items()) {
                    m.counts[layer][condition_from_name(cond_name)] =
                        count.get<std::uint64_t>();
                }
            }
        }
        return m;
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(DataError::Code::parse, path.string() + ": bad manifest: " + e.what());
    }
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    nlohmann::json j;
    j["model"] = manifest.model;
    j["dim"] = manifest.dim;
    j["layers"] = manifest.layers;
    nlohmann::json conds = nlohmann::json::array();
    for (const Condition c : manifest.conditions) conds.push_back(condition_name(c));
    j["conditions"] = conds;
    for (const auto& [layer, per_cond] : manifest.files) {
        for (const auto& [cond, file] : per_cond) {
            j["files"][std::to_string(layer)][condition_name(cond)] = file.string();
        }
    }
    for (const auto& [layer, per_cond] : manifest.counts) {
        for (const auto& [cond, count] : per_cond) {
            j["counts"][std::to_string(layer)][condition_name(cond)] = count;
        }
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void validate_manifest(const DatasetManifest& manifest) {
    std::vector<std::string> problems;
    for (const std::int32_t layer : manifest.layers) {
        const auto layer_it = manifest.files.find(layer);
        for (const Condition cond : manifest.conditions) {
            const std::string tag =
                "layer " + std::to_string(layer) + " / " + condition_name(cond);
            if (layer_it == manifest.files.end() ||
                layer_it->second.find(cond) == layer_it->second.end()) {
                problems.push_back(tag + ": no file declared");
                continue;
            }
            const auto& file = layer_it->second.at(cond);
            ActivationHeader h;
            try {
                h = read_activation_header(file);
            } catch (const DataError& e) {
                problems.push_back(tag + ": " + e.what());
                continue;
            }
            if (h.d != manifest.dim) {
                problems.push_back(tag + ": D " + std::to_string(h.d) + " != manifest dim " +
                                   std::to_string(manifest.dim));
            }
            if (h.layer != layer) {
                problems.push_back(tag + ": file layer " + std::to_string(h.layer));
            }
            if (h.condition != cond) {
                problems.push_back(tag + ": file condition " +
                                   condition_name(h.condition));
            }
            const auto count_layer = manifest.counts.find(layer);
            if (count_layer != manifest.counts.end()) {
                const auto count_it = count_layer->second.find(cond);
                if (count_it != count_layer->second.end() && count_it->second != h.n) {
                    problems.push_back(tag + ": N " + std::to_string(h.n) +
                                       " != declared " + std::to_string(count_it->second));
                }
            }
        }
    }
    if (!problems.empty()) {
        std::string msg = "manifest validation failed:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(DataError::Code::manifest_mismatch, msg);
    }
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<BarcodeSummary>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << "sample_id,layer,condition";
    for (const auto& name : summary_component_names()) out << ',' << name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.sample_id << ',' << row.layer << ',' << condition_name(row.condition);
        for (const double v : row.values) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<BarcodeSummary>& rows) {
    nlohmann::json j = nlohmann::json::array();
    const auto& names = summary_component_names();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["sample_id"] = row.sample_id;
        r["layer"] = row.layer;
        r["condition"] = condition_name(row.condition);
        for (std::size_t i = 0; i < kSummarySize; ++i) r["values"][names[i]] = row.values[i];
        j.push_back(std::move(r));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_barcode_csv(const std::filesystem::path& path, const Barcode& barcode) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(DataError::Code::missing_file, "cannot write " + path.string());
    out << "dim,birth,death,truncated\n";
    for (const auto& iv : barcode.intervals) {
        out << iv.dim << ',' << format_double(iv.birth) << ',' << format_double(iv.death) << ','
            << (iv.truncated ? 1 : 0) << '\n';
    }
}

} // namespace topolens
