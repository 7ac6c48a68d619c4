#include "mollify/dataset.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "mollify/errors.hpp"
#include "mollify/io.hpp"

static_assert(std::endian::native == std::endian::little, "MOL1 I/O assumes a little-endian host");

namespace mollify {

namespace {

constexpr char kMagic[4] = {'M', 'O', 'L', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void put_f32(std::string& out, float v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n) throw DataError(std::string("MOL1: truncated while reading ") + what);
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    float f32(const char* what) {
        need(4, what);
        float v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void Dataset::validate() const {
    if (images.size() != labels.size()) throw DataError("dataset: image and label counts differ");
    for (std::size_t i = 0; i < images.size(); ++i) {
        const ImageTensor& img = images[i];
        if (img.height != height || img.width != width || img.channels != channels) {
            throw DataError("dataset: image " + std::to_string(i) + " has shape " + std::to_string(img.height) + "x" +
                            std::to_string(img.width) + "x" + std::to_string(img.channels));
        }
        if (labels[i] >= num_classes) {
            throw DataError("dataset: label " + std::to_string(labels[i]) + " of image " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_classes) + ")");
        }
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.height = height;
    out.width = width;
    out.channels = channels;
    out.num_classes = num_classes;
    out.images.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.images.push_back(images.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

std::string encode_mol1(const Dataset& ds) {
    ds.validate();
    std::string out;
    out.reserve(24 + ds.size() * (ds.height * ds.width * ds.channels + 1) * 4);
    out.append(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(ds.size()));
    put_u32(out, static_cast<std::uint32_t>(ds.height));
    put_u32(out, static_cast<std::uint32_t>(ds.width));
    put_u32(out, static_cast<std::uint32_t>(ds.channels));
    put_u32(out, static_cast<std::uint32_t>(ds.num_classes));
    for (const ImageTensor& img : ds.images) {
        for (double v : img.data) put_f32(out, static_cast<float>(v));
    }
    for (std::uint32_t label : ds.labels) put_u32(out, label);
    return out;
}

Dataset decode_mol1(std::string_view bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("MOL1: bad magic");
    Reader r(bytes.substr(4));
    Dataset ds;
    const std::uint32_t n = r.u32("N");
    ds.height = r.u32("H");
    ds.width = r.u32("W");
    ds.channels = r.u32("C");
    ds.num_classes = r.u32("num_classes");
    const std::size_t per_image = ds.height * ds.width * ds.channels;
    const std::size_t expected = (static_cast<std::size_t>(n) * per_image + n) * 4;
    if (r.remaining() != expected) {
        throw DataError("MOL1: expected " + std::to_string(expected) + " payload bytes, found " +
                        std::to_string(r.remaining()));
    }
    ds.images.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ImageTensor img(ds.height, ds.width, ds.channels);
        for (double& v : img.data) v = r.f32("pixels");
        ds.images.push_back(std::move(img));
    }
    ds.labels.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) ds.labels.push_back(r.u32("labels"));
    ds.validate();
    return ds;
}

void write_mol1(const std::filesystem::path& path, const Dataset& ds) { write_file_atomic(path, encode_mol1(ds)); }

Dataset read_mol1(const std::filesystem::path& path) { return decode_mol1(read_file(path)); }

std::filesystem::path manifest_path(const std::filesystem::path& mol1_path) {
    std::filesystem::path p = mol1_path;
    p += ".json";
    return p;
}

std::string encode_manifest(const Manifest& manifest) {
    nlohmann::json j;
    j["format"] = "MOL1";
    j["channels"] = manifest.stats.channels();
    j["mean"] = manifest.stats.mean;
    j["std"] = manifest.stats.std;
    j["provenance"] = manifest.provenance;
    return j.dump(2) + "\n";
}

Manifest decode_manifest(std::string_view json_text) {
    Manifest m;
    try {
        const auto j = nlohmann::json::parse(json_text);
        m.stats.mean = j.at("mean").get<std::vector<double>>();
        m.stats.std = j.at("std").get<std::vector<double>>();
        m.provenance = j.value("provenance", "");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
    if (m.stats.mean.size() != m.stats.std.size()) throw DataError("manifest: mean/std length mismatch");
    for (double s : m.stats.std) {
        if (!(s > 0.0)) throw DataError("manifest: std must be positive");
    }
    return m;
}

void write_manifest(const std::filesystem::path& mol1_path, const Manifest& manifest) {
    write_file_atomic(manifest_path(mol1_path), encode_manifest(manifest));
}

Manifest read_manifest(const std::filesystem::path& mol1_path) {
    return decode_manifest(read_file(manifest_path(mol1_path)));
}

}  // namespace mollify
