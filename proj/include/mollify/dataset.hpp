#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mollify/tensor.hpp"

namespace mollify {

/// In-memory MOL1 container: N same-shape images with class labels.
struct Dataset {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::size_t num_classes = 0;
    std::vector<ImageTensor> images;
    std::vector<std::uint32_t> labels;

    std::size_t size() const { return images.size(); }

    /// Shape and label-range consistency; throws DataError.
    void validate() const;

    Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Sidecar metadata for a MOL1 file.
struct Manifest {
    ChannelStats stats;
    std::string provenance;
};

/// MOL1 byte layout: "MOL1", u32 N, H, W, C, num_classes, N*H*W*C f32
/// pixels (row-major, channel-minor), N u32 labels; all little-endian.
std::string encode_mol1(const Dataset& ds);
Dataset decode_mol1(std::string_view bytes);

void write_mol1(const std::filesystem::path& path, const Dataset& ds);
Dataset read_mol1(const std::filesystem::path& path);

/// `<dataset>.json` next to the MOL1 file.
std::filesystem::path manifest_path(const std::filesystem::path& mol1_path);

std::string encode_manifest(const Manifest& manifest);
Manifest decode_manifest(std::string_view json_text);

void write_manifest(const std::filesystem::path& mol1_path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& mol1_path);

}  // namespace mollify
