#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mollify/tensor.hpp"

namespace mollify {

/// Clamps to [0, 1] and rounds to 8-bit samples in ImageTensor layout.
std::vector<std::uint8_t> quantize_unit(const ImageTensor& img);

/// Lossless 8-bit PNG (grayscale for 1 channel, RGB for 3) at the default
/// zlib level with libpng's adaptive per-row filter choice.
std::vector<std::uint8_t> encode_png(std::span<const std::uint8_t> samples, std::size_t height, std::size_t width,
                                     std::size_t channels);

}  // namespace mollify
