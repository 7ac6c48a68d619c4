#pragma once

#include <cstddef>
#include <cstdint>

#include "mollify/dataset.hpp"
#include "mollify/rng.hpp"
#include "mollify/tensor.hpp"

namespace mollify {

/// Random texture with a 1/f^exponent amplitude spectrum, rescaled per
/// channel to mean 0.5 and standard deviation 0.18, clamped to [0, 1].
ImageTensor pink_noise_image(std::size_t height, std::size_t width, std::size_t channels, Stream& rng,
                             double exponent = 1.0);

/// `count` independent pink-noise images (pixel scale, label 0).
Dataset pink_noise_dataset(std::size_t count, std::size_t height, std::size_t width, std::size_t channels,
                           std::uint64_t seed);

/// Balanced 4-class 16x16x1 textures in pixel scale [0, 1], label i % 4.
/// Each class carries two redundant cues over a pink-noise background: a
/// fine grating at 0, 45, 90 or 135 degrees (0.2 to 0.28 cycles/pixel) and
/// a coarse half-period ramp whose axis and sign encode the class.
Dataset texture_dataset(std::size_t count, std::uint64_t seed);

/// Applies `standardize` to every image.
Dataset standardize_dataset(const Dataset& ds, const ChannelStats& stats);

}  // namespace mollify
