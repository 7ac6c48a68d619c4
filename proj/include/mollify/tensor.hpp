#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mollify {

/// Row-major H x W x C image, channel-minor: element (h, w, c) lives at
/// (h * width + w) * channels + c.
struct ImageTensor {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(std::size_t h, std::size_t w, std::size_t c);
    ImageTensor(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    std::size_t pixels() const { return height * width; }

    double& at(std::size_t h, std::size_t w, std::size_t c) {
        return data[(h * width + w) * channels + c];
    }
    double at(std::size_t h, std::size_t w, std::size_t c) const {
        return data[(h * width + w) * channels + c];
    }

    bool same_shape(const ImageTensor& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }

    /// Throws std::invalid_argument on a size mismatch or non-finite entry.
    void validate() const;
};

/// DCT coefficients of an ImageTensor, same layout: coefficient (h, w, c)
/// is the height-frequency h, width-frequency w term of channel c.
struct SpectralGrid {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> coefficients;

    SpectralGrid() = default;
    SpectralGrid(std::size_t h, std::size_t w, std::size_t c)
        : height(h), width(w), channels(c), coefficients(h * w * c, 0.0) {}

    double& at(std::size_t h, std::size_t w, std::size_t c) {
        return coefficients[(h * width + w) * channels + c];
    }
    double at(std::size_t h, std::size_t w, std::size_t c) const {
        return coefficients[(h * width + w) * channels + c];
    }
};

struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> std;

    std::size_t channels() const { return mean.size(); }
};

inline constexpr double kStdFloor = 1e-8;

/// Per-channel mean and population standard deviation over every pixel of
/// every image. std is floored at kStdFloor.
ChannelStats compute_channel_stats(std::span<const ImageTensor> dataset);

ImageTensor standardize(const ImageTensor& img, const ChannelStats& stats);
ImageTensor destandardize(const ImageTensor& img, const ChannelStats& stats);

}  // namespace mollify
