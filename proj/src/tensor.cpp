#include "mollify/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mollify/errors.hpp"

namespace mollify {

ImageTensor::ImageTensor(std::size_t h, std::size_t w, std::size_t c)
    : height(h), width(w), channels(c), data(h * w * c, 0.0) {}

ImageTensor::ImageTensor(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values)
    : height(h), width(w), channels(c), data(std::move(values)) {
    if (data.size() != h * w * c) {
        throw std::invalid_argument("ImageTensor: expected " + std::to_string(h * w * c) + " values, got " +
                                    std::to_string(data.size()));
    }
}

void ImageTensor::validate() const {
    if (data.size() != height * width * channels) throw std::invalid_argument("ImageTensor: size mismatch");
    for (double v : data) {
        if (!std::isfinite(v)) throw std::invalid_argument("ImageTensor: non-finite value");
    }
}

ChannelStats compute_channel_stats(std::span<const ImageTensor> dataset) {
    if (dataset.empty()) throw DataError("compute_channel_stats: empty dataset");
    const std::size_t channels = dataset.front().channels;
    if (channels == 0) throw DataError("compute_channel_stats: images have no channels");

    // Two passes: mean first, then centered squares.
    std::vector<double> sum(channels, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const ImageTensor& img = dataset[i];
        if (img.channels != channels) {
            throw DataError("compute_channel_stats: image " + std::to_string(i) + " has " +
                            std::to_string(img.channels) + " channels, expected " + std::to_string(channels));
        }
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            for (std::size_t c = 0; c < channels; ++c) sum[c] += img.data[p * channels + c];
        }
        count += img.pixels();
    }
    if (count == 0) throw DataError("compute_channel_stats: images have no pixels");

    ChannelStats stats;
    stats.mean.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) stats.mean[c] = sum[c] / static_cast<double>(count);

    std::vector<double> sq(channels, 0.0);
    for (const ImageTensor& img : dataset) {
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            for (std::size_t c = 0; c < channels; ++c) {
                const double d = img.data[p * channels + c] - stats.mean[c];
                sq[c] += d * d;
            }
        }
    }
    stats.std.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        stats.std[c] = std::max(std::sqrt(sq[c] / static_cast<double>(count)), kStdFloor);
    }
    return stats;
}

namespace {

void check_channels(const ImageTensor& img, const ChannelStats& stats, const char* where) {
    if (img.channels != stats.channels() || stats.std.size() != stats.mean.size()) {
        throw DataError(std::string(where) + ": image has " + std::to_string(img.channels) +
                        " channels but stats describe " + std::to_string(stats.channels()));
    }
}

}  // namespace

ImageTensor standardize(const ImageTensor& img, const ChannelStats& stats) {
    check_channels(img, stats, "standardize");
    ImageTensor out = img;
    const std::size_t c_count = img.channels;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const std::size_t c = i % c_count;
        out.data[i] = (img.data[i] - stats.mean[c]) / stats.std[c];
    }
    return out;
}

ImageTensor destandardize(const ImageTensor& img, const ChannelStats& stats) {
    check_channels(img, stats, "destandardize");
    ImageTensor out = img;
    const std::size_t c_count = img.channels;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const std::size_t c = i % c_count;
        out.data[i] = img.data[i] * stats.std[c] + stats.mean[c];
    }
    return out;
}

}  // namespace mollify
