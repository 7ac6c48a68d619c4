#include "mollify/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mollify/dct.hpp"

namespace mollify {

ImageTensor pink_noise_image(std::size_t height, std::size_t width, std::size_t channels, Stream& rng,
                             double exponent) {
    SpectralGrid grid(height, width, channels);
    const double floor = 1.0 / static_cast<double>(std::max(height, width));
    for (std::size_t h = 0; h < height; ++h) {
        for (std::size_t w = 0; w < width; ++w) {
            if (h == 0 && w == 0) continue;
            const double fh = static_cast<double>(h) / static_cast<double>(height);
            const double fw = static_cast<double>(w) / static_cast<double>(width);
            const double r = std::max(std::sqrt(fh * fh + fw * fw), floor);
            const double amplitude = std::pow(r, -exponent);
            for (std::size_t c = 0; c < channels; ++c) grid.at(h, w, c) = amplitude * rng.normal();
        }
    }
    ImageTensor img = idct2d(grid);
    const double n = static_cast<double>(img.pixels());
    for (std::size_t c = 0; c < channels; ++c) {
        double mean = 0.0;
        for (std::size_t p = 0; p < img.pixels(); ++p) mean += img.data[p * channels + c];
        mean /= n;
        double var = 0.0;
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            const double d = img.data[p * channels + c] - mean;
            var += d * d;
        }
        const double scale = 0.18 / std::sqrt(std::max(var / n, 1e-300));
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            double& v = img.data[p * channels + c];
            v = std::clamp(0.5 + (v - mean) * scale, 0.0, 1.0);
        }
    }
    return img;
}

Dataset pink_noise_dataset(std::size_t count, std::size_t height, std::size_t width, std::size_t channels,
                           std::uint64_t seed) {
    Dataset ds;
    ds.height = height;
    ds.width = width;
    ds.channels = channels;
    ds.num_classes = 1;
    const Stream root(seed);
    for (std::size_t i = 0; i < count; ++i) {
        Stream rng = root.derive(i);
        ds.images.push_back(pink_noise_image(height, width, channels, rng));
        ds.labels.push_back(0);
    }
    return ds;
}

Dataset texture_dataset(std::size_t count, std::uint64_t seed) {
    constexpr std::size_t kSide = 16;
    constexpr std::size_t kClasses = 4;
    constexpr double kAngleJitter = 0.05;
    constexpr double kFineLo = 0.20;  // cycles per pixel
    constexpr double kFineSpan = 0.08;
    constexpr double kFineAmp = 0.10;
    constexpr double kCoarseAmp = 0.12;
    Dataset ds;
    ds.height = kSide;
    ds.width = kSide;
    ds.channels = 1;
    ds.num_classes = kClasses;
    const Stream root(seed);
    const double side = static_cast<double>(kSide);
    for (std::size_t i = 0; i < count; ++i) {
        Stream rng = root.derive(i);
        const auto label = static_cast<std::uint32_t>(i % kClasses);
        ImageTensor img = pink_noise_image(kSide, kSide, 1, rng);
        // Fine cue: a grating oriented near the class angle.
        const double angle = std::numbers::pi * static_cast<double>(label) / static_cast<double>(kClasses) +
                             kAngleJitter * rng.normal();
        const double freq = 2.0 * std::numbers::pi * (kFineLo + kFineSpan * rng.uniform());
        const double kx = freq * std::cos(angle);
        const double ky = freq * std::sin(angle);
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        const double fine = kFineAmp * (0.8 + 0.4 * rng.uniform()) * std::sqrt(2.0);
        // Coarse cue: half-period cosine ramp along one axis with class-specific sign.
        const double coarse = kCoarseAmp * (0.8 + 0.4 * rng.uniform());
        const bool along_width = label < 2;
        const double sign = label % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t h = 0; h < kSide; ++h) {
            for (std::size_t w = 0; w < kSide; ++w) {
                double& v = img.at(h, w, 0);
                const double wave = std::sin(kx * static_cast<double>(w) + ky * static_cast<double>(h) + phase);
                const double pos = (static_cast<double>(along_width ? w : h) + 0.5) / side;
                const double ramp = sign * std::cos(std::numbers::pi * pos);
                v = std::clamp(0.5 + 0.5 * (v - 0.5) + fine * wave + coarse * ramp, 0.0, 1.0);
            }
        }
        ds.images.push_back(std::move(img));
        ds.labels.push_back(label);
    }
    return ds;
}

Dataset standardize_dataset(const Dataset& ds, const ChannelStats& stats) {
    Dataset out = ds;
    for (ImageTensor& img : out.images) img = standardize(img, stats);
    return out;
}

}  // namespace mollify
