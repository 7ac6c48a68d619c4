#include "mollify/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mollify {

namespace {

std::vector<double> dct_basis(std::size_t n) {
    std::vector<double> basis(n * n);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
        for (std::size_t i = 0; i < n; ++i) {
            basis[k * n + i] =
                scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                 static_cast<double>(k) / (2.0 * nd));
        }
    }
    return basis;
}

// out[k] = sum_i basis[k, i] in[i] (forward) or out[i] = sum_k basis[k, i] in[k]
// (inverse), applied to every (row or column, channel) line of a H x W x C buffer.
void transform_axis(const std::vector<double>& basis, std::size_t n, bool inverse, bool along_height,
                    std::size_t height, std::size_t width, std::size_t channels, const std::vector<double>& in,
                    std::vector<double>& out) {
    const std::size_t lines = along_height ? width : height;
    const std::size_t stride = along_height ? width * channels : channels;
    std::vector<double> line(n);
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t line_base = along_height ? l * channels : l * width * channels;
        for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t base = line_base + c;
            for (std::size_t i = 0; i < n; ++i) line[i] = in[base + i * stride];
            for (std::size_t k = 0; k < n; ++k) {
                double acc = 0.0;
                if (inverse) {
                    for (std::size_t i = 0; i < n; ++i) acc += basis[i * n + k] * line[i];
                } else {
                    for (std::size_t i = 0; i < n; ++i) acc += basis[k * n + i] * line[i];
                }
                out[base + k * stride] = acc;
            }
        }
    }
}

}  // namespace

DctPlan::DctPlan(std::size_t height, std::size_t width)
    : height_(height), width_(width), basis_h_(dct_basis(height)), basis_w_(dct_basis(width)) {
    if (height == 0 || width == 0) throw std::invalid_argument("DctPlan: height and width must be >= 1");
}

SpectralGrid DctPlan::forward(const ImageTensor& img) const {
    if (img.height != height_ || img.width != width_) throw std::invalid_argument("DctPlan: shape mismatch");
    std::vector<double> tmp(img.data.size());
    SpectralGrid grid(img.height, img.width, img.channels);
    transform_axis(basis_h_, height_, false, true, height_, width_, img.channels, img.data, tmp);
    transform_axis(basis_w_, width_, false, false, height_, width_, img.channels, tmp, grid.coefficients);
    return grid;
}

ImageTensor DctPlan::inverse(const SpectralGrid& grid) const {
    if (grid.height != height_ || grid.width != width_) throw std::invalid_argument("DctPlan: shape mismatch");
    std::vector<double> tmp(grid.coefficients.size());
    ImageTensor img(grid.height, grid.width, grid.channels);
    transform_axis(basis_h_, height_, true, true, height_, width_, grid.channels, grid.coefficients, tmp);
    transform_axis(basis_w_, width_, true, false, height_, width_, grid.channels, tmp, img.data);
    return img;
}

SpectralGrid dct2d(const ImageTensor& img) { return DctPlan(img.height, img.width).forward(img); }

ImageTensor idct2d(const SpectralGrid& grid) { return DctPlan(grid.height, grid.width).inverse(grid); }

}  // namespace mollify
