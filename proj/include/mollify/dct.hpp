#pragma once

#include <cstddef>
#include <vector>

#include "mollify/tensor.hpp"

namespace mollify {

/// Orthonormal DCT-II basis for a fixed (height, width). Transforms are
/// separable: height axis first, then width, each channel independently.
class DctPlan {
public:
    DctPlan(std::size_t height, std::size_t width);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }

    SpectralGrid forward(const ImageTensor& img) const;
    ImageTensor inverse(const SpectralGrid& grid) const;

private:
    std::size_t height_;
    std::size_t width_;
    // basis_[k * n + i] = s_k cos(pi (2i + 1) k / 2n)
    std::vector<double> basis_h_;
    std::vector<double> basis_w_;
};

SpectralGrid dct2d(const ImageTensor& img);
ImageTensor idct2d(const SpectralGrid& grid);

}  // namespace mollify
