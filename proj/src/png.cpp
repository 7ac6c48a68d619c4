#include "mollify/png.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mollify/errors.hpp"

namespace mollify {

std::vector<std::uint8_t> quantize_unit(const ImageTensor& img) {
    std::vector<std::uint8_t> out(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

namespace {

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void on_warning(png_structp, png_const_charp) {}

// Encodes into `out`; returns false if libpng reported an error.
bool encode_rows(png_structp png, png_infop info, std::vector<std::uint8_t>& out, const std::uint8_t* samples,
                 std::size_t height, std::size_t width, std::size_t channels) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_write_fn(png, &out, write_to_vector, flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = width * channels;
    for (std::size_t row = 0; row < height; ++row) {
        png_write_row(png, const_cast<png_bytep>(samples + row * stride));
    }
    png_write_end(png, nullptr);
    return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(std::span<const std::uint8_t> samples, std::size_t height, std::size_t width,
                                     std::size_t channels) {
    if (channels != 1 && channels != 3) {
        throw DataError("png: only 1- or 3-channel images are supported, got " + std::to_string(channels));
    }
    if (samples.size() != height * width * channels) throw DataError("png: sample count does not match shape");
    if (height == 0 || width == 0) throw DataError("png: empty image");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_warning);
    if (png == nullptr) throw DataError("png: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("png: cannot create info struct");
    }

    std::vector<std::uint8_t> out;
    const bool ok = encode_rows(png, info, out, samples.data(), height, width, channels);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw DataError("png: libpng failed to encode image");
    return out;
}

}  // namespace mollify
