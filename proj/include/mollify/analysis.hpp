#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mollify/rng.hpp"
#include "mollify/schedules.hpp"
#include "mollify/tensor.hpp"

namespace mollify {

enum class CorruptionKind { GaussNoise, GaussBlur, Contrast, Pixelate };

inline constexpr CorruptionKind kAllCorruptions[] = {CorruptionKind::GaussNoise, CorruptionKind::GaussBlur,
                                                     CorruptionKind::Contrast, CorruptionKind::Pixelate};
inline constexpr int kMaxSeverity = 5;

std::string_view to_string(CorruptionKind kind);
CorruptionKind parse_corruption(std::string_view name);

/// Evaluation-time corruption of a standardized image at severity 1..5.
///   GaussNoise  + s eps,             s in {0.1, 0.2, 0.4, 0.6, 0.8}
///   GaussBlur   heat blur at sigma_B in {0.5, 1, 2, 4, 8}, at most W
///   Contrast    deviations from the channel mean scaled by {0.8, 0.6, 0.4, 0.3, 0.2}
///   Pixelate    block means over {2, 3, 4, 5, 6} pixel blocks
ImageTensor corrupt(const ImageTensor& img, CorruptionKind kind, int severity, Stream& rng);

/// Corrupts every image; image i draws from Stream(seed).derive(i).
std::vector<ImageTensor> corrupt_all(std::span<const ImageTensor> imgs, CorruptionKind kind, int severity,
                                     std::uint64_t seed);

/// "gauss_noise-3" style tag.
std::string corruption_tag(CorruptionKind kind, int severity);

struct InfoCurvePoint {
    double t = 0.0;
    double sigma_b = 0.0;
    double mean_ratio = 0.0;
};

/// PNG size of each image blurred at t, relative to its size at t = 0,
/// averaged over the dataset. Images are destandardized, clamped to
/// [0, 1] and quantized to 8 bits before encoding.
std::vector<InfoCurvePoint> info_curve(std::span<const ImageTensor> dataset, const ChannelStats& stats,
                                       const ScheduleConfig& cfg, std::span<const double> t_grid);

/// Encoded PNG size of one standardized image after the same pipeline.
std::size_t png_size(const ImageTensor& standardized, const ChannelStats& stats);

/// Mean |DCT(corrupted) - DCT(clean)| per frequency, averaged over images
/// and channels. grid is height x width, row-major by height frequency.
struct SpectralDelta {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> grid;
    std::string tag;

    double at(std::size_t h, std::size_t w) const { return grid[h * width + w]; }
};

SpectralDelta spectral_delta(std::span<const ImageTensor> clean, std::span<const ImageTensor> corrupted);
SpectralDelta spectral_delta_serial(std::span<const ImageTensor> clean, std::span<const ImageTensor> corrupted);

inline constexpr std::size_t kDefaultAnnuli = 8;

struct Annulus {
    double lower = 0.0;
    double upper = 0.0;
    double center = 0.0;
    std::size_t count = 0;
    double mean = 0.0;
};

/// Equal-width bands of normalized radius sqrt((w/W)^2 + (h/H)^2) over
/// (0, sqrt 2]; the DC term is excluded.
std::vector<Annulus> annulus_summary(const SpectralDelta& delta, std::size_t bands = kDefaultAnnuli);

double coefficient_of_variation(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);

/// Least-squares fit of log y = log a - rate x; r2 is measured on log y.
struct ExpDecayFit {
    double amplitude = 0.0;
    double rate = 0.0;
    double r2 = 0.0;
};

ExpDecayFit fit_exp_decay(std::span<const double> x, std::span<const double> y);

std::string info_curve_csv(std::span<const InfoCurvePoint> points);
std::string spectral_grid_csv(const SpectralDelta& delta);
std::string annulus_csv(std::span<const SpectralDelta> deltas, std::size_t bands = kDefaultAnnuli);

}  // namespace mollify
