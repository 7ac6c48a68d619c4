#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mollify/rng.hpp"
#include "mollify/schedules.hpp"
#include "mollify/tensor.hpp"

namespace mollify {

enum class MollifyMode { None = 0, Noise = 1, Blur = 2 };

std::string_view to_string(MollifyMode mode);

/// The auxiliary transformation applied to one image. t is ignored (and
/// stored as 0) for None; noise_seed only matters for Noise.
struct MollificationParams {
    MollifyMode mode = MollifyMode::None;
    double t = 0.0;
    std::uint64_t noise_seed = 0;
};

struct MollifiedExample {
    ImageTensor image;
    double gamma = 0.0;
    MollificationParams params;
};

/// alpha_t x + sigma_t eps with eps ~ N(0, I) drawn from `rng`.
ImageTensor noise_image(const ImageTensor& img, double t, Stream& rng);

/// Heat-equation blur: each DCT coefficient (h, w) is scaled by
/// exp(-tau pi^2 (w^2/W^2 + h^2/H^2)). tau = 0 is the identity.
ImageTensor heat_blur(const ImageTensor& img, double tau);

/// heat_blur at tau = dissipation_time(blur_sigma(t, cfg, W)).
ImageTensor blur_image(const ImageTensor& img, double t, const ScheduleConfig& cfg);

/// Label decay the schedule assigns to (mode, t).
double label_decay(MollifyMode mode, double t, const ScheduleConfig& cfg);

/// Applies the recorded transform to `img`.
ImageTensor apply_mollification(const ImageTensor& img, const MollificationParams& params,
                                const ScheduleConfig& cfg);

/// Draws (mode, t, noise seed) for image `index` of a batch keyed by batch_seed.
MollificationParams draw_params(std::uint64_t batch_seed, std::size_t index, const ScheduleConfig& cfg);

/// Picks one transform per image. Consumes exactly one draw from `rng`; every
/// image's randomness is derived from that draw and the image index, so the
/// result does not depend on thread count. Images are processed in parallel.
std::vector<MollifiedExample> mollify_batch(std::span<const ImageTensor> imgs, const ScheduleConfig& cfg,
                                            Stream& rng);

/// Single-threaded reference for mollify_batch; identical output.
std::vector<MollifiedExample> mollify_batch_serial(std::span<const ImageTensor> imgs, const ScheduleConfig& cfg,
                                                   Stream& rng);

}  // namespace mollify
