#include "mollify/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mollify/dct.hpp"

namespace mollify {

std::string_view to_string(MollifyMode mode) {
    switch (mode) {
        case MollifyMode::None: return "none";
        case MollifyMode::Noise: return "noise";
        case MollifyMode::Blur: return "blur";
    }
    return "unknown";
}

ImageTensor noise_image(const ImageTensor& img, double t, Stream& rng) {
    const auto [alpha, sigma] = alpha_sigma(t);
    ImageTensor out = img;
    if (sigma == 0.0) return out;
    for (double& v : out.data) v = alpha * v + sigma * rng.normal();
    return out;
}

ImageTensor heat_blur(const ImageTensor& img, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("heat_blur: tau must be nonnegative");
    if (tau == 0.0) return img;
    const DctPlan plan(img.height, img.width);
    SpectralGrid grid = plan.forward(img);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double hh = static_cast<double>(img.height);
    const double ww = static_cast<double>(img.width);
    for (std::size_t h = 0; h < img.height; ++h) {
        for (std::size_t w = 0; w < img.width; ++w) {
            if (h == 0 && w == 0) continue;
            const double fw = static_cast<double>(w) / ww;
            const double fh = static_cast<double>(h) / hh;
            const double gain = std::exp(-tau * pi2 * (fw * fw + fh * fh));
            for (std::size_t c = 0; c < img.channels; ++c) grid.at(h, w, c) *= gain;
        }
    }
    return plan.inverse(grid);
}

ImageTensor blur_image(const ImageTensor& img, double t, const ScheduleConfig& cfg) {
    return heat_blur(img, dissipation_time(blur_sigma(t, cfg, img.width)));
}

double label_decay(MollifyMode mode, double t, const ScheduleConfig& cfg) {
    switch (mode) {
        case MollifyMode::None: return 0.0;
        case MollifyMode::Noise: return gamma_noise(t, cfg.k_noise);
        case MollifyMode::Blur: return gamma_blur(t, cfg.k_blur);
    }
    return 0.0;
}

ImageTensor apply_mollification(const ImageTensor& img, const MollificationParams& params,
                                const ScheduleConfig& cfg) {
    switch (params.mode) {
        case MollifyMode::None: return img;
        case MollifyMode::Noise: {
            Stream noise(params.noise_seed);
            return noise_image(img, params.t, noise);
        }
        case MollifyMode::Blur: return blur_image(img, params.t, cfg);
    }
    return img;
}

MollificationParams draw_params(std::uint64_t batch_seed, std::size_t index, const ScheduleConfig& cfg) {
    Stream rng = Stream(batch_seed).derive(index);
    MollificationParams params;
    const double u = rng.uniform();
    if (u < cfg.mode_probs[0]) {
        params.mode = MollifyMode::None;
    } else if (u < cfg.mode_probs[0] + cfg.mode_probs[1]) {
        params.mode = MollifyMode::Noise;
    } else {
        params.mode = MollifyMode::Blur;
    }
    // mode_probs[2] == 0 can still land here through rounding of the prefix sum.
    if (params.mode == MollifyMode::Blur && cfg.mode_probs[2] == 0.0) {
        params.mode = cfg.mode_probs[1] > 0.0 ? MollifyMode::Noise : MollifyMode::None;
    }
    if (params.mode == MollifyMode::None) return params;
    params.t = sample_temperature(rng, cfg);
    params.noise_seed = rng.next_u64();
    return params;
}

namespace {

MollifiedExample mollify_one(const ImageTensor& img, std::uint64_t batch_seed, std::size_t index,
                             const ScheduleConfig& cfg) {
    MollifiedExample ex;
    ex.params = draw_params(batch_seed, index, cfg);
    ex.image = apply_mollification(img, ex.params, cfg);
    ex.gamma = label_decay(ex.params.mode, ex.params.t, cfg);
    return ex;
}

void check_batch(std::span<const ImageTensor> imgs, const ScheduleConfig& cfg) {
    if (imgs.empty()) return;
    cfg.validate(imgs.front().width);
    for (const ImageTensor& img : imgs) {
        if (!img.same_shape(imgs.front())) throw std::invalid_argument("mollify_batch: images differ in shape");
    }
}

}  // namespace

std::vector<MollifiedExample> mollify_batch(std::span<const ImageTensor> imgs, const ScheduleConfig& cfg,
                                            Stream& rng) {
    const std::uint64_t batch_seed = rng.next_u64();
    check_batch(imgs, cfg);
    std::vector<MollifiedExample> out(imgs.size());
    const auto n = static_cast<std::int64_t>(imgs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = mollify_one(imgs[i], batch_seed, static_cast<std::size_t>(i), cfg);
    }
    return out;
}

std::vector<MollifiedExample> mollify_batch_serial(std::span<const ImageTensor> imgs, const ScheduleConfig& cfg,
                                                   Stream& rng) {
    const std::uint64_t batch_seed = rng.next_u64();
    check_batch(imgs, cfg);
    std::vector<MollifiedExample> out;
    out.reserve(imgs.size());
    for (std::size_t i = 0; i < imgs.size(); ++i) out.push_back(mollify_one(imgs[i], batch_seed, i, cfg));
    return out;
}

}  // namespace mollify
