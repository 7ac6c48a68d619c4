#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "mollify/rng.hpp"

namespace mollify {

/// Hyperparameters of the noise, blur and label-decay schedules.
struct ScheduleConfig {
    double sigma_min = 0.3;
    /// Largest blur scale in pixels; unset means "image width".
    std::optional<double> sigma_max;
    double k_noise = 1.0;
    double k_blur = 1.0;
    double beta_alpha = 1.0;
    double beta_beta = 2.0;
    /// Probabilities of {none, noise, blur}.
    std::array<double, 3> mode_probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    double resolved_sigma_max(std::size_t image_width) const {
        return sigma_max.value_or(static_cast<double>(image_width));
    }

    /// Throws std::invalid_argument naming the first violated constraint.
    /// When sigma_max is unset the ordering check uses `image_width`.
    void validate(std::size_t image_width = 0) const;
};

struct NoiseMix {
    double alpha;
    double sigma;
};

/// Variance-preserving cosine mix: alpha = cos(t pi/2), sigma = sin(t pi/2).
NoiseMix alpha_sigma(double t);

/// alpha^2 / sigma^2; +infinity at t = 0.
double snr(double t);

/// Noise label decay (1 / (1 + snr))^k, evaluated as sin(t pi/2)^(2k).
double gamma_noise(double t, double k);

/// Blur label decay t^k.
double gamma_blur(double t, double k);

/// Log-linear interpolation between sigma_min and sigma_max.
double blur_sigma(double t, const ScheduleConfig& cfg, std::size_t image_width);

/// Heat-equation time equivalent to a Gaussian of scale sigma_b.
double dissipation_time(double sigma_b);

/// Beta(beta_alpha, beta_beta) draw.
double sample_temperature(Stream& rng, const ScheduleConfig& cfg);

}  // namespace mollify
