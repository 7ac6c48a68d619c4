#include "mollify/schedules.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mollify {

namespace {

void check_temperature(double t, const char* where) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument(std::string(where) + ": temperature must lie in [0, 1], got " +
                                    std::to_string(t));
    }
}

}  // namespace

void ScheduleConfig::validate(std::size_t image_width) const {
    if (!(sigma_min > 0.0)) throw std::invalid_argument("schedule: sigma_min must be positive");
    if (sigma_max || image_width > 0) {
        const double hi = resolved_sigma_max(image_width);
        if (!(sigma_min < hi)) throw std::invalid_argument("schedule: sigma_min must be below sigma_max");
    }
    if (!(k_noise > 0.0) || !(k_blur > 0.0)) throw std::invalid_argument("schedule: k must be positive");
    if (!(beta_alpha > 0.0) || !(beta_beta > 0.0)) {
        throw std::invalid_argument("schedule: Beta prior shapes must be positive");
    }
    double total = 0.0;
    for (double p : mode_probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("schedule: mode probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("schedule: mode probabilities must sum to 1");
}

NoiseMix alpha_sigma(double t) {
    check_temperature(t, "alpha_sigma");
    // Exact endpoints; cos(pi/2) is not exactly zero in floating point.
    if (t == 0.0) return {1.0, 0.0};
    if (t == 1.0) return {0.0, 1.0};
    const double angle = t * std::numbers::pi / 2.0;
    return {std::cos(angle), std::sin(angle)};
}

double snr(double t) {
    const auto [alpha, sigma] = alpha_sigma(t);
    if (sigma == 0.0) return std::numeric_limits<double>::infinity();
    return (alpha * alpha) / (sigma * sigma);
}

double gamma_noise(double t, double k) {
    check_temperature(t, "gamma_noise");
    if (!(k > 0.0)) throw std::invalid_argument("gamma_noise: k must be positive");
    // sin^2(t pi/2) = (1 - sin(pi (1/2 - t))) / 2, exact at t = 0, 1/2, 1.
    const double sigma_sq = 0.5 - 0.5 * std::sin(std::numbers::pi * (0.5 - t));
    return std::pow(sigma_sq, k);
}

double gamma_blur(double t, double k) {
    check_temperature(t, "gamma_blur");
    if (!(k > 0.0)) throw std::invalid_argument("gamma_blur: k must be positive");
    return std::pow(t, k);
}

double blur_sigma(double t, const ScheduleConfig& cfg, std::size_t image_width) {
    check_temperature(t, "blur_sigma");
    const double lo = cfg.sigma_min;
    const double hi = cfg.resolved_sigma_max(image_width);
    if (t == 0.0) return lo;
    if (t == 1.0) return hi;
    return std::exp((1.0 - t) * std::log(lo) + t * std::log(hi));
}

double dissipation_time(double sigma_b) {
    if (!(sigma_b >= 0.0)) throw std::invalid_argument("dissipation_time: sigma_b must be nonnegative");
    return sigma_b * sigma_b / 2.0;
}

double sample_temperature(Stream& rng, const ScheduleConfig& cfg) {
    return rng.beta(cfg.beta_alpha, cfg.beta_beta);
}

}  // namespace mollify
