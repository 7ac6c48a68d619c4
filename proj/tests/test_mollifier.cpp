#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "mollify/dct.hpp"
#include "mollify/mollifier.hpp"
#include "oracles.hpp"

using namespace mollify;

namespace {

ImageTensor gaussian_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
    Stream rng(seed);
    ImageTensor img(h, w, c);
    for (double& v : img.data) v = rng.normal();
    return img;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

double non_dc_energy(const ImageTensor& img) {
    const SpectralGrid g = dct2d(img);
    double e = 0.0;
    for (std::size_t h = 0; h < g.height; ++h) {
        for (std::size_t w = 0; w < g.width; ++w) {
            if (h == 0 && w == 0) continue;
            for (std::size_t c = 0; c < g.channels; ++c) e += g.at(h, w, c) * g.at(h, w, c);
        }
    }
    return e;
}

}  // namespace

TEST_CASE("noise_image at t = 0 is the identity") {
    const ImageTensor img = gaussian_image(8, 8, 3, 1);
    Stream rng(2);
    CHECK(noise_image(img, 0.0, rng).data == img.data);
}

TEST_CASE("noise_image at t = 1 is independent of the input") {
    ImageTensor img = gaussian_image(64, 64, 1, 3);
    Stream rng(4);
    const ImageTensor out = noise_image(img, 1.0, rng);
    std::vector<double> x(img.data.begin(), img.data.end());
    double mx = 0, my = 0, sxy = 0, sxx = 0, syy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += img.data[i];
        my += out.data[i];
    }
    mx /= n;
    my /= n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (img.data[i] - mx) * (out.data[i] - my);
        sxx += (img.data[i] - mx) * (img.data[i] - mx);
        syy += (out.data[i] - my) * (out.data[i] - my);
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.05);
}

TEST_CASE("noise_image preserves the second moment of a standardized image") {
    const ImageTensor raw = gaussian_image(256, 256, 1, 5);
    std::vector<ImageTensor> one{raw};
    const ImageTensor img = standardize(raw, compute_channel_stats(one));
    for (double t : {0.25, 0.5, 0.75}) {
        Stream rng(6);
        const ImageTensor out = noise_image(img, t, rng);
        double m2 = 0.0;
        for (double v : out.data) m2 += v * v;
        m2 /= static_cast<double>(out.size());
        CHECK(std::abs(m2 - 1.0) < 0.05);
    }
    Stream rng(0);
    CHECK_THROWS(noise_image(img, 1.5, rng));
}

TEST_CASE("heat_blur with tau = 0 is the identity") {
    const ImageTensor img = gaussian_image(9, 7, 2, 7);
    CHECK(max_abs_diff(heat_blur(img, 0.0), img) <= 1e-6);
    CHECK_THROWS(heat_blur(img, -0.1));
}

TEST_CASE("heat_blur is a semigroup") {
    for (int i = 0; i < 5; ++i) {
        const ImageTensor img = gaussian_image(16, 16, 3, 100 + i);
        const double t1 = 0.7 + i;
        const double t2 = 2.1 * (i + 1);
        CHECK(max_abs_diff(heat_blur(heat_blur(img, t1), t2), heat_blur(img, t1 + t2)) <= 1e-5);
    }
}

TEST_CASE("heat_blur multiplies each DCT coefficient by the heat kernel") {
    const ImageTensor img = gaussian_image(6, 10, 1, 8);
    const double tau = 0.8;
    const SpectralGrid before = dct2d(img);
    const SpectralGrid after = dct2d(heat_blur(img, tau));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (std::size_t h = 0; h < 6; ++h) {
        for (std::size_t w = 0; w < 10; ++w) {
            const double gain = std::exp(-tau * pi2 * (w * w / 100.0 + h * h / 36.0));
            CHECK(after.at(h, w, 0) == doctest::Approx(gain * before.at(h, w, 0)).epsilon(1e-9));
        }
    }
    CHECK(after.at(0, 0, 0) == doctest::Approx(before.at(0, 0, 0)).epsilon(1e-14));
}

TEST_CASE("blur_image at t = 1 removes nearly all non-DC energy") {
    // Lowest nonzero frequency at tau = W^2/2 keeps amplitude exp(-pi^2/2) ~ 0.0072.
    const double floor_gain = std::exp(-std::numbers::pi * std::numbers::pi / 2.0);
    CHECK(floor_gain == doctest::Approx(0.0072).epsilon(0.01));
    const ImageTensor img = gaussian_image(16, 16, 3, 9);
    const ScheduleConfig cfg;
    const ImageTensor out = blur_image(img, 1.0, cfg);
    CHECK(non_dc_energy(out) * 100.0 <= non_dc_energy(img));
    CHECK(non_dc_energy(out) <= floor_gain * floor_gain * non_dc_energy(img) * (1.0 + 1e-9));
}

TEST_CASE("property: blur is linear and never amplifies any frequency") {
    Stream rng(10);
    const ScheduleConfig cfg;
    for (int trial = 0; trial < 10; ++trial) {
        const ImageTensor x = gaussian_image(8, 12, 2, 200 + trial);
        const ImageTensor y = gaussian_image(8, 12, 2, 300 + trial);
        const double a = rng.normal();
        const double b = rng.normal();
        const double t = rng.uniform();
        ImageTensor mix = x;
        for (std::size_t i = 0; i < mix.size(); ++i) mix.data[i] = a * x.data[i] + b * y.data[i];
        const ImageTensor bx = blur_image(x, t, cfg);
        const ImageTensor by = blur_image(y, t, cfg);
        const ImageTensor bm = blur_image(mix, t, cfg);
        for (std::size_t i = 0; i < mix.size(); ++i) CHECK(std::abs(bm.data[i] - (a * bx.data[i] + b * by.data[i])) <= 1e-6);

        const SpectralGrid g0 = dct2d(x);
        const SpectralGrid g1 = dct2d(bx);
        for (std::size_t k = 0; k < g0.coefficients.size(); ++k) {
            CHECK(std::abs(g1.coefficients[k]) <= std::abs(g0.coefficients[k]) + 1e-9);
        }
    }
}

TEST_CASE("mollify_batch with forced None returns the inputs") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 20; ++i) imgs.push_back(gaussian_image(8, 8, 1, 400 + i));
    ScheduleConfig cfg;
    cfg.mode_probs = {1.0, 0.0, 0.0};
    Stream rng(11);
    const auto out = mollify_batch(imgs, cfg, rng);
    REQUIRE(out.size() == imgs.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].image.data == imgs[i].data);
        CHECK(out[i].gamma == 0.0);
        CHECK(out[i].params.mode == MollifyMode::None);
    }
}

TEST_CASE("mollify_batch mode frequencies follow mode_probs") {
    std::vector<ImageTensor> imgs(30000, ImageTensor(2, 2, 1));
    ScheduleConfig cfg;
    Stream rng(12);
    const auto out = mollify_batch(imgs, cfg, rng);
    std::array<double, 3> counts{};
    for (const auto& ex : out) counts[static_cast<int>(ex.params.mode)] += 1.0;
    for (double c : counts) CHECK(std::abs(c / 30000.0 - 1.0 / 3.0) < 0.01);
}

TEST_CASE("mollify_batch replays, matches the serial reference and the schedule") {
    std::vector<ImageTensor> imgs;
    for (int i = 0; i < 64; ++i) imgs.push_back(gaussian_image(8, 8, 2, 500 + i));
    ScheduleConfig cfg;
    cfg.k_noise = 0.7;
    cfg.k_blur = 1.6;
    Stream r1(13);
    Stream r2(13);
    Stream r3(13);
    const auto a = mollify_batch(imgs, cfg, r1);
    const auto b = mollify_batch(imgs, cfg, r2);
    const auto c = mollify_batch_serial(imgs, cfg, r3);
    CHECK(r1.position() == 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].image.data == b[i].image.data);
        CHECK(a[i].image.data == c[i].image.data);
        CHECK(a[i].gamma == c[i].gamma);
        const auto& p = a[i].params;
        CHECK((p.t >= 0.0 && p.t <= 1.0));
        CHECK(a[i].gamma == label_decay(p.mode, p.t, cfg));
        if (p.mode == MollifyMode::None) CHECK(a[i].gamma == 0.0);
        if (p.mode == MollifyMode::Noise) CHECK(a[i].gamma == gamma_noise(p.t, 0.7));
        if (p.mode == MollifyMode::Blur) CHECK(a[i].gamma == gamma_blur(p.t, 1.6));
        CHECK(apply_mollification(imgs[i], p, cfg).data == a[i].image.data);
    }
}

TEST_CASE("mollify_batch edge cases") {
    Stream rng(14);
    std::vector<ImageTensor> none;
    CHECK(mollify_batch(none, ScheduleConfig{}, rng).empty());
    std::vector<ImageTensor> mixed{ImageTensor(2, 2, 1), ImageTensor(3, 2, 1)};
    CHECK_THROWS(mollify_batch(mixed, ScheduleConfig{}, rng));
}
