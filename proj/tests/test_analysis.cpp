#include <doctest.h>

#include <cmath>
#include <vector>

#include "mollify/analysis.hpp"
#include "mollify/dct.hpp"
#include "mollify/synthetic.hpp"

using namespace mollify;

namespace {

std::vector<ImageTensor> random_images(std::size_t n, std::size_t side, std::size_t channels, std::uint64_t seed) {
    Stream rng(seed);
    std::vector<ImageTensor> out;
    for (std::size_t i = 0; i < n; ++i) {
        ImageTensor img(side, side, channels);
        for (double& v : img.data) v = rng.normal();
        out.push_back(img);
    }
    return out;
}

double channel_std(const ImageTensor& img, std::size_t c) {
    double mean = 0.0;
    for (std::size_t p = 0; p < img.pixels(); ++p) mean += img.data[p * img.channels + c];
    mean /= static_cast<double>(img.pixels());
    double var = 0.0;
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        const double d = img.data[p * img.channels + c] - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(img.pixels()));
}

}  // namespace

TEST_CASE("corruption names") {
    for (CorruptionKind k : kAllCorruptions) CHECK(parse_corruption(to_string(k)) == k);
    CHECK(corruption_tag(CorruptionKind::GaussNoise, 3) == "gauss_noise-3");
    CHECK_THROWS(parse_corruption("fog"));
}

TEST_CASE("severities outside 1..5 are rejected") {
    const ImageTensor img = random_images(1, 8, 1, 1)[0];
    Stream rng(1);
    for (CorruptionKind k : kAllCorruptions) {
        CHECK_THROWS(corrupt(img, k, 0, rng));
        CHECK_THROWS(corrupt(img, k, 6, rng));
    }
}

TEST_CASE("contrast scales per-channel std") {
    const ImageTensor img = random_images(1, 8, 3, 2)[0];
    Stream rng(2);
    const double factors[] = {0.8, 0.6, 0.4, 0.3, 0.2};
    for (int s = 1; s <= 5; ++s) {
        const ImageTensor out = corrupt(img, CorruptionKind::Contrast, s, rng);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(channel_std(out, c) - factors[s - 1] * channel_std(img, c)) <= 1e-6);
        }
    }
}

TEST_CASE("pixelate") {
    Stream rng(3);
    const ImageTensor img = random_images(1, 6, 2, 3)[0];
    const ImageTensor flat = corrupt(img, CorruptionKind::Pixelate, 5, rng);  // block 6 = width
    for (std::size_t c = 0; c < 2; ++c) CHECK(channel_std(flat, c) < 1e-12);
    const ImageTensor blocks = corrupt(img, CorruptionKind::Pixelate, 1, rng);
    CHECK(blocks.at(0, 0, 1) == blocks.at(1, 1, 1));
    const double mean = (img.at(0, 0, 1) + img.at(0, 1, 1) + img.at(1, 0, 1) + img.at(1, 1, 1)) / 4.0;
    CHECK(blocks.at(0, 1, 1) == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("gauss noise has the tabulated scale") {
    const ImageTensor img(32, 32, 1);
    Stream rng(4);
    const ImageTensor out = corrupt(img, CorruptionKind::GaussNoise, 4, rng);
    CHECK(channel_std(out, 0) == doctest::Approx(0.6).epsilon(0.08));
}

TEST_CASE("blur keeps the channel mean") {
    const ImageTensor img = random_images(1, 8, 1, 5)[0];
    Stream rng(5);
    const ImageTensor out = corrupt(img, CorruptionKind::GaussBlur, 3, rng);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        a += img.data[i];
        b += out.data[i];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(channel_std(out, 0) < channel_std(img, 0));
}

TEST_CASE("corrupt_all is deterministic per image") {
    const auto imgs = random_images(9, 8, 1, 6);
    const auto a = corrupt_all(imgs, CorruptionKind::GaussNoise, 2, 77);
    const auto b = corrupt_all(imgs, CorruptionKind::GaussNoise, 2, 77);
    for (std::size_t i = 0; i < imgs.size(); ++i) CHECK(a[i].data == b[i].data);
    const auto tail = corrupt_all(std::span(imgs).subspan(0, 3), CorruptionKind::GaussNoise, 2, 77);
    CHECK(tail[2].data == a[2].data);
}

TEST_CASE("info curve starts at one") {
    const Dataset ds = pink_noise_dataset(6, 16, 16, 1, 3);
    const ChannelStats stats = compute_channel_stats(ds.images);
    const Dataset std_ds = standardize_dataset(ds, stats);
    const std::vector<double> grid{0.0, 0.5, 1.0};
    const auto curve = info_curve(std_ds.images, stats, ScheduleConfig{}, grid);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].mean_ratio == 1.0);
    CHECK(curve[0].sigma_b == doctest::Approx(0.3));
    CHECK(curve[2].mean_ratio < curve[0].mean_ratio);
    CHECK_THROWS(info_curve(std_ds.images, stats, ScheduleConfig{}, std::vector<double>{0.5, 1.0}));
    CHECK(info_curve_csv(curve).find('\n') != std::string::npos);
}

TEST_CASE("spectral_delta") {
    const auto clean = random_images(5, 8, 2, 7);
    SpectralDelta zero = spectral_delta(clean, clean);
    for (double v : zero.grid) CHECK(v == 0.0);

    ImageTensor d(8, 8, 2);
    Stream rng(8);
    for (double& v : d.data) v = rng.normal();
    std::vector<ImageTensor> plus = clean;
    std::vector<ImageTensor> minus = clean;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        for (std::size_t k = 0; k < d.size(); ++k) {
            plus[i].data[k] += d.data[k];
            minus[i].data[k] -= d.data[k];
        }
    }
    const SpectralDelta p = spectral_delta(clean, plus);
    const SpectralDelta m = spectral_delta(clean, minus);
    for (std::size_t k = 0; k < p.grid.size(); ++k) CHECK(p.grid[k] == doctest::Approx(m.grid[k]).epsilon(1e-12));

    // Against a direct computation.
    const SpectralGrid dd = dct2d(d);
    for (std::size_t h = 0; h < 8; ++h) {
        for (std::size_t w = 0; w < 8; ++w) {
            const double expect = (std::abs(dd.at(h, w, 0)) + std::abs(dd.at(h, w, 1))) / 2.0;
            CHECK(p.at(h, w) == doctest::Approx(expect).epsilon(1e-10));
        }
    }

    const SpectralDelta s = spectral_delta_serial(clean, plus);
    for (std::size_t k = 0; k < p.grid.size(); ++k) CHECK(std::abs(p.grid[k] - s.grid[k]) <= 1e-12);

    CHECK_THROWS(spectral_delta(clean, std::span(plus).subspan(0, 4)));
}

TEST_CASE("spectral_delta ignores image order") {
    const auto clean = random_images(20, 8, 1, 9);
    const auto noisy = corrupt_all(clean, CorruptionKind::GaussNoise, 3, 5);
    std::vector<ImageTensor> rc(clean.rbegin(), clean.rend());
    std::vector<ImageTensor> rn(noisy.rbegin(), noisy.rend());
    const SpectralDelta a = spectral_delta(clean, noisy);
    const SpectralDelta b = spectral_delta(rc, rn);
    for (std::size_t k = 0; k < a.grid.size(); ++k) CHECK(std::abs(a.grid[k] - b.grid[k]) <= 1e-12);
}

TEST_CASE("annulus summary") {
    SpectralDelta d;
    d.height = 8;
    d.width = 8;
    d.grid.assign(64, 2.0);
    d.grid[0] = 100.0;  // DC is excluded
    const auto rings = annulus_summary(d, 4);
    REQUIRE(rings.size() == 4);
    std::size_t total = 0;
    for (const Annulus& a : rings) {
        total += a.count;
        if (a.count > 0) CHECK(a.mean == 2.0);
    }
    CHECK(total == 63);
    CHECK(rings.back().upper == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("statistics helpers") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::exp(-0.7 * v));
    const ExpDecayFit fit = fit_exp_decay(x, y);
    CHECK(fit.rate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(x, std::vector<double>{1, 3, 5, 7, 9}) == doctest::Approx(1.0));
    CHECK(pearson(x, std::vector<double>{9, 7, 5, 3, 1}) == doctest::Approx(-1.0));
    CHECK(coefficient_of_variation(std::vector<double>{2, 2, 2}) == 0.0);
    CHECK(coefficient_of_variation(std::vector<double>{1, 3}) == doctest::Approx(0.5));
}
