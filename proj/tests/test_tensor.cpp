#include <doctest.h>

#include <cmath>
#include <vector>

#include "mollify/dct.hpp"
#include "mollify/errors.hpp"
#include "mollify/rng.hpp"
#include "mollify/tensor.hpp"
#include "oracles.hpp"

using namespace mollify;

namespace {

ImageTensor random_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed, double scale = 1.0,
                         double offset = 0.0) {
    Stream rng(seed);
    ImageTensor img(h, w, c);
    for (double& v : img.data) v = offset + scale * rng.normal();
    return img;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("channel stats: constant image floors std") {
    std::vector<ImageTensor> ds{ImageTensor(3, 3, 1)};
    const ChannelStats s = compute_channel_stats(ds);
    CHECK(s.mean[0] == 0.0);
    CHECK(s.std[0] == kStdFloor);
}

TEST_CASE("channel stats: symmetric pair") {
    std::vector<ImageTensor> ds{ImageTensor(1, 1, 1, {-1.0}), ImageTensor(1, 1, 1, {1.0})};
    const ChannelStats s = compute_channel_stats(ds);
    CHECK(s.mean[0] == doctest::Approx(0.0));
    CHECK(s.std[0] == doctest::Approx(1.0));
}

TEST_CASE("channel stats match a two-pass oracle") {
    std::vector<ImageTensor> ds;
    for (int i = 0; i < 4; ++i) ds.push_back(random_image(5, 7, 3, 40 + i, 2.0, 0.3 * i));
    const ChannelStats s = compute_channel_stats(ds);
    const oracle::Moments m = oracle::two_pass_moments(ds);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(s.mean[c] == doctest::Approx(m.mean[c]).epsilon(1e-12));
        CHECK(s.std[c] == doctest::Approx(m.std[c]).epsilon(1e-12));
    }
}

TEST_CASE("channel stats errors") {
    std::vector<ImageTensor> empty;
    CHECK_THROWS_AS(compute_channel_stats(empty), DataError);
    std::vector<ImageTensor> mixed{ImageTensor(2, 2, 1), ImageTensor(2, 2, 3)};
    CHECK_THROWS_AS(compute_channel_stats(mixed), DataError);
}

TEST_CASE("standardize and destandardize") {
    SUBCASE("identity stats") {
        const ImageTensor img = random_image(4, 4, 2, 1);
        const ChannelStats unit{{0.0, 0.0}, {1.0, 1.0}};
        CHECK(standardize(img, unit).data == img.data);
        CHECK(destandardize(img, unit).data == img.data);
    }
    SUBCASE("centering") {
        const ChannelStats s{{0.5}, {0.25}};
        CHECK(standardize(ImageTensor(1, 1, 1, {0.5}), s).data[0] == 0.0);
        CHECK(destandardize(ImageTensor(1, 1, 1, {0.0}), s).data[0] == 0.5);
    }
    SUBCASE("round trip") {
        const ImageTensor img = random_image(6, 5, 3, 2, 3.0, 1.0);
        const ChannelStats s{{0.1, -2.0, 4.0}, {0.5, 3.0, 0.01}};
        CHECK(max_abs_diff(destandardize(standardize(img, s), s).data, img.data) <= 1e-6);
    }
    SUBCASE("channel mismatch") {
        const ChannelStats s{{0.0}, {1.0}};
        CHECK_THROWS_AS(standardize(ImageTensor(2, 2, 3), s), DataError);
        CHECK_THROWS_AS(destandardize(ImageTensor(2, 2, 3), s), DataError);
    }
}

TEST_CASE("standardized dataset has zero mean and unit std") {
    std::vector<ImageTensor> ds;
    for (int i = 0; i < 5; ++i) ds.push_back(random_image(8, 8, 3, 90 + i, 0.2, 0.45));
    const ChannelStats s = compute_channel_stats(ds);
    for (ImageTensor& img : ds) img = standardize(img, s);
    const ChannelStats after = compute_channel_stats(ds);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(std::abs(after.mean[c]) <= 1e-6);
        CHECK(std::abs(after.std[c] - 1.0) <= 1e-6);
    }
}

TEST_CASE("dct2d of a constant image is a single DC term") {
    const double c = 0.75;
    ImageTensor img(2, 2, 1, {c, c, c, c});
    const SpectralGrid g = dct2d(img);
    CHECK(g.at(0, 0, 0) == doctest::Approx(2.0 * c).epsilon(1e-15));
    CHECK(std::abs(g.at(0, 1, 0)) < 1e-15);
    CHECK(std::abs(g.at(1, 0, 0)) < 1e-15);
    CHECK(std::abs(g.at(1, 1, 0)) < 1e-15);
}

TEST_CASE("dct2d of a 1x1 image is the pixel") {
    ImageTensor img(1, 1, 2, {3.5, -1.25});
    const SpectralGrid g = dct2d(img);
    CHECK(g.coefficients[0] == doctest::Approx(3.5));
    CHECK(g.coefficients[1] == doctest::Approx(-1.25));
}

TEST_CASE("dct2d matches the double-sum oracle") {
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{4, 4}, {3, 5}, {8, 2}}) {
        const ImageTensor img = random_image(h, w, 2, 7 + h * w);
        const SpectralGrid g = dct2d(img);
        for (std::size_t c = 0; c < 2; ++c) {
            const std::vector<double> ref = oracle::naive_dct2(img, c);
            for (std::size_t u = 0; u < h; ++u) {
                for (std::size_t v = 0; v < w; ++v) CHECK(std::abs(g.at(u, v, c) - ref[u * w + v]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("idct2d") {
    SUBCASE("inverts dct2d") {
        const ImageTensor img = random_image(8, 8, 3, 5);
        CHECK(max_abs_diff(idct2d(dct2d(img)).data, img.data) <= 1e-6);
    }
    SUBCASE("zero grid") {
        const ImageTensor out = idct2d(SpectralGrid(4, 3, 2));
        for (double v : out.data) CHECK(v == 0.0);
    }
    SUBCASE("DC only gives a constant image") {
        SpectralGrid g(4, 6, 1);
        g.at(0, 0, 0) = 2.5 * std::sqrt(24.0);
        for (double v : idct2d(g).data) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("property: roundtrip and Parseval on random shapes") {
    Stream rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t h = 1 + rng.below(12);
        const std::size_t w = 1 + rng.below(12);
        const std::size_t c = 1 + rng.below(3);
        const ImageTensor img = random_image(h, w, c, 1000 + trial, 1.0 + rng.uniform() * 5.0);
        const SpectralGrid g = dct2d(img);
        CHECK(max_abs_diff(idct2d(g).data, img.data) <= 1e-6);
        double e_pix = 0.0;
        double e_coef = 0.0;
        for (double v : img.data) e_pix += v * v;
        for (double v : g.coefficients) e_coef += v * v;
        CHECK(std::abs(e_pix - e_coef) <= 1e-6 * e_pix);
    }
}

TEST_CASE("ImageTensor validates its size") {
    CHECK_THROWS(ImageTensor(2, 2, 1, {1.0, 2.0}));
    ImageTensor img(1, 1, 1);
    img.data[0] = std::nan("");
    CHECK_THROWS(img.validate());
}
