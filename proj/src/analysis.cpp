#include "mollify/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "mollify/dct.hpp"
#include "mollify/errors.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/png.hpp"

namespace mollify {

namespace {

constexpr double kNoiseScale[] = {0.1, 0.2, 0.4, 0.6, 0.8};
constexpr double kBlurSigma[] = {0.5, 1.0, 2.0, 4.0, 8.0};
constexpr double kContrast[] = {0.8, 0.6, 0.4, 0.3, 0.2};
constexpr std::size_t kPixelBlock[] = {2, 3, 4, 5, 6};

ImageTensor pixelate(const ImageTensor& img, std::size_t block) {
    ImageTensor out(img.height, img.width, img.channels);
    for (std::size_t h0 = 0; h0 < img.height; h0 += block) {
        const std::size_t h1 = std::min(img.height, h0 + block);
        for (std::size_t w0 = 0; w0 < img.width; w0 += block) {
            const std::size_t w1 = std::min(img.width, w0 + block);
            const double count = static_cast<double>((h1 - h0) * (w1 - w0));
            for (std::size_t c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (std::size_t h = h0; h < h1; ++h) {
                    for (std::size_t w = w0; w < w1; ++w) acc += img.at(h, w, c);
                }
                const double mean = acc / count;
                for (std::size_t h = h0; h < h1; ++h) {
                    for (std::size_t w = w0; w < w1; ++w) out.at(h, w, c) = mean;
                }
            }
        }
    }
    return out;
}

ImageTensor contrast(const ImageTensor& img, double factor) {
    ImageTensor out = img;
    const double n = static_cast<double>(img.pixels());
    for (std::size_t c = 0; c < img.channels; ++c) {
        double mean = 0.0;
        for (std::size_t p = 0; p < img.pixels(); ++p) mean += img.data[p * img.channels + c];
        mean /= n;
        for (std::size_t p = 0; p < img.pixels(); ++p) {
            double& v = out.data[p * img.channels + c];
            v = (v - mean) * factor + mean;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::GaussNoise: return "gauss_noise";
        case CorruptionKind::GaussBlur: return "gauss_blur";
        case CorruptionKind::Contrast: return "contrast";
        case CorruptionKind::Pixelate: return "pixelate";
    }
    return "unknown";
}

CorruptionKind parse_corruption(std::string_view name) {
    for (CorruptionKind kind : kAllCorruptions) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown corruption '" + std::string(name) + "'");
}

std::string corruption_tag(CorruptionKind kind, int severity) {
    return std::string(to_string(kind)) + "-" + std::to_string(severity);
}

ImageTensor corrupt(const ImageTensor& img, CorruptionKind kind, int severity, Stream& rng) {
    if (severity < 1 || severity > kMaxSeverity) {
        throw std::invalid_argument("corrupt: severity must lie in 1..5, got " + std::to_string(severity));
    }
    const auto s = static_cast<std::size_t>(severity - 1);
    switch (kind) {
        case CorruptionKind::GaussNoise: {
            ImageTensor out = img;
            for (double& v : out.data) v += kNoiseScale[s] * rng.normal();
            return out;
        }
        case CorruptionKind::GaussBlur: {
            const double sigma = std::min(kBlurSigma[s], static_cast<double>(img.width));
            return heat_blur(img, dissipation_time(sigma));
        }
        case CorruptionKind::Contrast: return contrast(img, kContrast[s]);
        case CorruptionKind::Pixelate: return pixelate(img, kPixelBlock[s]);
    }
    throw std::invalid_argument("corrupt: unknown corruption kind");
}

std::vector<ImageTensor> corrupt_all(std::span<const ImageTensor> imgs, CorruptionKind kind, int severity,
                                     std::uint64_t seed) {
    if (severity < 1 || severity > kMaxSeverity) {
        throw std::invalid_argument("corrupt: severity must lie in 1..5, got " + std::to_string(severity));
    }
    std::vector<ImageTensor> out(imgs.size());
    const Stream root(seed);
    const auto n = static_cast<std::int64_t>(imgs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        Stream rng = root.derive(static_cast<std::uint64_t>(i));
        out[i] = corrupt(imgs[i], kind, severity, rng);
    }
    return out;
}

std::size_t png_size(const ImageTensor& standardized, const ChannelStats& stats) {
    const ImageTensor pixels = destandardize(standardized, stats);
    const std::vector<std::uint8_t> samples = quantize_unit(pixels);
    return encode_png(samples, pixels.height, pixels.width, pixels.channels).size();
}

std::vector<InfoCurvePoint> info_curve(std::span<const ImageTensor> dataset, const ChannelStats& stats,
                                       const ScheduleConfig& cfg, std::span<const double> t_grid) {
    if (dataset.empty()) throw std::invalid_argument("info_curve: empty dataset");
    if (std::find(t_grid.begin(), t_grid.end(), 0.0) == t_grid.end()) {
        throw std::invalid_argument("info_curve: t grid must contain 0");
    }
    const std::size_t n = dataset.size();
    const std::size_t width = dataset.front().width;
    cfg.validate(width);

    // sizes[i * T + k] is the PNG size of image i blurred at t_grid[k].
    const std::size_t steps = t_grid.size();
    std::vector<std::size_t> sizes(n * steps, 0);
    std::vector<std::int64_t> failed(n, -1);
    const auto total = static_cast<std::int64_t>(n * steps);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t job = 0; job < total; ++job) {
        const auto i = static_cast<std::size_t>(job) / steps;
        const auto k = static_cast<std::size_t>(job) % steps;
        try {
            sizes[i * steps + k] = png_size(blur_image(dataset[i], t_grid[k], cfg), stats);
        } catch (const std::exception&) {
            failed[i] = static_cast<std::int64_t>(k);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (failed[i] >= 0) throw DataError("info_curve: PNG encoding failed for image " + std::to_string(i));
    }

    const std::size_t zero = static_cast<std::size_t>(std::find(t_grid.begin(), t_grid.end(), 0.0) - t_grid.begin());
    std::vector<InfoCurvePoint> points;
    points.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += static_cast<double>(sizes[i * steps + k]) / static_cast<double>(sizes[i * steps + zero]);
        }
        points.push_back({t_grid[k], blur_sigma(t_grid[k], cfg, width), acc / static_cast<double>(n)});
    }
    return points;
}

namespace {

void check_pairs(std::span<const ImageTensor> clean, std::span<const ImageTensor> corrupted) {
    if (clean.size() != corrupted.size()) throw DataError("spectral_delta: sequences differ in length");
    if (clean.empty()) throw DataError("spectral_delta: empty sequences");
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (!clean[i].same_shape(clean.front()) || !corrupted[i].same_shape(clean.front())) {
            throw DataError("spectral_delta: shape mismatch at image " + std::to_string(i));
        }
    }
}

// Channel-averaged |DCT(a) - DCT(b)| added into acc (H x W).
void add_abs_delta(const DctPlan& plan, const ImageTensor& a, const ImageTensor& b, std::vector<double>& acc) {
    ImageTensor diff = b;
    for (std::size_t k = 0; k < diff.data.size(); ++k) diff.data[k] -= a.data[k];
    const SpectralGrid g = plan.forward(diff);
    const double inv_c = 1.0 / static_cast<double>(g.channels);
    for (std::size_t h = 0; h < g.height; ++h) {
        for (std::size_t w = 0; w < g.width; ++w) {
            double s = 0.0;
            for (std::size_t c = 0; c < g.channels; ++c) s += std::abs(g.at(h, w, c));
            acc[h * g.width + w] += s * inv_c;
        }
    }
}

SpectralDelta finish_delta(const ImageTensor& shape, std::vector<double> acc, std::size_t n) {
    SpectralDelta out;
    out.height = shape.height;
    out.width = shape.width;
    for (double& v : acc) v /= static_cast<double>(n);
    out.grid = std::move(acc);
    return out;
}

}  // namespace

// The DCT is linear, so DCT(b) - DCT(a) is computed as DCT(b - a).
SpectralDelta spectral_delta(std::span<const ImageTensor> clean, std::span<const ImageTensor> corrupted) {
    check_pairs(clean, corrupted);
    const ImageTensor& shape = clean.front();
    const DctPlan plan(shape.height, shape.width);
    const std::size_t cells = shape.height * shape.width;
    const std::size_t n = clean.size();
    // Fixed chunking keeps the floating-point sum independent of thread count.
    const std::size_t chunks = std::min<std::size_t>(16, n);
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(cells, 0.0));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(chunks); ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
            add_abs_delta(plan, clean[i], corrupted[i], partial[c]);
        }
    }
    std::vector<double> acc(cells, 0.0);
    for (const auto& p : partial) {
        for (std::size_t k = 0; k < cells; ++k) acc[k] += p[k];
    }
    return finish_delta(shape, std::move(acc), n);
}

SpectralDelta spectral_delta_serial(std::span<const ImageTensor> clean, std::span<const ImageTensor> corrupted) {
    check_pairs(clean, corrupted);
    const ImageTensor& shape = clean.front();
    const DctPlan plan(shape.height, shape.width);
    std::vector<double> acc(shape.height * shape.width, 0.0);
    for (std::size_t i = 0; i < clean.size(); ++i) add_abs_delta(plan, clean[i], corrupted[i], acc);
    return finish_delta(shape, std::move(acc), clean.size());
}

std::vector<Annulus> annulus_summary(const SpectralDelta& delta, std::size_t bands) {
    if (bands == 0) throw std::invalid_argument("annulus_summary: need at least one band");
    const double r_max = std::sqrt(2.0);
    const double step = r_max / static_cast<double>(bands);
    std::vector<Annulus> out(bands);
    std::vector<double> sums(bands, 0.0);
    for (std::size_t b = 0; b < bands; ++b) {
        out[b].lower = step * static_cast<double>(b);
        out[b].upper = step * static_cast<double>(b + 1);
        out[b].center = 0.5 * (out[b].lower + out[b].upper);
    }
    for (std::size_t h = 0; h < delta.height; ++h) {
        for (std::size_t w = 0; w < delta.width; ++w) {
            if (h == 0 && w == 0) continue;
            const double fh = static_cast<double>(h) / static_cast<double>(delta.height);
            const double fw = static_cast<double>(w) / static_cast<double>(delta.width);
            const double r = std::sqrt(fh * fh + fw * fw);
            const auto b = std::min(bands - 1, static_cast<std::size_t>(std::ceil(r / step)) - 1);
            sums[b] += delta.at(h, w);
            out[b].count += 1;
        }
    }
    for (std::size_t b = 0; b < bands; ++b) {
        if (out[b].count > 0) out[b].mean = sums[b] / static_cast<double>(out[b].count);
    }
    return out;
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("coefficient_of_variation: no values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var) / std::abs(mean);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need two equal-length series");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

ExpDecayFit fit_exp_decay(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_exp_decay: need two equal-length series");
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::invalid_argument("fit_exp_decay: values must be positive");
        ly[i] = std::log(y[i]);
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (ly[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    ExpDecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(my - slope * mx);
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

std::string info_curve_csv(std::span<const InfoCurvePoint> points) {
    std::ostringstream out;
    out << "t,sigma_b,mean_ratio\n";
    char buf[128];
    for (const InfoCurvePoint& p : points) {
        std::snprintf(buf, sizeof buf, "%.6f,%.10g,%.10f\n", p.t, p.sigma_b, p.mean_ratio);
        out << buf;
    }
    return out.str();
}

std::string spectral_grid_csv(const SpectralDelta& delta) {
    std::ostringstream out;
    char buf[48];
    for (std::size_t h = 0; h < delta.height; ++h) {
        for (std::size_t w = 0; w < delta.width; ++w) {
            std::snprintf(buf, sizeof buf, "%s%.10g", w == 0 ? "" : ",", delta.at(h, w));
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string annulus_csv(std::span<const SpectralDelta> deltas, std::size_t bands) {
    std::ostringstream out;
    out << "tag,band,lower,upper,count,mean\n";
    char buf[160];
    for (const SpectralDelta& d : deltas) {
        const std::vector<Annulus> rings = annulus_summary(d, bands);
        for (std::size_t b = 0; b < rings.size(); ++b) {
            std::snprintf(buf, sizeof buf, ",%zu,%.6f,%.6f,%zu,%.10g\n", b, rings[b].lower, rings[b].upper,
                          rings[b].count, rings[b].mean);
            out << d.tag << buf;
        }
    }
    return out.str();
}

}  // namespace mollify
