#include "mollify/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mollify {

MlpParams::MlpParams(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes)
    : input(input_dim),
      hidden(hidden_units),
      classes(num_classes),
      w1(hidden_units * input_dim, 0.0),
      b1(hidden_units, 0.0),
      w2(num_classes * hidden_units, 0.0),
      b2(num_classes, 0.0) {}

MlpParams MlpParams::he_init(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes,
                             Stream& rng) {
    MlpParams p(input_dim, hidden_units, num_classes);
    const double s1 = std::sqrt(2.0 / static_cast<double>(input_dim));
    const double s2 = std::sqrt(2.0 / static_cast<double>(hidden_units));
    for (double& w : p.w1) w = s1 * rng.normal();
    for (double& w : p.w2) w = s2 * rng.normal();
    return p;
}

bool MlpParams::all_finite() const {
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return finite(w1) && finite(b1) && finite(w2) && finite(b2);
}

void MlpParams::set_zero() {
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
    std::fill(b2.begin(), b2.end(), 0.0);
}

void MlpParams::add_scaled(const MlpParams& other, double scale) {
    if (!same_shape(other)) throw std::invalid_argument("MlpParams::add_scaled: shape mismatch");
    auto axpy = [scale](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
    };
    axpy(w1, other.w1);
    axpy(b1, other.b1);
    axpy(w2, other.w2);
    axpy(b2, other.b2);
}

void MlpParams::scale(double factor) {
    for (std::vector<double>* block : {&w1, &b1, &w2, &b2}) {
        for (double& v : *block) v *= factor;
    }
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    flat.insert(flat.end(), w1.begin(), w1.end());
    flat.insert(flat.end(), b1.begin(), b1.end());
    flat.insert(flat.end(), w2.begin(), w2.end());
    flat.insert(flat.end(), b2.begin(), b2.end());
    return flat;
}

void MlpParams::assign_flat(std::span<const double> values) {
    if (values.size() != parameter_count()) throw std::invalid_argument("MlpParams::assign_flat: size mismatch");
    auto it = values.begin();
    for (std::vector<double>* block : {&w1, &b1, &w2, &b2}) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(block->size()), block->begin());
        it += static_cast<std::ptrdiff_t>(block->size());
    }
}

SoftLabel training_target(std::size_t class_index, std::size_t num_classes, double gamma, LossKind kind) {
    const SoftLabel y = one_hot(class_index, num_classes);
    return kind == LossKind::Tempered ? temper_label(y, gamma) : smooth_label(y, gamma);
}

namespace {

void check_input(const MlpParams& params, std::size_t dim) {
    if (dim != params.input) {
        throw std::invalid_argument("mlp: input has " + std::to_string(dim) + " features, network expects " +
                                    std::to_string(params.input));
    }
}

// hidden pre-activations -> relu in place, then logits.
void forward_into(const MlpParams& p, std::span<const double> x, std::vector<double>& h, std::vector<double>& z) {
    h.resize(p.hidden);
    z.resize(p.classes);
    for (std::size_t j = 0; j < p.hidden; ++j) {
        const double* row = p.w1.data() + j * p.input;
        double acc = p.b1[j];
        for (std::size_t i = 0; i < p.input; ++i) acc += row[i] * x[i];
        h[j] = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t c = 0; c < p.classes; ++c) {
        const double* row = p.w2.data() + c * p.hidden;
        double acc = p.b2[c];
        for (std::size_t j = 0; j < p.hidden; ++j) acc += row[j] * h[j];
        z[c] = acc;
    }
}

struct Workspace {
    std::vector<double> hidden;
    std::vector<double> logits;
    std::vector<double> delta_out;
    std::vector<double> delta_hidden;
};

double loss_from_logits(const LogProbVector& logp, const SoftLabel& y, LossKind kind) {
    double loss = soft_cross_entropy(logp, y);
    if (kind == LossKind::Normalized) loss += log_normalizer_Z(logp);
    return loss;
}

// Adds the example's gradient into acc and returns its loss.
double accumulate_example(const MlpParams& p, std::span<const double> x, const SoftLabel& y, LossKind kind,
                          MlpParams& acc, Workspace& ws) {
    check_input(p, x.size());
    if (y.num_classes() != p.classes) throw std::invalid_argument("mlp: label dimension mismatch");
    forward_into(p, x, ws.hidden, ws.logits);
    const LogProbVector logp = LogProbVector::from_logits(ws.logits);
    const double loss = loss_from_logits(logp, y, kind);

    const double mass = y.total();
    ws.delta_out.resize(p.classes);
    for (std::size_t c = 0; c < p.classes; ++c) ws.delta_out[c] = mass * std::exp(logp.logp[c]) - y.probs[c];
    if (kind == LossKind::Normalized) {
        const std::vector<double> gz = log_normalizer_grad(logp);
        for (std::size_t c = 0; c < p.classes; ++c) ws.delta_out[c] += gz[c];
    }

    ws.delta_hidden.assign(p.hidden, 0.0);
    for (std::size_t c = 0; c < p.classes; ++c) {
        const double d = ws.delta_out[c];
        acc.b2[c] += d;
        double* grow = acc.w2.data() + c * p.hidden;
        const double* wrow = p.w2.data() + c * p.hidden;
        for (std::size_t j = 0; j < p.hidden; ++j) {
            grow[j] += d * ws.hidden[j];
            ws.delta_hidden[j] += d * wrow[j];
        }
    }
    for (std::size_t j = 0; j < p.hidden; ++j) {
        if (ws.hidden[j] <= 0.0) continue;
        const double d = ws.delta_hidden[j];
        acc.b1[j] += d;
        double* grow = acc.w1.data() + j * p.input;
        for (std::size_t i = 0; i < p.input; ++i) grow[i] += d * x[i];
    }
    return loss;
}

void check_batch(const MlpParams& params, std::span<const ImageTensor> imgs, std::span<const SoftLabel> targets) {
    if (imgs.size() != targets.size()) throw std::invalid_argument("batch_gradient: images and targets differ in count");
    if (imgs.empty()) throw std::invalid_argument("batch_gradient: empty batch");
    for (const ImageTensor& img : imgs) check_input(params, img.size());
    for (const SoftLabel& y : targets) {
        if (y.num_classes() != params.classes) throw std::invalid_argument("batch_gradient: label dimension mismatch");
    }
}

constexpr std::size_t kReductionChunks = 16;

}  // namespace

std::vector<double> logits(const MlpParams& params, std::span<const double> x) {
    check_input(params, x.size());
    std::vector<double> h;
    std::vector<double> z;
    forward_into(params, x, h, z);
    return z;
}

LogProbVector forward(const MlpParams& params, const ImageTensor& img) {
    return LogProbVector::from_logits(logits(params, img.data));
}

double example_loss(const MlpParams& params, const ImageTensor& img, const SoftLabel& y, LossKind kind) {
    return loss_from_logits(forward(params, img), y, kind);
}

LossGradient grad(const MlpParams& params, const ImageTensor& img, const SoftLabel& y, LossKind kind) {
    LossGradient out;
    out.gradient = MlpParams(params.input, params.hidden, params.classes);
    Workspace ws;
    out.loss = accumulate_example(params, img.data, y, kind, out.gradient, ws);
    return out;
}

LossGradient batch_gradient(const MlpParams& params, std::span<const ImageTensor> imgs,
                            std::span<const SoftLabel> targets, LossKind kind) {
    check_batch(params, imgs, targets);
    const std::size_t n = imgs.size();
    const std::size_t chunks = std::min(kReductionChunks, n);
    std::vector<MlpParams> partial(chunks, MlpParams(params.input, params.hidden, params.classes));
    std::vector<double> partial_loss(chunks, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(chunks); ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        const std::size_t begin = n * c / chunks;
        const std::size_t end = n * (c + 1) / chunks;
        Workspace ws;
        double loss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            loss += accumulate_example(params, imgs[i].data, targets[i], kind, partial[c], ws);
        }
        partial_loss[c] = loss;
    }

    LossGradient out;
    out.gradient = MlpParams(params.input, params.hidden, params.classes);
    for (std::size_t c = 0; c < chunks; ++c) {
        out.gradient.add_scaled(partial[c], 1.0);
        out.loss += partial_loss[c];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.gradient.scale(inv_n);
    out.loss *= inv_n;
    return out;
}

LossGradient batch_gradient_serial(const MlpParams& params, std::span<const ImageTensor> imgs,
                                   std::span<const SoftLabel> targets, LossKind kind) {
    check_batch(params, imgs, targets);
    LossGradient out;
    out.gradient = MlpParams(params.input, params.hidden, params.classes);
    Workspace ws;
    for (std::size_t i = 0; i < imgs.size(); ++i) {
        out.loss += accumulate_example(params, imgs[i].data, targets[i], kind, out.gradient, ws);
    }
    const double inv_n = 1.0 / static_cast<double>(imgs.size());
    out.gradient.scale(inv_n);
    out.loss *= inv_n;
    return out;
}

}  // namespace mollify
