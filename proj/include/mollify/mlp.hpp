#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mollify/labels.hpp"
#include "mollify/likelihood.hpp"
#include "mollify/rng.hpp"
#include "mollify/tensor.hpp"

namespace mollify {

/// Single-hidden-layer ReLU network. Weights are row-major:
/// w1 is hidden x input, w2 is classes x hidden.
struct MlpParams {
    std::size_t input = 0;
    std::size_t hidden = 0;
    std::size_t classes = 0;
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2;

    MlpParams() = default;
    MlpParams(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes);

    /// He-style fan-in scaled Gaussian weights, zero biases.
    static MlpParams he_init(std::size_t input_dim, std::size_t hidden_units, std::size_t num_classes,
                             Stream& rng);

    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    bool same_shape(const MlpParams& other) const {
        return input == other.input && hidden == other.hidden && classes == other.classes;
    }
    bool all_finite() const;
    void set_zero();
    /// this += scale * other
    void add_scaled(const MlpParams& other, double scale);
    void scale(double factor);

    /// Flat view in the order w1, b1, w2, b2.
    std::vector<double> flatten() const;
    void assign_flat(std::span<const double> values);
};

enum class LossKind { Smoothed, Tempered, Normalized };

/// Label the loss trains against for a decayed example: smoothed for
/// Smoothed and Normalized, tempered for Tempered.
SoftLabel training_target(std::size_t class_index, std::size_t num_classes, double gamma, LossKind kind);

/// Logits W2 relu(W1 x + b1) + b2.
std::vector<double> logits(const MlpParams& params, std::span<const double> x);

LogProbVector forward(const MlpParams& params, const ImageTensor& img);

/// Loss of one example: soft cross-entropy against y, plus log Z for
/// Normalized.
double example_loss(const MlpParams& params, const ImageTensor& img, const SoftLabel& y, LossKind kind);

struct LossGradient {
    double loss = 0.0;
    MlpParams gradient;
};

/// Exact gradient of example_loss. The logit error signal is
/// sum(y) softmax - y, plus d log Z / d logits for Normalized.
LossGradient grad(const MlpParams& params, const ImageTensor& img, const SoftLabel& y,
                  LossKind kind = LossKind::Smoothed);

/// Mean loss and mean gradient over a batch. Examples are split into a
/// fixed number of contiguous chunks that are reduced in order, so the
/// result is bit-identical for any thread count.
LossGradient batch_gradient(const MlpParams& params, std::span<const ImageTensor> imgs,
                            std::span<const SoftLabel> targets, LossKind kind);

/// Plain sequential accumulation; reference for batch_gradient.
LossGradient batch_gradient_serial(const MlpParams& params, std::span<const ImageTensor> imgs,
                                   std::span<const SoftLabel> targets, LossKind kind);

}  // namespace mollify
