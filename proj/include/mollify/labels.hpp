#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mollify {

enum class LabelKind { OneHot, Tempered, Smoothed };

struct SoftLabel {
    std::vector<double> probs;
    LabelKind kind = LabelKind::OneHot;

    std::size_t num_classes() const { return probs.size(); }
    double total() const;
};

SoftLabel one_hot(std::size_t class_index, std::size_t num_classes);

/// (1 - gamma) y
SoftLabel temper_label(const SoftLabel& y, double gamma);

/// (1 - gamma) y + gamma / C
SoftLabel smooth_label(const SoftLabel& y, double gamma);

/// log Dir(f | 1 + y) = sum_c y_c log f_c - log B(1 + y).
double dirichlet_log_density(std::span<const double> f, const SoftLabel& y);

}  // namespace mollify
