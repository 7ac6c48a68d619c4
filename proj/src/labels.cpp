#include "mollify/labels.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mollify {

double SoftLabel::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

SoftLabel one_hot(std::size_t class_index, std::size_t num_classes) {
    if (num_classes < 2) throw std::invalid_argument("one_hot: need at least two classes");
    if (class_index >= num_classes) {
        throw std::out_of_range("one_hot: class " + std::to_string(class_index) + " outside [0, " +
                                std::to_string(num_classes) + ")");
    }
    SoftLabel y{std::vector<double>(num_classes, 0.0), LabelKind::OneHot};
    y.probs[class_index] = 1.0;
    return y;
}

namespace {

void check_decay_input(const SoftLabel& y, double gamma, const char* where) {
    if (y.kind != LabelKind::OneHot) throw std::invalid_argument(std::string(where) + ": label must be one-hot");
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument(std::string(where) + ": gamma must lie in [0, 1]");
    }
}

}  // namespace

SoftLabel temper_label(const SoftLabel& y, double gamma) {
    check_decay_input(y, gamma, "temper_label");
    SoftLabel out{y.probs, LabelKind::Tempered};
    for (double& p : out.probs) p *= (1.0 - gamma);
    return out;
}

SoftLabel smooth_label(const SoftLabel& y, double gamma) {
    check_decay_input(y, gamma, "smooth_label");
    SoftLabel out{y.probs, LabelKind::Smoothed};
    const double floor = gamma / static_cast<double>(y.num_classes());
    for (double& p : out.probs) p = (1.0 - gamma) * p + floor;
    return out;
}

double dirichlet_log_density(std::span<const double> f, const SoftLabel& y) {
    if (f.size() != y.num_classes()) throw std::invalid_argument("dirichlet_log_density: dimension mismatch");
    double total = 0.0;
    for (double v : f) {
        if (!(v > 0.0)) throw std::invalid_argument("dirichlet_log_density: probabilities must be positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("dirichlet_log_density: f must sum to 1");

    // log B(a) = sum lgamma(a_c) - lgamma(sum a_c), a = 1 + y
    double log_beta = 0.0;
    double concentration = 0.0;
    double kernel = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
        const double a = 1.0 + y.probs[c];
        log_beta += std::lgamma(a);
        concentration += a;
        if (y.probs[c] != 0.0) kernel += y.probs[c] * std::log(f[c]);
    }
    log_beta -= std::lgamma(concentration);
    return kernel - log_beta;
}

}  // namespace mollify
