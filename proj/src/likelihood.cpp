#include "mollify/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mollify {

double logsumexp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(peak)) return peak;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - peak);
    return peak + std::log(acc);
}

LogProbVector LogProbVector::from_logits(std::span<const double> logits) {
    const double lse = logsumexp(logits);
    LogProbVector out;
    out.logp.reserve(logits.size());
    for (double z : logits) out.logp.push_back(z - lse);
    return out;
}

LogProbVector LogProbVector::from_probs(std::span<const double> probs) {
    LogProbVector out;
    out.logp.reserve(probs.size());
    for (double p : probs) out.logp.push_back(std::log(p));
    return out;
}

double soft_cross_entropy(const LogProbVector& logp, const SoftLabel& y) {
    if (logp.size() != y.num_classes()) {
        throw std::invalid_argument("soft_cross_entropy: " + std::to_string(logp.size()) +
                                    " log-probabilities for a label over " + std::to_string(y.num_classes()) +
                                    " classes");
    }
    double loss = 0.0;
    for (std::size_t c = 0; c < logp.size(); ++c) {
        if (y.probs[c] != 0.0) loss -= y.probs[c] * logp.logp[c];
    }
    return loss;
}

double tempered_log_likelihood(const LogProbVector& logp, std::size_t class_index, double gamma) {
    if (class_index >= logp.size()) throw std::out_of_range("tempered_log_likelihood: class index out of range");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("tempered_log_likelihood: gamma outside [0, 1]");
    if (gamma == 1.0) return 0.0;
    return (1.0 - gamma) * logp.logp[class_index];
}

namespace {

constexpr double kLimitThreshold = 1e-12;

// log((e^d - 1) / d), the log of int_0^1 e^{a d} da.
double log_expm1_ratio(double d) {
    if (std::abs(d) < kLimitThreshold) return 0.0;
    if (d > 0.0) return d + std::log1p(-std::exp(-d)) - std::log(d);
    return std::log(-std::expm1(d)) - std::log(-d);
}

// Derivative of log_expm1_ratio.
double log_expm1_ratio_slope(double d) {
    if (std::abs(d) < 1e-4) return 0.5 + d / 12.0;
    return 1.0 / (-std::expm1(-d)) - 1.0 / d;
}

double mean_logp(const LogProbVector& logp) {
    double acc = 0.0;
    for (double v : logp.logp) {
        if (!std::isfinite(v)) throw std::invalid_argument("log_normalizer_Z: probabilities must be positive");
        acc += v;
    }
    return acc / static_cast<double>(logp.size());
}

}  // namespace

double log_normalizer_Z(const LogProbVector& logp) {
    if (logp.size() == 0) throw std::invalid_argument("log_normalizer_Z: empty vector");
    const double log_k = mean_logp(logp);
    std::vector<double> terms(logp.size());
    for (std::size_t j = 0; j < logp.size(); ++j) {
        terms[j] = logp.logp[j] + log_expm1_ratio(log_k - logp.logp[j]);
    }
    return logsumexp(terms);
}

std::vector<double> log_normalizer_grad(const LogProbVector& logp) {
    const std::size_t n = logp.size();
    const double log_k = mean_logp(logp);
    const double inv_c = 1.0 / static_cast<double>(n);
    std::vector<double> d(n);
    std::vector<double> terms(n);
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = log_k - logp.logp[j];
        terms[j] = logp.logp[j] + log_expm1_ratio(d[j]);
    }
    const double log_z = logsumexp(terms);

    // g_i = d log Z / d logp_i = sum_j w_j (delta_ij + s_j (1/C - delta_ij)), w = term weights.
    std::vector<double> g(n, 0.0);
    double shared = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::exp(terms[j] - log_z);
        const double s = log_expm1_ratio_slope(d[j]);
        g[j] += w * (1.0 - s);
        shared += w * s * inv_c;
    }
    // sum_i g_i = 1, so the chain through logp = z - lse(z) is g - softmax.
    for (std::size_t i = 0; i < n; ++i) g[i] += shared - std::exp(logp.logp[i]);
    return g;
}

double mc_log_marginal(std::span<const double> loglik, McMethod method) {
    const std::size_t k = loglik.size();
    if (k == 0) throw std::invalid_argument("mc_log_marginal: need at least one sample");
    for (double v : loglik) {
        if (!std::isfinite(v)) throw std::invalid_argument("mc_log_marginal: non-finite log-likelihood");
    }
    const double kd = static_cast<double>(k);
    switch (method) {
        case McMethod::Jensen: {
            double acc = 0.0;
            for (double v : loglik) acc += v;
            return acc / kd;
        }
        case McMethod::Naive: return logsumexp(loglik) - std::log(kd);
        case McMethod::Corrected: {
            if (k < 2) throw std::invalid_argument("mc_log_marginal: bias correction needs K >= 2");
            const double log_mean = logsumexp(loglik) - std::log(kd);
            // var[I_K] / I_K^2 with every likelihood scaled by 1 / I_K.
            double ss = 0.0;
            for (double v : loglik) {
                const double r = std::exp(v - log_mean) - 1.0;
                ss += r * r;
            }
            const double rel_var = ss / (kd * (kd - 1.0));
            return log_mean + 0.5 * rel_var;
        }
    }
    throw std::invalid_argument("mc_log_marginal: unknown method");
}

}  // namespace mollify
