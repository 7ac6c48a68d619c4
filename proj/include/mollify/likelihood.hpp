#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mollify/labels.hpp"

namespace mollify {

/// Normalized log-probabilities over C classes (logsumexp = 0).
struct LogProbVector {
    std::vector<double> logp;

    std::size_t size() const { return logp.size(); }

    /// Log-softmax of raw scores.
    static LogProbVector from_logits(std::span<const double> logits);
    static LogProbVector from_probs(std::span<const double> probs);
};

double logsumexp(std::span<const double> values);

/// -sum_c y_c logp_c
double soft_cross_entropy(const LogProbVector& logp, const SoftLabel& y);

/// (1 - gamma) logp[class_index]
double tempered_log_likelihood(const LogProbVector& logp, std::size_t class_index, double gamma);

/// log of Z = sum_j (K - f_j) / (log K - log f_j), K the geometric mean of f,
/// the constant that normalizes prod_i f_i^{y_i} over smoothed labels.
double log_normalizer_Z(const LogProbVector& logp);

/// d log Z / d logits for logits whose log-softmax is `logp`.
std::vector<double> log_normalizer_grad(const LogProbVector& logp);

enum class McMethod { Naive, Jensen, Corrected };

/// Estimate of log E_phi[p(y | x, phi)] from K per-augmentation
/// log-likelihoods.
///   Naive     log mean exp(loglik)
///   Jensen    mean loglik (the geometric-mean likelihood)
///   Corrected Naive + var[I_K] / (2 I_K^2)
double mc_log_marginal(std::span<const double> loglik, McMethod method);

}  // namespace mollify
