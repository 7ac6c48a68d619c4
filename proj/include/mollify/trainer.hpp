#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mollify/dataset.hpp"
#include "mollify/metrics.hpp"
#include "mollify/mlp.hpp"
#include "mollify/schedules.hpp"

namespace mollify {

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 128;
    double lr0 = 0.01;
    std::size_t hidden_units = 128;
    std::uint64_t seed = 0;
    ScheduleConfig schedule;
    LossKind loss = LossKind::Smoothed;
    bool mollify = true;
    /// Mollified copies of each image per batch (the K of the Jensen bound).
    std::size_t samples_per_image = 1;
    double momentum = 0.0;
    double weight_decay = 0.0;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double loss = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;

    /// epoch,loss,lr rows; wall time is left out so reruns compare equal.
    std::string to_csv() const;
};

struct TrainResult {
    MlpParams params;
    TrainReport report;
};

/// lr0 (1 + cos(pi epoch / epochs)) / 2
double cosine_lr(std::size_t epoch, const TrainConfig& cfg);

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch SGD on mollified, label-decayed batches. Deterministic in
/// (dataset, cfg) for any thread count. Throws NumericalError on a
/// non-finite loss or parameter.
TrainResult train(const Dataset& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

std::vector<PredictionRecord> predict_batch(const MlpParams& params, const Dataset& dataset,
                                            const std::string& tag = "clean");

std::string loss_name(LossKind kind);
LossKind parse_loss(const std::string& name);

/// Parameter file: u32 header length, JSON header (shapes plus `extra`),
/// then w1, b1, w2, b2 as little-endian f32.
std::string encode_params(const MlpParams& params, const std::string& extra_json = "{}");
MlpParams decode_params(std::string_view bytes);

}  // namespace mollify
