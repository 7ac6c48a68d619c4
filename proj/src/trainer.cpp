#include "mollify/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mollify/errors.hpp"
#include "mollify/mollifier.hpp"

namespace mollify {

namespace {

// Independent streams per purpose so toggling mollification leaves
// initialization and shuffling untouched.
enum StreamKey : std::uint64_t { kInit = 1, kShuffle = 2, kMollify = 3 };

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (!(lr0 > 0.0)) throw std::invalid_argument("train: lr0 must be positive");
    if (hidden_units < 1) throw std::invalid_argument("train: hidden_units must be >= 1");
    if (samples_per_image < 1) throw std::invalid_argument("train: samples_per_image must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("train: momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("train: weight_decay must be nonnegative");
    schedule.validate();
}

std::string TrainReport::to_csv() const {
    std::ostringstream out;
    out << "epoch,loss,lr\n";
    char buf[128];
    for (const EpochStats& e : epochs) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e.epoch, e.loss, e.lr);
        out << buf;
    }
    return out.str();
}

double cosine_lr(std::size_t epoch, const TrainConfig& cfg) {
    const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.epochs);
    return cfg.lr0 * (1.0 + std::cos(std::numbers::pi * frac)) / 2.0;
}

TrainResult train(const Dataset& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    dataset.validate();
    if (dataset.size() == 0) throw DataError("train: empty dataset");
    if (cfg.mollify) cfg.schedule.validate(dataset.width);

    const Stream root(cfg.seed);
    Stream init = root.derive(kInit);
    TrainResult result;
    MlpParams& params = result.params;
    params = MlpParams::he_init(dataset.height * dataset.width * dataset.channels, cfg.hidden_units,
                                dataset.num_classes, init);
    MlpParams velocity(params.input, params.hidden, params.classes);

    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::vector<ImageTensor> batch_images;
    std::vector<SoftLabel> batch_targets;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        const double lr = cosine_lr(epoch, cfg);

        std::iota(order.begin(), order.end(), std::size_t{0});
        Stream shuffle = root.derive(kShuffle).derive(epoch);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);
        Stream mollify_rng = root.derive(kMollify).derive(epoch);

        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t end = std::min(n, begin + cfg.batch_size);
            batch_images.clear();
            batch_targets.clear();
            std::vector<std::uint32_t> classes;
            const std::size_t copies = cfg.mollify ? cfg.samples_per_image : 1;
            for (std::size_t copy = 0; copy < copies; ++copy) {
                for (std::size_t i = begin; i < end; ++i) {
                    batch_images.push_back(dataset.images[order[i]]);
                    classes.push_back(dataset.labels[order[i]]);
                }
            }
            std::vector<double> gammas(batch_images.size(), 0.0);
            if (cfg.mollify) {
                std::vector<MollifiedExample> mollified = mollify_batch(batch_images, cfg.schedule, mollify_rng);
                for (std::size_t i = 0; i < mollified.size(); ++i) {
                    batch_images[i] = std::move(mollified[i].image);
                    gammas[i] = mollified[i].gamma;
                }
            }
            for (std::size_t i = 0; i < batch_images.size(); ++i) {
                batch_targets.push_back(training_target(classes[i], dataset.num_classes, gammas[i], cfg.loss));
            }

            LossGradient lg = batch_gradient(params, batch_images, batch_targets, cfg.loss);
            if (!std::isfinite(lg.loss)) {
                throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting " +
                                     std::to_string(begin));
            }
            if (cfg.weight_decay > 0.0) lg.gradient.add_scaled(params, cfg.weight_decay);
            if (cfg.momentum > 0.0) {
                velocity.scale(cfg.momentum);
                velocity.add_scaled(lg.gradient, 1.0);
                params.add_scaled(velocity, -lr);
            } else {
                params.add_scaled(lg.gradient, -lr);
            }
            loss_sum += lg.loss * static_cast<double>(batch_images.size());
            loss_count += batch_images.size();
        }
        if (!params.all_finite()) throw NumericalError("train: non-finite parameters after epoch " + std::to_string(epoch));

        EpochStats stats;
        stats.epoch = epoch;
        stats.loss = loss_sum / static_cast<double>(loss_count);
        stats.lr = lr;
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.report.epochs.push_back(stats);
        if (on_epoch) on_epoch(stats);
    }
    return result;
}

std::vector<PredictionRecord> predict_batch(const MlpParams& params, const Dataset& dataset, const std::string& tag) {
    dataset.validate();
    if (dataset.height * dataset.width * dataset.channels != params.input) {
        throw DataError("predict_batch: dataset images do not match the network input size");
    }
    if (dataset.num_classes > params.classes) throw DataError("predict_batch: dataset has more classes than the network");
    std::vector<PredictionRecord> records(dataset.size());
    const auto n = static_cast<std::int64_t>(dataset.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const LogProbVector logp = forward(params, dataset.images[i]);
        PredictionRecord& r = records[i];
        r.probs.resize(logp.size());
        for (std::size_t c = 0; c < logp.size(); ++c) r.probs[c] = std::exp(logp.logp[c]);
        r.true_class = dataset.labels[i];
        r.tag = tag;
    }
    return records;
}

std::string loss_name(LossKind kind) {
    switch (kind) {
        case LossKind::Smoothed: return "smoothed";
        case LossKind::Tempered: return "tempered";
        case LossKind::Normalized: return "normalized";
    }
    return "unknown";
}

LossKind parse_loss(const std::string& name) {
    if (name == "smoothed") return LossKind::Smoothed;
    if (name == "tempered") return LossKind::Tempered;
    if (name == "normalized") return LossKind::Normalized;
    throw std::invalid_argument("unknown loss '" + name + "' (expected smoothed, tempered or normalized)");
}

std::string encode_params(const MlpParams& params, const std::string& extra_json) {
    nlohmann::json header;
    header["format"] = "mollify-mlp";
    header["input"] = params.input;
    header["hidden"] = params.hidden;
    header["classes"] = params.classes;
    header["layers"] = {{{"name", "w1"}, {"shape", {params.hidden, params.input}}},
                        {{"name", "b1"}, {"shape", {params.hidden}}},
                        {{"name", "w2"}, {"shape", {params.classes, params.hidden}}},
                        {{"name", "b2"}, {"shape", {params.classes}}}};
    header["extra"] = nlohmann::json::parse(extra_json);
    const std::string text = header.dump();

    std::string out;
    const auto len = static_cast<std::uint32_t>(text.size());
    out.append(reinterpret_cast<const char*>(&len), 4);
    out += text;
    for (double v : params.flatten()) {
        const auto f = static_cast<float>(v);
        out.append(reinterpret_cast<const char*>(&f), 4);
    }
    return out;
}

MlpParams decode_params(std::string_view bytes) {
    if (bytes.size() < 4) throw DataError("params: truncated header");
    std::uint32_t len = 0;
    std::memcpy(&len, bytes.data(), 4);
    if (bytes.size() < 4 + static_cast<std::size_t>(len)) throw DataError("params: truncated header");
    MlpParams params;
    try {
        const auto header = nlohmann::json::parse(bytes.substr(4, len));
        params = MlpParams(header.at("input").get<std::size_t>(), header.at("hidden").get<std::size_t>(),
                           header.at("classes").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("params: ") + e.what());
    }
    const std::string_view payload = bytes.substr(4 + len);
    if (payload.size() != params.parameter_count() * 4) throw DataError("params: payload size does not match shapes");
    std::vector<double> flat(params.parameter_count());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        float f;
        std::memcpy(&f, payload.data() + 4 * i, 4);
        flat[i] = f;
    }
    params.assign_flat(flat);
    return params;
}

}  // namespace mollify
