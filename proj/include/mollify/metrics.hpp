#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mollify {

struct PredictionRecord {
    std::vector<double> probs;
    std::size_t true_class = 0;
    std::string tag;

    std::size_t predicted() const;  // argmax, lowest index on ties
    double confidence() const;
};

inline constexpr std::size_t kDefaultEceBins = 15;
inline constexpr double kNllFloor = 1e-12;

double error_rate(std::span<const PredictionRecord> records);
double avg_nll(std::span<const PredictionRecord> records);

/// Equal-width confidence bins over (0, 1], right-closed; confidence 0
/// falls into the first bin.
double ece(std::span<const PredictionRecord> records, std::size_t num_bins = kDefaultEceBins);

/// Index of the bin holding `confidence`.
std::size_t ece_bin(double confidence, std::size_t num_bins);

struct CalibrationBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double accuracy = 0.0;
    double confidence = 0.0;
};

std::vector<CalibrationBin> calibration_bins(std::span<const PredictionRecord> records,
                                             std::size_t num_bins = kDefaultEceBins);

struct MetricSummary {
    double error = 0.0;
    double nll = 0.0;
    double ece = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    MetricSummary overall;
    std::map<std::string, MetricSummary> by_tag;
};

MetricSummary summarize(std::span<const PredictionRecord> records, std::size_t num_bins = kDefaultEceBins);
EvalReport evaluate(std::span<const PredictionRecord> records, std::size_t num_bins = kDefaultEceBins);

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

/// CSV with header `index,tag,true_class,p0,...,p{C-1}`.
std::string records_to_csv(std::span<const PredictionRecord> records);
std::vector<PredictionRecord> records_from_csv(std::string_view text);

std::string bins_to_csv(std::span<const CalibrationBin> bins);

}  // namespace mollify
