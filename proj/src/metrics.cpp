#include "mollify/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "mollify/errors.hpp"

namespace mollify {

std::size_t PredictionRecord::predicted() const {
    return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double PredictionRecord::confidence() const { return *std::max_element(probs.begin(), probs.end()); }

namespace {

void require_records(std::span<const PredictionRecord> records, const char* where) {
    if (records.empty()) throw std::invalid_argument(std::string(where) + ": no records");
    for (const PredictionRecord& r : records) {
        if (r.probs.empty() || r.true_class >= r.probs.size()) {
            throw std::invalid_argument(std::string(where) + ": record class outside its probability vector");
        }
    }
}

}  // namespace

double error_rate(std::span<const PredictionRecord> records) {
    require_records(records, "error_rate");
    std::size_t wrong = 0;
    for (const PredictionRecord& r : records) wrong += r.predicted() != r.true_class;
    return static_cast<double>(wrong) / static_cast<double>(records.size());
}

double avg_nll(std::span<const PredictionRecord> records) {
    require_records(records, "avg_nll");
    double acc = 0.0;
    for (const PredictionRecord& r : records) acc -= std::log(std::max(r.probs[r.true_class], kNllFloor));
    return acc / static_cast<double>(records.size());
}

std::size_t ece_bin(double confidence, std::size_t num_bins) {
    if (num_bins == 0) throw std::invalid_argument("ece: need at least one bin");
    const double nb = static_cast<double>(num_bins);
    if (!(confidence > 0.0)) return 0;
    auto b = static_cast<std::size_t>(std::clamp(std::ceil(confidence * nb) - 1.0, 0.0, nb - 1.0));
    // Settle rounding at edges against the exact bin bounds (b/B, (b+1)/B].
    while (b > 0 && confidence <= static_cast<double>(b) / nb) --b;
    while (b + 1 < num_bins && confidence > static_cast<double>(b + 1) / nb) ++b;
    return b;
}

std::vector<CalibrationBin> calibration_bins(std::span<const PredictionRecord> records, std::size_t num_bins) {
    require_records(records, "ece");
    if (num_bins == 0) throw std::invalid_argument("ece: need at least one bin");
    std::vector<CalibrationBin> bins(num_bins);
    std::vector<double> correct(num_bins, 0.0);
    std::vector<double> conf(num_bins, 0.0);
    for (const PredictionRecord& r : records) {
        const double c = r.confidence();
        const std::size_t b = ece_bin(c, num_bins);
        bins[b].count += 1;
        correct[b] += r.predicted() == r.true_class ? 1.0 : 0.0;
        conf[b] += c;
    }
    for (std::size_t b = 0; b < num_bins; ++b) {
        bins[b].lower = static_cast<double>(b) / static_cast<double>(num_bins);
        bins[b].upper = static_cast<double>(b + 1) / static_cast<double>(num_bins);
        if (bins[b].count > 0) {
            bins[b].accuracy = correct[b] / static_cast<double>(bins[b].count);
            bins[b].confidence = conf[b] / static_cast<double>(bins[b].count);
        }
    }
    return bins;
}

double ece(std::span<const PredictionRecord> records, std::size_t num_bins) {
    const std::vector<CalibrationBin> bins = calibration_bins(records, num_bins);
    const double n = static_cast<double>(records.size());
    double total = 0.0;
    for (const CalibrationBin& b : bins) {
        if (b.count == 0) continue;
        total += static_cast<double>(b.count) / n * std::abs(b.accuracy - b.confidence);
    }
    return total;
}

MetricSummary summarize(std::span<const PredictionRecord> records, std::size_t num_bins) {
    return {error_rate(records), avg_nll(records), ece(records, num_bins), records.size()};
}

EvalReport evaluate(std::span<const PredictionRecord> records, std::size_t num_bins) {
    EvalReport report;
    report.overall = summarize(records, num_bins);
    std::map<std::string, std::vector<PredictionRecord>> groups;
    for (const PredictionRecord& r : records) groups[r.tag].push_back(r);
    for (const auto& [tag, group] : groups) report.by_tag[tag] = summarize(group, num_bins);
    return report;
}

namespace {

nlohmann::json summary_json(const MetricSummary& s) {
    return {{"error", s.error}, {"nll", s.nll}, {"ece", s.ece}, {"count", s.count}};
}

}  // namespace

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    j["overall"] = summary_json(report.overall);
    j["by_tag"] = nlohmann::json::object();
    for (const auto& [tag, s] : report.by_tag) j["by_tag"][tag] = summary_json(s);
    return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
    std::size_t width = 7;
    for (const auto& [tag, s] : report.by_tag) width = std::max(width, tag.size());
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %8s %8s %8s %8s\n", static_cast<int>(width), "tag", "error", "nll", "ece",
                  "count");
    out << line;
    auto row = [&](const std::string& tag, const MetricSummary& s) {
        std::snprintf(line, sizeof line, "%-*s %8.4f %8.4f %8.4f %8zu\n", static_cast<int>(width), tag.c_str(),
                      s.error, s.nll, s.ece, s.count);
        out << line;
    };
    for (const auto& [tag, s] : report.by_tag) row(tag, s);
    row("overall", report.overall);
    return out.str();
}

std::string records_to_csv(std::span<const PredictionRecord> records) {
    std::ostringstream out;
    const std::size_t classes = records.empty() ? 0 : records.front().probs.size();
    out << "index,tag,true_class";
    for (std::size_t c = 0; c < classes; ++c) out << ",p" << c;
    out << "\n";
    char buf[32];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const PredictionRecord& r = records[i];
        if (r.tag.find_first_of(",\n") != std::string::npos) throw DataError("records_to_csv: tag contains a comma");
        out << i << ',' << r.tag << ',' << r.true_class;
        for (double p : r.probs) {
            std::snprintf(buf, sizeof buf, ",%.17g", p);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::vector<PredictionRecord> records_from_csv(std::string_view text) {
    std::vector<PredictionRecord> records;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) return records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() < 4) throw DataError("records CSV line " + std::to_string(line_no) + ": too few fields");
        PredictionRecord r;
        r.tag = fields[1];
        try {
            r.true_class = std::stoul(fields[2]);
            for (std::size_t k = 3; k < fields.size(); ++k) r.probs.push_back(std::stod(fields[k]));
        } catch (const std::exception&) {
            throw DataError("records CSV line " + std::to_string(line_no) + ": malformed number");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string bins_to_csv(std::span<const CalibrationBin> bins) {
    std::ostringstream out;
    out << "bin,lower,upper,count,accuracy,confidence\n";
    char buf[160];
    for (std::size_t b = 0; b < bins.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%zu,%.10f,%.10f\n", b, bins[b].lower, bins[b].upper,
                      bins[b].count, bins[b].accuracy, bins[b].confidence);
        out << buf;
    }
    return out.str();
}

}  // namespace mollify
