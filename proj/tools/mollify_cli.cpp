// mollify: command-line driver for ingestion, mollification, training,
// evaluation and the spectral/compression analyses.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mollify/analysis.hpp"
#include "mollify/dataset.hpp"
#include "mollify/errors.hpp"
#include "mollify/io.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/png.hpp"
#include "mollify/synthetic.hpp"
#include "mollify/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mollify;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config

// Flag values; unset ones fall back to the config file, then to defaults.
struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string dataset;
    std::optional<bool> mollify;
    std::optional<std::string> loss;
    std::optional<double> k_noise, k_blur, beta_alpha, beta_beta;
    std::optional<std::string> mode_probs;
    std::optional<std::size_t> epochs, batch_size;
    std::optional<double> lr;
    std::optional<std::size_t> bins;
    std::optional<bool> corruptions;
    std::optional<std::size_t> t_steps;
};

json default_config() {
    const ScheduleConfig s;
    const TrainConfig t;
    return {
        {"seed", 0},
        {"dataset", ""},
        {"out", ""},
        {"schedule",
         {{"sigma_min", s.sigma_min},
          {"sigma_max", nullptr},
          {"k_noise", s.k_noise},
          {"k_blur", s.k_blur},
          {"beta_alpha", s.beta_alpha},
          {"beta_beta", s.beta_beta},
          {"mode_probs", s.mode_probs}}},
        {"train",
         {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.lr0},
          {"hidden_units", t.hidden_units},
          {"loss", loss_name(t.loss)},
          {"mollify", t.mollify},
          {"samples_per_image", t.samples_per_image},
          {"momentum", t.momentum},
          {"weight_decay", t.weight_decay}}},
        {"eval", {{"bins", kDefaultEceBins}, {"corruptions", false}}},
        {"analysis", {{"t_steps", 11}, {"severity", 3}, {"bands", kDefaultAnnuli}}},
    };
}

std::array<double, 3> parse_triple(const std::string& text) {
    std::array<double, 3> out{};
    std::stringstream in(text);
    std::string item;
    std::size_t i = 0;
    while (std::getline(in, item, ',')) {
        if (i == 3) throw UsageError("--mode-probs expects three comma-separated numbers");
        try {
            std::size_t used = 0;
            out[i++] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--mode-probs: cannot parse '" + item + "'");
        }
    }
    if (i != 3) throw UsageError("--mode-probs expects three comma-separated numbers");
    return out;
}

// Recursively overlays `patch` on `base`, rejecting keys the base lacks.
void overlay(json& base, const json& patch, const std::string& where) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (!base.contains(it.key())) throw UsageError("config: unknown key '" + where + it.key() + "'");
        json& slot = base[it.key()];
        if (slot.is_object() && it.value().is_object()) {
            overlay(slot, it.value(), where + it.key() + ".");
        } else {
            slot = it.value();
        }
    }
}

json effective_config(const Flags& f) {
    json cfg = default_config();
    if (!f.config.empty()) {
        if (!fs::exists(f.config)) throw UsageError("config file not found: " + f.config);
        json file;
        try {
            file = json::parse(read_file(f.config));
        } catch (const json::exception& e) {
            throw UsageError(std::string("config: ") + e.what());
        }
        if (!file.is_object()) throw UsageError("config: top level must be an object");
        overlay(cfg, file, "");
    }
    if (f.seed) cfg["seed"] = *f.seed;
    if (!f.out.empty()) cfg["out"] = f.out;
    if (!f.dataset.empty()) cfg["dataset"] = f.dataset;
    json& s = cfg["schedule"];
    if (f.k_noise) s["k_noise"] = *f.k_noise;
    if (f.k_blur) s["k_blur"] = *f.k_blur;
    if (f.beta_alpha) s["beta_alpha"] = *f.beta_alpha;
    if (f.beta_beta) s["beta_beta"] = *f.beta_beta;
    if (f.mode_probs) s["mode_probs"] = parse_triple(*f.mode_probs);
    json& t = cfg["train"];
    if (f.mollify) t["mollify"] = *f.mollify;
    if (f.loss) t["loss"] = *f.loss;
    if (f.epochs) t["epochs"] = *f.epochs;
    if (f.batch_size) t["batch_size"] = *f.batch_size;
    if (f.lr) t["lr"] = *f.lr;
    if (f.bins) cfg["eval"]["bins"] = *f.bins;
    if (f.corruptions) cfg["eval"]["corruptions"] = *f.corruptions;
    if (f.t_steps) cfg["analysis"]["t_steps"] = *f.t_steps;
    return cfg;
}

template <typename T>
T get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config: '") + key + "' has the wrong type");
    }
}

ScheduleConfig schedule_from(const json& cfg) {
    const json& s = cfg.at("schedule");
    ScheduleConfig out;
    out.sigma_min = get<double>(s, "sigma_min");
    if (!s.at("sigma_max").is_null()) out.sigma_max = get<double>(s, "sigma_max");
    out.k_noise = get<double>(s, "k_noise");
    out.k_blur = get<double>(s, "k_blur");
    out.beta_alpha = get<double>(s, "beta_alpha");
    out.beta_beta = get<double>(s, "beta_beta");
    const auto probs = get<std::vector<double>>(s, "mode_probs");
    if (probs.size() != 3) throw UsageError("config: schedule.mode_probs needs three entries");
    std::copy(probs.begin(), probs.end(), out.mode_probs.begin());
    return out;
}

TrainConfig train_from(const json& cfg) {
    const json& t = cfg.at("train");
    TrainConfig out;
    out.seed = get<std::uint64_t>(cfg, "seed");
    out.schedule = schedule_from(cfg);
    out.epochs = get<std::size_t>(t, "epochs");
    out.batch_size = get<std::size_t>(t, "batch_size");
    out.lr0 = get<double>(t, "lr");
    out.hidden_units = get<std::size_t>(t, "hidden_units");
    out.loss = parse_loss(get<std::string>(t, "loss"));
    out.mollify = get<bool>(t, "mollify");
    out.samples_per_image = get<std::size_t>(t, "samples_per_image");
    out.momentum = get<double>(t, "momentum");
    out.weight_decay = get<double>(t, "weight_decay");
    return out;
}

std::string config_hash(const json& cfg) {
    json hashed = cfg;
    hashed.erase("out");  // where results go does not change them
    return hex64(fnv1a64(hashed.dump()));
}

// ---------------------------------------------------------------- output

class RunDir {
public:
    RunDir(const json& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
        const std::string out = get<std::string>(cfg, "out");
        if (out.empty()) throw UsageError("--out is required");
        dir_ = out;
        fs::create_directories(dir_);
        hash_ = config_hash(cfg);
    }

    const std::string& hash() const { return hash_; }
    fs::path path(const std::string& name) const { return dir_ / name; }

    void write(const std::string& name, std::string_view bytes) {
        write_file_atomic(dir_ / name, bytes);
        outputs_.push_back(name);
    }

    // Echoes the effective config and the run metadata; call last.
    void finish(const json& extra = json::object()) {
        write_file_atomic(dir_ / "config.json", cfg_.dump(2) + "\n");
        json meta = {{"command", command_},
                     {"config_hash", hash_},
                     {"seed", cfg_.at("seed")},
                     {"version", kVersion},
                     {"outputs", outputs_}};
        for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
        write_file_atomic(dir_ / "run.json", meta.dump(2) + "\n");
    }

private:
    json cfg_;
    std::string command_;
    fs::path dir_;
    std::string hash_;
    std::vector<std::string> outputs_;
};

std::string required_dataset(const json& cfg) {
    const std::string path = get<std::string>(cfg, "dataset");
    if (path.empty()) throw UsageError("--dataset is required");
    if (!fs::exists(path)) throw DataError("dataset not found: " + path);
    return path;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- ingest / export

struct RawImage {
    std::size_t height = 0, width = 0, channels = 0;
    std::vector<unsigned char> samples;
};

RawImage read_netpbm(const fs::path& path) {
    const std::string bytes = read_file(path);
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&]() -> std::size_t {
        skip_space();
        std::size_t v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            v = v * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
            ++digits;
        }
        if (digits == 0) throw DataError(path.string() + ": malformed header");
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P') throw DataError(path.string() + ": not a PGM/PPM file");
    const char kind = bytes[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw DataError(path.string() + ": unsupported netpbm type P" + std::string(1, kind));
    }
    pos = 2;
    RawImage img;
    img.width = number();
    img.height = number();
    if (number() != 255) throw DataError(path.string() + ": only maxval 255 is supported");
    img.channels = (kind == '3' || kind == '6') ? 3 : 1;
    const std::size_t n = img.height * img.width * img.channels;
    if (kind == '5' || kind == '6') {
        ++pos;  // single whitespace byte after maxval
        if (bytes.size() - std::min(pos, bytes.size()) != n) throw DataError(path.string() + ": wrong payload size");
        img.samples.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t v = number();
            if (v > 255) throw DataError(path.string() + ": sample out of range");
            img.samples.push_back(static_cast<unsigned char>(v));
        }
    }
    return img;
}

// One grayscale image: H lines of W comma-separated integers in 0..255.
RawImage read_pixel_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    RawImage img;
    img.channels = 1;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(row, cell, ',')) {
            int v = -1;
            try {
                v = std::stoi(cell);
            } catch (const std::exception&) {
            }
            if (v < 0 || v > 255) throw DataError(path.string() + ": bad pixel value '" + cell + "'");
            img.samples.push_back(static_cast<unsigned char>(v));
            ++count;
        }
        if (img.height == 0) img.width = count;
        if (count != img.width) throw DataError(path.string() + ": ragged rows");
        ++img.height;
    }
    if (img.height == 0) throw DataError(path.string() + ": empty");
    return img;
}

std::map<std::string, std::uint32_t> read_labels(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("missing labels file " + path.string());
    std::istringstream in(read_file(path));
    std::map<std::string, std::uint32_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.rfind("file,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("labels.csv: expected 'file,label' in '" + line + "'");
        try {
            labels[line.substr(0, comma)] = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError("labels.csv: bad label in '" + line + "'");
        }
    }
    return labels;
}

int cmd_ingest(const json& cfg, const std::string& src) {
    if (src.empty()) throw UsageError("--src is required");
    if (!fs::is_directory(src)) throw DataError("not a directory: " + src);
    const std::string out = get<std::string>(cfg, "out");
    if (out.empty()) throw UsageError("--out is required");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(src)) {
        const std::string ext = entry.path().extension().string();
        const std::string name = entry.path().filename().string();
        if (name == "labels.csv") continue;
        if (ext == ".pgm" || ext == ".ppm" || ext == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no images in " + src);
    const auto labels = read_labels(fs::path(src) / "labels.csv");

    std::vector<RawImage> raws;
    std::vector<std::string> missing;
    std::vector<std::string> misshapen;
    std::vector<std::uint32_t> ys;
    for (const fs::path& f : files) {
        raws.push_back(f.extension() == ".csv" ? read_pixel_csv(f) : read_netpbm(f));
        const RawImage& r = raws.back();
        const RawImage& first = raws.front();
        if (r.height != first.height || r.width != first.width || r.channels != first.channels) {
            misshapen.push_back(f.filename().string());
        }
        const auto it = labels.find(f.filename().string());
        if (it == labels.end()) {
            missing.push_back(f.filename().string());
        } else {
            ys.push_back(it->second);
        }
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
        return s;
    };
    if (!misshapen.empty()) throw DataError("shape differs from " + files.front().filename().string() + ": " + join(misshapen));
    if (!missing.empty()) throw DataError("no label for: " + join(missing));

    Dataset ds;
    ds.height = raws.front().height;
    ds.width = raws.front().width;
    ds.channels = raws.front().channels;
    ds.num_classes = std::max<std::size_t>(2, *std::max_element(ys.begin(), ys.end()) + 1);
    for (std::size_t i = 0; i < raws.size(); ++i) {
        ImageTensor img(ds.height, ds.width, ds.channels);
        for (std::size_t k = 0; k < img.size(); ++k) img.data[k] = raws[i].samples[k] / 255.0;
        ds.images.push_back(std::move(img));
        ds.labels.push_back(ys[i]);
    }
    Manifest manifest;
    manifest.stats = compute_channel_stats(ds.images);
    manifest.provenance = "ingest";
    fs::create_directories(fs::path(out).parent_path().empty() ? fs::path(".") : fs::path(out).parent_path());
    write_mol1(out, standardize_dataset(ds, manifest.stats));
    write_manifest(out, manifest);
    std::cout << "ingested " << ds.size() << " images " << ds.height << "x" << ds.width << "x" << ds.channels << " -> "
              << out << "\n";
    return 0;
}

int cmd_export(const json& cfg) {
    const std::string path = required_dataset(cfg);
    const std::string out = get<std::string>(cfg, "out");
    if (out.empty()) throw UsageError("--out is required");
    const Dataset ds = read_mol1(path);
    const Manifest manifest = read_manifest(path);
    if (ds.channels != 1 && ds.channels != 3) throw DataError("export supports 1 or 3 channels");
    fs::create_directories(out);
    std::string labels = "file,label\n";
    const std::size_t digits = std::to_string(ds.size()).size();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::string name = std::to_string(i);
        name = std::string(digits - name.size(), '0') + name + (ds.channels == 1 ? ".pgm" : ".ppm");
        const std::vector<unsigned char> samples = quantize_unit(destandardize(ds.images[i], manifest.stats));
        std::string bytes = (ds.channels == 1 ? "P5\n" : "P6\n") + std::to_string(ds.width) + " " +
                            std::to_string(ds.height) + "\n255\n";
        bytes.append(samples.begin(), samples.end());
        write_file_atomic(fs::path(out) / name, bytes);
        labels += name + "," + std::to_string(ds.labels[i]) + "\n";
    }
    write_file_atomic(fs::path(out) / "labels.csv", labels);
    std::cout << "exported " << ds.size() << " images -> " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const json& cfg, const std::string& kind, std::size_t count, std::size_t size, std::size_t channels,
              const std::string& stats_from) {
    const std::string out = get<std::string>(cfg, "out");
    if (out.empty()) throw UsageError("--out is required");
    const auto seed = get<std::uint64_t>(cfg, "seed");
    Dataset ds;
    if (kind == "texture") {
        ds = texture_dataset(count, seed);
    } else if (kind == "pink") {
        ds = pink_noise_dataset(count, size, size, channels, seed);
    } else {
        throw UsageError("--kind must be texture or pink");
    }
    Manifest manifest;
    manifest.stats = stats_from.empty() ? compute_channel_stats(ds.images) : read_manifest(stats_from).stats;
    manifest.provenance = kind + " seed " + std::to_string(seed);
    write_mol1(out, standardize_dataset(ds, manifest.stats));
    write_manifest(out, manifest);
    std::cout << "wrote " << ds.size() << " " << kind << " images -> " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------- schedule

int cmd_schedule(const json& cfg, std::size_t width) {
    const ScheduleConfig sched = schedule_from(cfg);
    const std::string dataset = get<std::string>(cfg, "dataset");
    if (!dataset.empty()) width = read_mol1(required_dataset(cfg)).width;
    sched.validate(width);
    const auto steps = get<std::size_t>(cfg.at("analysis"), "t_steps");
    if (steps < 2) throw UsageError("--t-steps must be at least 2");
    RunDir run(cfg, "schedule");
    std::string csv = "t,alpha,sigma,snr,gamma_noise,sigma_b,tau,gamma_blur\n";
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = i + 1 == steps ? 1.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
        const NoiseMix m = alpha_sigma(t);
        const double sb = blur_sigma(t, sched, width);
        csv += csv_number(t) + "," + csv_number(m.alpha) + "," + csv_number(m.sigma) + "," + csv_number(snr(t)) + "," +
               csv_number(gamma_noise(t, sched.k_noise)) + "," + csv_number(sb) + "," +
               csv_number(dissipation_time(sb)) + "," + csv_number(gamma_blur(t, sched.k_blur)) + "\n";
    }
    run.write("schedule.csv", csv);
    run.finish({{"width", width}});
    return 0;
}

// ---------------------------------------------------------------- train / eval

int cmd_train(const json& cfg) {
    const Dataset ds = read_mol1(required_dataset(cfg));
    const TrainConfig tc = train_from(cfg);
    tc.validate();
    RunDir run(cfg, "train");
    const TrainResult result = train(ds, tc, [&](const EpochStats& e) {
        std::cerr << "epoch " << e.epoch + 1 << "/" << tc.epochs << " loss " << e.loss << " lr " << e.lr << " ("
                  << e.seconds << " s)\n";
    });
    const json extra = {{"config_hash", run.hash()}, {"seed", tc.seed}, {"loss", loss_name(tc.loss)}};
    run.write("params.bin", encode_params(result.params, extra.dump()));
    run.write("train_log.csv", result.report.to_csv());
    run.finish({{"final_loss", result.report.epochs.empty() ? 0.0 : result.report.epochs.back().loss}});
    return 0;
}

int cmd_eval(const json& cfg, const std::string& params_path) {
    if (params_path.empty()) throw UsageError("--params is required");
    if (!fs::exists(params_path)) throw DataError("params not found: " + params_path);
    const Dataset ds = read_mol1(required_dataset(cfg));
    const MlpParams params = decode_params(read_file(params_path));
    const auto bins = get<std::size_t>(cfg.at("eval"), "bins");
    if (bins < 1) throw UsageError("--bins must be at least 1");
    RunDir run(cfg, "eval");

    std::vector<PredictionRecord> records = predict_batch(params, ds, "clean");
    if (get<bool>(cfg.at("eval"), "corruptions")) {
        const auto seed = get<std::uint64_t>(cfg, "seed");
        for (CorruptionKind kind : kAllCorruptions) {
            for (int s = 1; s <= kMaxSeverity; ++s) {
                Dataset corrupted = ds;
                const std::uint64_t key = static_cast<std::uint64_t>(kind) * 16 + static_cast<std::uint64_t>(s);
                corrupted.images = corrupt_all(ds.images, kind, s, Stream(seed).derive(key).next_u64());
                const auto part = predict_batch(params, corrupted, corruption_tag(kind, s));
                records.insert(records.end(), part.begin(), part.end());
            }
        }
    }
    for (const PredictionRecord& r : records) {
        for (double p : r.probs) {
            if (!std::isfinite(p)) throw NumericalError("eval: non-finite prediction");
        }
    }
    const EvalReport report = evaluate(records, bins);
    json out = json::parse(report_json(report));
    out["config_hash"] = run.hash();
    run.write("report.json", out.dump(2) + "\n");
    run.write("report.txt", report_table(report));
    run.write("predictions.csv", records_to_csv(records));
    std::vector<PredictionRecord> clean(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(ds.size()));
    run.write("calibration.csv", bins_to_csv(calibration_bins(clean, bins)));
    run.finish({{"params", params_path}});
    std::cout << report_table(report);
    return 0;
}

// ---------------------------------------------------------------- mollify / analyses

int cmd_mollify(const json& cfg) {
    const std::string path = required_dataset(cfg);
    const Dataset ds = read_mol1(path);
    const ScheduleConfig sched = schedule_from(cfg);
    sched.validate(ds.width);
    RunDir run(cfg, "mollify");
    Stream rng(get<std::uint64_t>(cfg, "seed"));
    const std::vector<MollifiedExample> mollified = mollify_batch(ds.images, sched, rng);
    Dataset out = ds;
    std::string csv = "index,mode,t,gamma\n";
    for (std::size_t i = 0; i < mollified.size(); ++i) {
        out.images[i] = mollified[i].image;
        csv += std::to_string(i) + "," + std::string(to_string(mollified[i].params.mode)) + "," +
               csv_number(mollified[i].params.t) + "," + csv_number(mollified[i].gamma) + "\n";
    }
    run.write("mollified.mol1", encode_mol1(out));
    if (fs::exists(manifest_path(path))) {
        Manifest m = read_manifest(path);
        m.provenance += " | mollified " + run.hash();
        write_manifest(run.path("mollified.mol1"), m);
    }
    run.write("gammas.csv", csv);
    run.finish();
    return 0;
}

int cmd_infocurve(const json& cfg) {
    const std::string path = required_dataset(cfg);
    const Dataset ds = read_mol1(path);
    const Manifest manifest = read_manifest(path);
    const ScheduleConfig sched = schedule_from(cfg);
    sched.validate(ds.width);
    const auto steps = get<std::size_t>(cfg.at("analysis"), "t_steps");
    if (steps < 2) throw UsageError("--t-steps must be at least 2");
    RunDir run(cfg, "infocurve");
    std::vector<double> grid;
    for (std::size_t i = 0; i < steps; ++i) {
        grid.push_back(i + 1 == steps ? 1.0 : static_cast<double>(i) / static_cast<double>(steps - 1));
    }
    const auto curve = info_curve(ds.images, manifest.stats, sched, grid);
    run.write("infocurve.csv", info_curve_csv(curve));
    std::vector<double> ratios;
    std::vector<double> remaining;
    for (const auto& p : curve) {
        ratios.push_back(p.mean_ratio);
        remaining.push_back(1.0 - p.t);
    }
    run.finish({{"pearson_vs_1_minus_t", pearson(ratios, remaining)}});
    return 0;
}

int cmd_spectra(const json& cfg) {
    const Dataset ds = read_mol1(required_dataset(cfg));
    const json& a = cfg.at("analysis");
    const int severity = get<int>(a, "severity");
    const auto bands = get<std::size_t>(a, "bands");
    RunDir run(cfg, "spectra");
    const auto seed = get<std::uint64_t>(cfg, "seed");
    std::vector<SpectralDelta> deltas;
    json summary = json::object();
    for (CorruptionKind kind : kAllCorruptions) {
        const auto corrupted = corrupt_all(ds.images, kind, severity, Stream(seed).derive(static_cast<std::uint64_t>(kind)).next_u64());
        SpectralDelta d = spectral_delta(ds.images, corrupted);
        d.tag = corruption_tag(kind, severity);
        run.write("spectrum_" + std::string(to_string(kind)) + ".csv", spectral_grid_csv(d));
        std::vector<double> means;
        for (const Annulus& r : annulus_summary(d, bands)) {
            if (r.count > 0) means.push_back(r.mean);
        }
        summary[d.tag] = {{"annulus_cv", coefficient_of_variation(means)}};
        deltas.push_back(std::move(d));
    }
    run.write("annuli.csv", annulus_csv(deltas, bands));
    run.finish({{"summary", summary}});
    return 0;
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config; flags override it");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--out", f.out, "Output directory (file for ingest/synth)");
    sub->add_option("--dataset", f.dataset, "MOL1 dataset");
}

void add_schedule_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--k-noise", f.k_noise, "Noise label-decay exponent");
    sub->add_option("--k-blur", f.k_blur, "Blur label-decay exponent");
    sub->add_option("--beta-alpha", f.beta_alpha, "Temperature prior alpha");
    sub->add_option("--beta-beta", f.beta_beta, "Temperature prior beta");
    sub->add_option("--mode-probs", f.mode_probs, "none,noise,blur probabilities");
}

int run(int argc, char** argv) {
    CLI::App app{"Noise and blur mollification for classifier training"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Flags f;

    std::string src;
    auto* ingest = app.add_subcommand("ingest", "Directory of PGM/PPM or CSV images plus labels.csv -> MOL1");
    add_common(ingest, f);
    ingest->add_option("--src", src, "Source directory")->required();

    auto* exporter = app.add_subcommand("export", "MOL1 -> directory of PGM/PPM images plus labels.csv");
    add_common(exporter, f);

    std::string kind = "texture";
    std::size_t count = 1024;
    std::size_t size = 32;
    std::size_t channels = 1;
    std::string stats_from;
    auto* synth = app.add_subcommand("synth", "Write a procedural dataset");
    add_common(synth, f);
    synth->add_option("--kind", kind, "texture (4-class 16x16) or pink (1/f noise)");
    synth->add_option("--count", count, "Number of images");
    synth->add_option("--size", size, "Side length for pink images");
    synth->add_option("--channels", channels, "Channels for pink images");
    synth->add_option("--stats-from", stats_from, "Standardize with another dataset's manifest");

    std::size_t width = 32;
    auto* schedule = app.add_subcommand("schedule", "Dump the schedule curves as CSV");
    add_common(schedule, f);
    add_schedule_flags(schedule, f);
    schedule->add_option("--t-steps", f.t_steps, "Grid points including both ends");
    schedule->add_option("--width", width, "Image width when no dataset is given");

    auto* trainer = app.add_subcommand("train", "Train the MLP classifier");
    add_common(trainer, f);
    add_schedule_flags(trainer, f);
    trainer->add_option("--mollify", f.mollify, "Apply mollification during training");
    trainer->add_option("--loss", f.loss, "smoothed, tempered or normalized")
        ->check(CLI::IsMember({"smoothed", "tempered", "normalized"}));
    trainer->add_option("--epochs", f.epochs, "Training epochs");
    trainer->add_option("--batch-size", f.batch_size, "Mini-batch size");
    trainer->add_option("--lr", f.lr, "Initial learning rate");

    std::string params;
    auto* eval = app.add_subcommand("eval", "Error, NLL and ECE on clean and corrupted data");
    add_common(eval, f);
    eval->add_option("--params", params, "Parameter file from train");
    eval->add_option("--bins", f.bins, "ECE bins");
    eval->add_option("--corruptions", f.corruptions, "Also evaluate the 4 x 5 corruption grid");

    auto* mollify = app.add_subcommand("mollify", "Write a mollified copy of a dataset");
    add_common(mollify, f);
    add_schedule_flags(mollify, f);

    auto* infocurve = app.add_subcommand("infocurve", "PNG size ratio against blur level");
    add_common(infocurve, f);
    infocurve->add_option("--t-steps", f.t_steps, "Grid points including both ends");

    auto* spectra = app.add_subcommand("spectra", "Mean DCT change per corruption");
    add_common(spectra, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const json cfg = effective_config(f);
    if (ingest->parsed()) return cmd_ingest(cfg, src);
    if (exporter->parsed()) return cmd_export(cfg);
    if (synth->parsed()) return cmd_synth(cfg, kind, count, size, channels, stats_from);
    if (schedule->parsed()) return cmd_schedule(cfg, width);
    if (trainer->parsed()) return cmd_train(cfg);
    if (eval->parsed()) return cmd_eval(cfg, params);
    if (mollify->parsed()) return cmd_mollify(cfg);
    if (infocurve->parsed()) return cmd_infocurve(cfg);
    if (spectra->parsed()) return cmd_spectra(cfg);
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
