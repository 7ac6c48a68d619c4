#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "mollify/dataset.hpp"
#include "mollify/io.hpp"
#include "mollify/trainer.hpp"
#include "oracles.hpp"

using namespace mollify;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "mollify_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(MOLLIFY_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string p(const std::string& name) { return (workdir() / name).string(); }

// Four 8x8 grayscale images with labels 0..3.
fs::path make_pgm_dir() {
    const fs::path dir = workdir() / "raw";
    fs::create_directories(dir);
    std::string labels = "file,label\n";
    for (int i = 0; i < 4; ++i) {
        std::string bytes = "P5\n8 8\n255\n";
        for (int k = 0; k < 64; ++k) bytes.push_back(static_cast<char>((k * 7 + i * 31) % 256));
        const std::string name = "img" + std::to_string(i) + ".pgm";
        write_file_atomic(dir / name, bytes);
        labels += name + "," + std::to_string(i) + "\n";
    }
    write_file_atomic(dir / "labels.csv", labels);
    return dir;
}

}  // namespace

TEST_CASE("ingest computes stats and stores standardized images") {
    const fs::path raw = make_pgm_dir();
    REQUIRE(run("ingest --src " + raw.string() + " --out " + p("raw.mol1")) == 0);
    const Dataset ds = read_mol1(p("raw.mol1"));
    CHECK(ds.size() == 4);
    CHECK(ds.height == 8);
    CHECK(ds.num_classes == 4);
    const Manifest m = read_manifest(p("raw.mol1"));

    std::vector<ImageTensor> unit;
    for (int i = 0; i < 4; ++i) {
        ImageTensor img(8, 8, 1);
        for (int k = 0; k < 64; ++k) img.data[k] = ((k * 7 + i * 31) % 256) / 255.0;
        unit.push_back(img);
    }
    const auto oracle = oracle::two_pass_moments(unit);
    CHECK(m.stats.mean[0] == doctest::Approx(oracle.mean[0]).epsilon(1e-12));
    CHECK(m.stats.std[0] == doctest::Approx(oracle.std[0]).epsilon(1e-12));
    CHECK(ds.images[1].data[5] == doctest::Approx((unit[1].data[5] - oracle.mean[0]) / oracle.std[0]).epsilon(1e-6));
}

TEST_CASE("re-ingesting an export gives identical bytes") {
    const fs::path raw = make_pgm_dir();
    REQUIRE(run("ingest --src " + raw.string() + " --out " + p("a.mol1")) == 0);
    REQUIRE(run("export --dataset " + p("a.mol1") + " --out " + p("exported")) == 0);
    REQUIRE(run("ingest --src " + p("exported") + " --out " + p("b.mol1")) == 0);
    CHECK(read_file(p("a.mol1")) == read_file(p("b.mol1")));

    REQUIRE(run("synth --kind pink --count 3 --size 8 --channels 3 --seed 2 --out " + p("rgb.mol1")) == 0);
    REQUIRE(run("export --dataset " + p("rgb.mol1") + " --out " + p("rgb_a")) == 0);
    REQUIRE(run("ingest --src " + p("rgb_a") + " --out " + p("rgb_b.mol1")) == 0);
    REQUIRE(run("export --dataset " + p("rgb_b.mol1") + " --out " + p("rgb_c")) == 0);
    REQUIRE(run("ingest --src " + p("rgb_c") + " --out " + p("rgb_d.mol1")) == 0);
    CHECK(read_file(p("rgb_b.mol1")) == read_file(p("rgb_d.mol1")));
}

TEST_CASE("ingest accepts CSV pixel files") {
    const fs::path dir = workdir() / "csv";
    fs::create_directories(dir);
    write_file_atomic(dir / "a.csv", "0,255\n128,64\n");
    write_file_atomic(dir / "b.csv", "1,2\n3,4\n");
    write_file_atomic(dir / "labels.csv", "a.csv,0\nb.csv,1\n");
    REQUIRE(run("ingest --src " + dir.string() + " --out " + p("csv.mol1")) == 0);
    CHECK(read_mol1(p("csv.mol1")).size() == 2);
}

TEST_CASE("ingest errors") {
    fs::create_directories(workdir() / "empty");
    CHECK(run("ingest --src " + p("empty") + " --out " + p("e.mol1")) == 3);

    const fs::path dir = workdir() / "bad";
    fs::create_directories(dir);
    write_file_atomic(dir / "a.csv", "1,2\n3,4\n");
    write_file_atomic(dir / "b.csv", "1,2,3\n3,4,5\n");
    write_file_atomic(dir / "labels.csv", "a.csv,0\nb.csv,1\n");
    CHECK(run("ingest --src " + dir.string() + " --out " + p("bad.mol1")) == 3);
    write_file_atomic(dir / "b.csv", "1,2\n3,4\n");
    write_file_atomic(dir / "labels.csv", "a.csv,0\n");
    CHECK(run("ingest --src " + dir.string() + " --out " + p("bad.mol1")) == 3);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("train --epochs notanumber --dataset x --out y") == 2);
    CHECK(run("train --loss hinge --dataset x --out y") == 2);
    CHECK(run("schedule --t-steps 1 --out " + p("s1")) == 2);
    CHECK(run("schedule --mode-probs 1,0 --out " + p("s1")) == 2);
    write_file_atomic(workdir() / "typo.json", R"({"trian": {}})");
    CHECK(run("schedule --config " + p("typo.json") + " --out " + p("s1")) == 2);
    CHECK(run("train --out " + p("t")) == 2);
    CHECK(run("train --dataset " + p("missing.mol1") + " --out " + p("t")) == 3);
}

TEST_CASE("schedule dump rows") {
    REQUIRE(run("schedule --t-steps 3 --width 16 --out " + p("sched")) == 0);
    std::ifstream in(workdir() / "sched" / "schedule.csv");
    std::string header, r0, r1, r2;
    std::getline(in, header);
    std::getline(in, r0);
    std::getline(in, r1);
    std::getline(in, r2);
    CHECK(header == "t,alpha,sigma,snr,gamma_noise,sigma_b,tau,gamma_blur");
    CHECK(r0.rfind("0,1,0,inf,0,0.29999999999999999,", 0) == 0);
    CHECK(r1.rfind("0.5,", 0) == 0);
    CHECK(r1.find(",0.5,") != std::string::npos);
    CHECK(r2.rfind("1,0,1,0,1,16,", 0) == 0);
    CHECK(fs::exists(workdir() / "sched" / "config.json"));
    const auto meta = nlohmann::json::parse(read_file(workdir() / "sched" / "run.json"));
    CHECK(meta.at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("train twice gives byte-identical parameters; config and flags agree") {
    REQUIRE(run("synth --kind texture --count 64 --seed 3 --out " + p("tex.mol1")) == 0);
    const std::string common = "train --dataset " + p("tex.mol1") + " --epochs 2 --seed 9";
    REQUIRE(run(common + " --out " + p("t1")) == 0);
    REQUIRE(run(common + " --out " + p("t2")) == 0);
    CHECK(read_file(p("t1/params.bin")) == read_file(p("t2/params.bin")));
    CHECK(read_file(p("t1/train_log.csv")) == read_file(p("t2/train_log.csv")));

    write_file_atomic(workdir() / "cfg.json", R"({"seed": 9, "train": {"epochs": 2}})");
    REQUIRE(run("train --config " + p("cfg.json") + " --dataset " + p("tex.mol1") + " --out " + p("t3")) == 0);
    CHECK(read_file(p("t1/params.bin")) == read_file(p("t3/params.bin")));
    REQUIRE(run(common + " --mollify false --out " + p("t4")) == 0);
    CHECK(read_file(p("t1/params.bin")) != read_file(p("t4/params.bin")));
}

TEST_CASE("eval of a zero-weight model is uniform") {
    REQUIRE(run("synth --kind texture --count 40 --seed 4 --out " + p("ev.mol1")) == 0);
    const MlpParams zero(256, 4, 4);
    write_file_atomic(workdir() / "zero.bin", encode_params(zero));
    REQUIRE(run("eval --dataset " + p("ev.mol1") + " --params " + p("zero.bin") + " --out " + p("ev")) == 0);
    const auto report = nlohmann::json::parse(read_file(workdir() / "ev" / "report.json"));
    CHECK(report.at("overall").at("error").get<double>() == doctest::Approx(0.75));
    CHECK(report.at("overall").at("nll").get<double>() == doctest::Approx(std::log(4.0)).epsilon(1e-9));

    REQUIRE(run("eval --corruptions true --dataset " + p("ev.mol1") + " --params " + p("zero.bin") + " --out " + p("evc")) ==
            0);
    const auto full = nlohmann::json::parse(read_file(workdir() / "evc" / "report.json"));
    CHECK(full.at("by_tag").size() == 21);
    CHECK(run("eval --dataset " + p("ev.mol1") + " --params " + p("missing.bin") + " --out " + p("evx")) == 3);
}

TEST_CASE("mollify with only the identity mode copies the dataset") {
    REQUIRE(run("synth --kind texture --count 16 --seed 5 --out " + p("m.mol1")) == 0);
    REQUIRE(run("mollify --mode-probs 1,0,0 --dataset " + p("m.mol1") + " --out " + p("mo")) == 0);
    CHECK(read_file(p("mo/mollified.mol1")) == read_file(p("m.mol1")));
    const std::string gammas = read_file(p("mo/gammas.csv"));
    CHECK(gammas.find(",none,0,0\n") != std::string::npos);
    CHECK(gammas.find("noise") == std::string::npos);

    REQUIRE(run("mollify --seed 1 --dataset " + p("m.mol1") + " --out " + p("mo2")) == 0);
    CHECK(read_file(p("mo2/mollified.mol1")) != read_file(p("m.mol1")));
    CHECK(read_file(p("m.mol1")) == encode_mol1(read_mol1(p("m.mol1"))));
}

TEST_CASE("analysis commands write their tables") {
    REQUIRE(run("synth --kind pink --count 8 --size 16 --seed 6 --out " + p("pink.mol1")) == 0);
    REQUIRE(run("infocurve --t-steps 5 --dataset " + p("pink.mol1") + " --out " + p("ic")) == 0);
    const std::string curve = read_file(p("ic/infocurve.csv"));
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 6);
    REQUIRE(run("spectra --dataset " + p("pink.mol1") + " --out " + p("sp")) == 0);
    CHECK(fs::exists(workdir() / "sp" / "annuli.csv"));
    CHECK(fs::exists(workdir() / "sp" / "spectrum_gauss_blur.csv"));
}
