// Parallel kernels against their serial references: wall time and the
// largest output difference.
//
//   bench_kernels [--reps N] [--batch N]

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "mollify/analysis.hpp"
#include "mollify/mlp.hpp"
#include "mollify/mollifier.hpp"
#include "mollify/synthetic.hpp"

using namespace mollify;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void report(const char* name, double parallel, double serial, double max_diff) {
    std::printf("%-16s parallel %9.3f ms  serial %9.3f ms  speedup %5.2fx  max diff %.1e\n", name, 1e3 * parallel,
                1e3 * serial, serial / parallel, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel vs serial kernel benchmark"};
    int reps = 5;
    std::size_t batch = 256;
    app.add_option("--reps", reps, "Timed repetitions per kernel");
    app.add_option("--batch", batch, "Images per batch");
    CLI11_PARSE(app, argc, argv);

    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
    const Dataset pink = pink_noise_dataset(batch, 32, 32, 3, 1);
    const ScheduleConfig cfg;

    {
        std::vector<MollifiedExample> a;
        std::vector<MollifiedExample> b;
        const double tp = seconds([&] { Stream rng(7); a = mollify_batch(pink.images, cfg, rng); }, reps);
        const double ts = seconds([&] { Stream rng(7); b = mollify_batch_serial(pink.images, cfg, rng); }, reps);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t k = 0; k < a[i].image.size(); ++k) {
                diff = std::max(diff, std::abs(a[i].image.data[k] - b[i].image.data[k]));
            }
        }
        report("mollify_batch", tp, ts, diff);
    }

    {
        Stream rng(3);
        const MlpParams params = MlpParams::he_init(32 * 32 * 3, 128, 10, rng);
        std::vector<SoftLabel> targets;
        for (std::size_t i = 0; i < batch; ++i) targets.push_back(training_target(i % 10, 10, 0.2, LossKind::Normalized));
        LossGradient a;
        LossGradient b;
        const double tp = seconds([&] { a = batch_gradient(params, pink.images, targets, LossKind::Normalized); }, reps);
        const double ts = seconds([&] { b = batch_gradient_serial(params, pink.images, targets, LossKind::Normalized); }, reps);
        const auto ga = a.gradient.flatten();
        const auto gb = b.gradient.flatten();
        double diff = std::abs(a.loss - b.loss);
        for (std::size_t i = 0; i < ga.size(); ++i) diff = std::max(diff, std::abs(ga[i] - gb[i]));
        report("batch_gradient", tp, ts, diff);
    }

    {
        const auto noisy = corrupt_all(pink.images, CorruptionKind::GaussNoise, 3, 5);
        SpectralDelta a;
        SpectralDelta b;
        const double tp = seconds([&] { a = spectral_delta(pink.images, noisy); }, reps);
        const double ts = seconds([&] { b = spectral_delta_serial(pink.images, noisy); }, reps);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.grid.size(); ++i) diff = std::max(diff, std::abs(a.grid[i] - b.grid[i]));
        report("spectral_delta", tp, ts, diff);
    }
    return 0;
}
