// Serial vs OpenMP timings for the hot kernels and batch feature extraction.
// Equivalence is asserted on every run; timings are informational.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "cascade/gmm.hpp"
#include "cascade/kernels.hpp"
#include "cascade/matrix.hpp"
#include "cascade/mfcc.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

DiagGmm random_gmm(Rng& rng, std::size_t M, std::size_t D) {
    DiagGmm g;
    g.weights.assign(M, 1.0 / static_cast<double>(M));
    g.means = Matrix(M, D);
    g.variances = Matrix(M, D);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t d = 0; d < D; ++d) {
            g.means(m, d) = rng.uniform(-2.0, 2.0);
            g.variances(m, d) = rng.uniform(0.3, 1.5);
        }
    return g;
}

Matrix random_frames(Rng& rng, std::size_t T, std::size_t D) {
    Matrix f(T, D);
    for (double& v : f.data) v = rng.uniform(-3.0, 3.0);
    return f;
}

double time_best_of(std::size_t reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        best = std::min(best, s);
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name.c_str(),
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "bit-identical" : "MISMATCH");
    if (!identical) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t frames_count = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
    const std::size_t reps = 5;
    std::printf("threads: %d, frames: %zu, best of %zu runs\n\n", omp_get_max_threads(),
                frames_count, reps);

    Rng rng(42);
    const std::size_t D = 32;
    const DiagGmm gmm = random_gmm(rng, 16, D);
    const Matrix frames = random_frames(rng, frames_count, D);

    {
        std::vector<double> out_p, out_s;
        const double tp = time_best_of(reps, [&] { kern::mixture_log_likelihoods(gmm, frames, out_p); });
        const double ts = time_best_of(reps, [&] { kern::serial::mixture_log_likelihoods(gmm, frames, out_s); });
        report("mixture_log_likelihoods", ts, tp, out_p == out_s);
    }

    {
        std::vector<DiagGmm> states;
        for (std::size_t s = 0; s < 6; ++s) states.push_back(random_gmm(rng, 3, D));
        Matrix out_p, out_s;
        const double tp = time_best_of(reps, [&] { kern::emission_log_probs(states, frames, out_p); });
        const double ts = time_best_of(reps, [&] { kern::serial::emission_log_probs(states, frames, out_s); });
        report("emission_log_probs", ts, tp, out_p == out_s);
    }

    {
        Matrix out_p, out_s;
        const double tp = time_best_of(reps, [&] { kern::component_log_densities(gmm, frames, out_p); });
        const double ts = time_best_of(reps, [&] { kern::serial::component_log_densities(gmm, frames, out_s); });
        report("component_log_densities", ts, tp, out_p == out_s);
    }

    {
        const Matrix codebook = random_frames(rng, 64, D);
        std::vector<std::size_t> idx_p, idx_s;
        std::vector<double> dist_p, dist_s;
        const double tp = time_best_of(reps, [&] { kern::nearest_codewords(codebook, frames, idx_p, dist_p); });
        const double ts = time_best_of(reps, [&] { kern::serial::nearest_codewords(codebook, frames, idx_s, dist_s); });
        report("nearest_codewords", ts, tp, idx_p == idx_s && dist_p == dist_s);
    }

    {
        std::vector<AudioClip> clips(24);
        for (auto& clip : clips) {
            clip.sample_rate = 16000;
            clip.samples.resize(16000);
            for (double& s : clip.samples) s = 0.3 * rng.uniform(-1.0, 1.0);
        }
        const MfccConfig cfg;
        std::vector<FeatureSequence> out_p, out_s;
        const double tp = time_best_of(reps, [&] { out_p = extract_batch(clips, cfg); });
        const double ts = time_best_of(reps, [&] { out_s = extract_batch_serial(clips, cfg); });
        report("extract_batch (24x1s mfcc)", ts, tp, out_p == out_s);
    }

    return 0;
}
