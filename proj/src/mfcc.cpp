#include "cascade/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "cascade/errors.hpp"
#include "cascade/fft.hpp"

namespace cascade {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEnergyFloor = 1e-10;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct FrontendPlan {
    std::size_t frame_len;
    std::size_t hop;
    std::size_t fft_size;
    std::vector<double> window;  // Hamming
    MelFilterbank bank;
    Matrix dct;  // mel_filter_count x mel_filter_count
};

FrontendPlan make_plan(std::uint32_t sample_rate, const MfccConfig& c) {
    if (c.preemphasis_alpha < 0.0 || c.preemphasis_alpha >= 1.0)
        throw ContractError("preemphasis alpha must be in [0, 1)");
    if (!(c.frame_length_ms > c.hop_ms && c.hop_ms > 0.0))
        throw ContractError("need frame_length_ms > hop_ms > 0");
    const std::size_t coeff_rows = c.static_coeff_count + (c.include_c0 ? 0 : 1);
    if (coeff_rows > c.mel_filter_count)
        throw ContractError("static_coeff_count exceeds mel filter count");

    FrontendPlan p;
    p.frame_len = static_cast<std::size_t>(std::llround(c.frame_length_ms * sample_rate / 1000.0));
    p.hop = static_cast<std::size_t>(std::llround(c.hop_ms * sample_rate / 1000.0));
    if (p.frame_len == 0 || p.hop == 0 || p.frame_len < p.hop)
        throw ContractError("degenerate frame/hop at this sample rate");
    p.fft_size = c.fft_size == 0 ? next_pow2(p.frame_len) : c.fft_size;
    if (!is_power_of_two(p.fft_size)) throw ContractError("fft_size must be a power of two");
    if (p.fft_size < p.frame_len) throw ContractError("fft_size smaller than frame length");

    p.window.resize(p.frame_len);
    for (std::size_t n = 0; n < p.frame_len; ++n)
        p.window[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (p.frame_len - 1));

    p.bank = mel_filterbank(sample_rate, p.fft_size, c.mel_filter_count);
    p.dct = dct_matrix(c.mel_filter_count);
    return p;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(std::uint32_t sample_rate, std::size_t fft_size, std::size_t filter_count) {
    if (filter_count == 0) throw ContractError("need at least one mel filter");
    const std::size_t bins = fft_size / 2 + 1;
    const double mel_max = hz_to_mel(sample_rate / 2.0);

    // Filter edges equally spaced on the mel scale, quantized to FFT bins.
    std::vector<std::size_t> pts(filter_count + 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double mel = mel_max * static_cast<double>(i) / static_cast<double>(filter_count + 1);
        pts[i] = static_cast<std::size_t>(std::floor((fft_size + 1) * mel_to_hz(mel) / sample_rate));
        pts[i] = std::min(pts[i], bins - 1);
    }

    MelFilterbank bank;
    bank.weights = Matrix(filter_count, bins, 0.0);
    bank.center_bins.resize(filter_count);
    for (std::size_t m = 0; m < filter_count; ++m) {
        const std::size_t lo = pts[m], mid = pts[m + 1], hi = pts[m + 2];
        for (std::size_t k = lo; k < mid; ++k)
            bank.weights(m, k) = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
        for (std::size_t k = mid; k < hi; ++k)
            bank.weights(m, k) = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
        bank.weights(m, mid) = 1.0;  // exact peak even when edges collapse onto one bin
        bank.center_bins[m] = mid;
    }
    return bank;
}

Matrix dct_matrix(std::size_t n) {
    Matrix m(n, n);
    const double scale0 = std::sqrt(1.0 / n);
    const double scale = std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = (i == 0 ? scale0 : scale) * std::cos(kPi * i * (2.0 * j + 1.0) / (2.0 * n));
    return m;
}

std::vector<double> preemphasize(std::span<const double> samples, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) throw ContractError("preemphasis alpha must be in [0, 1)");
    std::vector<double> out(samples.size());
    if (samples.empty()) return out;
    out[0] = samples[0];
    for (std::size_t n = 1; n < samples.size(); ++n) out[n] = samples[n] - alpha * samples[n - 1];
    return out;
}

std::vector<std::vector<double>> frame_signal(std::span<const double> samples, std::size_t frame_len,
                                              std::size_t hop) {
    if (frame_len < hop || hop == 0) throw ContractError("need frame_len >= hop >= 1");
    std::vector<std::vector<double>> frames;
    if (samples.size() < frame_len) return frames;
    const std::size_t count = (samples.size() - frame_len) / hop + 1;
    frames.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        frames.emplace_back(samples.begin() + k * hop, samples.begin() + k * hop + frame_len);
    return frames;
}

FeatureSequence compute_static_mfcc(const AudioClip& clip, const MfccConfig& config) {
    const FrontendPlan plan = make_plan(clip.sample_rate, config);

    const std::vector<double> emphasized = preemphasize(clip.samples, config.preemphasis_alpha);
    const auto frames = frame_signal(emphasized, plan.frame_len, plan.hop);
    if (frames.empty()) throw EmptyFeatureError("clip too short for a single frame");

    const std::size_t n_coeff = config.static_coeff_count;
    const std::size_t first_row = config.include_c0 ? 0 : 1;
    const std::size_t n_filters = config.mel_filter_count;

    FeatureSequence out(frames.size(), n_coeff);
    std::vector<double> windowed(plan.frame_len);
    std::vector<double> log_energy(n_filters);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (std::size_t n = 0; n < plan.frame_len; ++n) windowed[n] = frames[t][n] * plan.window[n];
        const std::vector<double> power = power_spectrum(windowed, plan.fft_size);
        for (std::size_t m = 0; m < n_filters; ++m) {
            double e = 0.0;
            const double* w = plan.bank.weights.row(m);
            for (std::size_t k = 0; k < power.size(); ++k) e += w[k] * power[k];
            log_energy[m] = std::log(std::max(e, kEnergyFloor));
        }
        for (std::size_t i = 0; i < n_coeff; ++i) {
            const double* d = plan.dct.row(first_row + i);
            double c = 0.0;
            for (std::size_t m = 0; m < n_filters; ++m) c += d[m] * log_energy[m];
            out(t, i) = c;
        }
    }

    if (config.cepstral_mean_normalization) {
        for (std::size_t i = 0; i < n_coeff; ++i) {
            double mean = 0.0;
            for (std::size_t t = 0; t < out.rows; ++t) mean += out(t, i);
            mean /= static_cast<double>(out.rows);
            for (std::size_t t = 0; t < out.rows; ++t) out(t, i) -= mean;
        }
    }
    return out;
}

FeatureSequence append_deltas(const FeatureSequence& features, std::size_t window) {
    if (features.rows == 0) throw ContractError("cannot append deltas to an empty sequence");
    if (window == 0) throw ContractError("delta window must be >= 1");
    const std::size_t T = features.rows, D = features.cols;
    double denom = 0.0;
    for (std::size_t n = 1; n <= window; ++n) denom += static_cast<double>(n * n);
    denom *= 2.0;

    FeatureSequence out(T, 2 * D);
    const auto tmax = static_cast<std::ptrdiff_t>(T) - 1;
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < D; ++d) out(t, d) = features(t, d);
        for (std::size_t d = 0; d < D; ++d) {
            double acc = 0.0;
            for (std::size_t n = 1; n <= window; ++n) {
                const auto fwd = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t + n), tmax);
                const auto back = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(n), 0);
                acc += static_cast<double>(n) * (features(fwd, d) - features(back, d));
            }
            out(t, D + d) = acc / denom;
        }
    }
    return out;
}

FeatureSequence compute_features(const AudioClip& clip, const MfccConfig& config) {
    return append_deltas(compute_static_mfcc(clip, config), config.delta_window);
}

std::vector<FeatureSequence> extract_batch(const std::vector<AudioClip>& clips, const MfccConfig& config) {
    std::vector<FeatureSequence> out(clips.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(clips.size()); ++i)
        out[i] = compute_features(clips[i], config);
    return out;
}

std::vector<FeatureSequence> extract_batch_serial(const std::vector<AudioClip>& clips, const MfccConfig& config) {
    std::vector<FeatureSequence> out(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) out[i] = compute_features(clips[i], config);
    return out;
}

void write_feature_cache(const std::filesystem::path& path, const FeatureSequence& features) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const char magic[4] = {'C', 'S', 'F', 'C'};
    const std::uint32_t version = 1;
    const auto T = static_cast<std::uint32_t>(features.rows);
    const auto D = static_cast<std::uint32_t>(features.cols);
    f.write(magic, 4);
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&T), 4);
    f.write(reinterpret_cast<const char*>(&D), 4);
    f.write(reinterpret_cast<const char*>(features.data.data()),
            static_cast<std::streamsize>(features.data.size() * sizeof(double)));
    if (!f) throw IoError("write failed: " + path.string());
}

FeatureSequence read_feature_cache(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    char magic[4];
    std::uint32_t version = 0, T = 0, D = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&T), 4);
    f.read(reinterpret_cast<char*>(&D), 4);
    if (!f || std::memcmp(magic, "CSFC", 4) != 0) throw FormatError("bad feature cache header: " + path.string());
    if (version != 1) throw UnsupportedFormatError("unknown feature cache version");
    FeatureSequence features(T, D);
    f.read(reinterpret_cast<char*>(features.data.data()),
           static_cast<std::streamsize>(features.data.size() * sizeof(double)));
    if (!f) throw FormatError("truncated feature cache: " + path.string());
    return features;
}

}  // namespace cascade
