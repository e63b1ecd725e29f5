#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cascade/audio.hpp"
#include "cascade/matrix.hpp"

namespace cascade {

struct MfccConfig {
    double preemphasis_alpha = 0.97;
    double frame_length_ms = 25.0;
    double hop_ms = 10.0;
    std::size_t fft_size = 0;  // 0 = next power of two >= frame length
    std::size_t mel_filter_count = 26;
    std::size_t static_coeff_count = 16;
    std::size_t delta_window = 2;
    bool include_c0 = false;
    bool cepstral_mean_normalization = false;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
    Matrix weights;                        // filter x (fft/2 + 1)
    std::vector<std::size_t> center_bins;  // each filter peaks at 1 here
};

MelFilterbank mel_filterbank(std::uint32_t sample_rate, std::size_t fft_size, std::size_t filter_count);

// Orthonormal DCT-II, n x n.
Matrix dct_matrix(std::size_t n);

// y[0] = x[0], y[n] = x[n] - alpha * x[n-1].
std::vector<double> preemphasize(std::span<const double> samples, double alpha);

// Frame k covers [k*hop, k*hop + frame_len); trailing partial frame dropped.
std::vector<std::vector<double>> frame_signal(std::span<const double> samples, std::size_t frame_len,
                                              std::size_t hop);

// Static cepstra, one row per frame. Keeps c1..c16 by default (c0 when
// include_c0 is set).
FeatureSequence compute_static_mfcc(const AudioClip& clip, const MfccConfig& config);

// Appends regression deltas; output dimension doubles.
FeatureSequence append_deltas(const FeatureSequence& features, std::size_t window);

// Full front end: static cepstra plus deltas (32-dim at the defaults).
FeatureSequence compute_features(const AudioClip& clip, const MfccConfig& config);

// Per-utterance extraction across a batch; OpenMP over clips.
std::vector<FeatureSequence> extract_batch(const std::vector<AudioClip>& clips, const MfccConfig& config);
std::vector<FeatureSequence> extract_batch_serial(const std::vector<AudioClip>& clips, const MfccConfig& config);

// Binary cache: magic "CSFC", version, T, D, row-major float64.
void write_feature_cache(const std::filesystem::path& path, const FeatureSequence& features);
FeatureSequence read_feature_cache(const std::filesystem::path& path);

}  // namespace cascade
