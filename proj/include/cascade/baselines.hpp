#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascade/gmm.hpp"
#include "cascade/matrix.hpp"

namespace cascade {

using GmmModel = DiagGmm;

// Frame-level Gaussian mixture classifier. Seeded k-means init, then EM until
// the data log-likelihood gain drops below rel_tol (relative) or max_iters.
// ll_history, when non-null, receives the log-likelihood of the model at the
// start of each EM iteration.
GmmModel train_gmm(const Matrix& frames, std::size_t mixture_count, std::uint64_t seed,
                   std::size_t max_iters = 100, double rel_tol = 1e-5,
                   std::vector<double>* ll_history = nullptr);

// sum over frames of the per-frame mixture log-density
double gmm_log_likelihood(const GmmModel& model, const FeatureSequence& obs);

struct VqCodebook {
    Matrix codewords;  // K x D, K a power of two

    std::size_t size() const { return codewords.rows; }
    std::size_t dimension() const { return codewords.cols; }
    bool operator==(const VqCodebook&) const = default;
};

// LBG: binary splitting from the global centroid with perturbation 1e-3,
// Lloyd refinement after each split. Fully deterministic; the seed is kept
// for signature uniformity with the other trainers.
VqCodebook train_vq_codebook(const Matrix& frames, std::size_t codebook_size, std::uint64_t seed);

// mean squared Euclidean distance to the nearest codeword
double vq_distortion(const VqCodebook& codebook, const FeatureSequence& obs);

// per-dimension mean then population standard deviation, concatenated (2D)
std::vector<double> aggregate_utterance(const FeatureSequence& obs);

struct SvmOvrModel {
    std::vector<std::string> class_labels;
    Matrix weights;                     // class x feature
    std::vector<double> biases;         // per class
    std::vector<double> feature_mean;   // standardizer, per feature
    std::vector<double> feature_scale;  // standardizer, per feature, > 0

    std::size_t class_count() const { return class_labels.size(); }
    std::size_t feature_count() const { return weights.cols; }
    bool operator==(const SvmOvrModel&) const = default;
};

// Linear one-vs-rest hinge-loss classifier trained by Pegasos-style
// subgradient descent on standardized inputs, one fixed epoch budget per
// class, example order shuffled per epoch from the seed.
SvmOvrModel train_svm_ovr(const Matrix& vectors, const std::vector<std::size_t>& labels,
                          const std::vector<std::string>& class_labels, double regularization_c,
                          std::size_t epochs, std::uint64_t seed);

// signed margin per class for one (unstandardized) input vector
std::vector<double> svm_scores(const SvmOvrModel& model, const std::vector<double>& vec);

}  // namespace cascade
