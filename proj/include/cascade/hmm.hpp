#pragma once

#include <cstdint>
#include <vector>

#include "cascade/gmm.hpp"
#include "cascade/matrix.hpp"

namespace cascade {

using GmmEmission = DiagGmm;

// Left-to-right (Bakis) continuous-density HMM: self-loop or advance one
// state, final state absorbing.
struct HmmModel {
    std::size_t state_count = 6;
    std::vector<double> initial_probs;  // simplex, (1, 0, ..., 0) after init
    Matrix transitions;                 // N x N row-stochastic
    std::vector<GmmEmission> emissions; // one mixture per state

    std::size_t dimension() const { return emissions.empty() ? 0 : emissions.front().dimension(); }

    bool operator==(const HmmModel&) const = default;
};

struct HmmInitConfig {
    std::size_t state_count = 6;
    std::size_t mixture_count = 3;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> log_likelihoods;  // total dataset log-likelihood per iteration
    std::size_t iterations = 0;           // M-steps applied
    bool converged = false;
};

// Per-dimension variance floor: 1e-3 of the global variance of the
// dataset, with a small absolute fallback where that is zero.
std::vector<double> variance_floor(const std::vector<FeatureSequence>& dataset);

// Uniform-segmentation init: each sequence is cut into state_count chunks,
// each state's pooled frames are clustered with seeded k-means.
HmmModel init_hmm(const std::vector<FeatureSequence>& dataset, const HmmInitConfig& config);

// log P(O | model), scaled forward recursion in log space.
double forward_log_likelihood(const HmmModel& model, const FeatureSequence& obs);

// Multi-sequence Baum-Welch. Per-sequence E-steps run in parallel and are
// merged in sequence order, so results are independent of thread count.
std::pair<HmmModel, TrainReport> baum_welch_train(const HmmModel& model,
                                                  const std::vector<FeatureSequence>& dataset,
                                                  std::size_t max_iters, double rel_tol);

}  // namespace cascade
