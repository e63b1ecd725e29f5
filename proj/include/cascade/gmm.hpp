#pragma once

#include <vector>

#include "cascade/matrix.hpp"

namespace cascade {

// Diagonal-covariance Gaussian mixture. Backs both the HMM state
// emissions and the standalone GMM baseline.
struct DiagGmm {
    std::vector<double> weights;  // simplex
    Matrix means;                 // M x D
    Matrix variances;             // M x D, floored positive

    std::size_t mixture_count() const { return weights.size(); }
    std::size_t dimension() const { return means.cols; }

    bool operator==(const DiagGmm&) const = default;
};

// log N(x; mean, diag var) for one frame.
double diag_gaussian_log_density(const double* x, const double* mean, const double* var, std::size_t dim);

// log sum_m w_m N(x; mean_m, var_m) for one frame.
double gmm_log_density(const DiagGmm& g, const double* x);

}  // namespace cascade
