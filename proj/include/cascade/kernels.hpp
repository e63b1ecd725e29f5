#pragma once

#include <vector>

#include "cascade/gmm.hpp"
#include "cascade/matrix.hpp"

namespace cascade::kern {

// Hot inner kernels, OpenMP-parallel over frames. Every output slot is
// computed independently with a fixed inner summation order, so results
// are bit-identical to the serial versions below at any thread count.

// out[t] = log sum_m w_m N(frame_t; mean_m, var_m)
void mixture_log_likelihoods(const DiagGmm& g, const Matrix& frames, std::vector<double>& out);

// out(t, j) = log b_j(frame_t) for per-state mixtures
void emission_log_probs(const std::vector<DiagGmm>& states, const Matrix& frames, Matrix& out);

// out(t, m) = log w_m + log N(frame_t; mean_m, var_m), un-summed table
void component_log_densities(const DiagGmm& g, const Matrix& frames, Matrix& out);

// index of the nearest codeword per frame plus its squared distance;
// ties go to the lowest index
void nearest_codewords(const Matrix& codebook, const Matrix& frames, std::vector<std::size_t>& idx,
                       std::vector<double>& sqdist);

namespace serial {

// Reference implementations, plain loops. Kept for equivalence tests and
// the serial-vs-OpenMP benchmark.
void mixture_log_likelihoods(const DiagGmm& g, const Matrix& frames, std::vector<double>& out);
void emission_log_probs(const std::vector<DiagGmm>& states, const Matrix& frames, Matrix& out);
void component_log_densities(const DiagGmm& g, const Matrix& frames, Matrix& out);
void nearest_codewords(const Matrix& codebook, const Matrix& frames, std::vector<std::size_t>& idx,
                       std::vector<double>& sqdist);

}  // namespace serial

}  // namespace cascade::kern
