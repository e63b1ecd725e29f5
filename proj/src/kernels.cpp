#include "cascade/kernels.hpp"

#include <cmath>

#include "cascade/numeric.hpp"

namespace cascade::kern {

namespace {

void frame_mixture_ll(const DiagGmm& g, const double* x, double* row_out) {
    // row_out has mixture_count slots; returns per-component log densities
    const std::size_t M = g.mixture_count();
    const std::size_t D = g.dimension();
    for (std::size_t m = 0; m < M; ++m)
        row_out[m] = g.weights[m] > 0.0
                         ? std::log(g.weights[m]) +
                               diag_gaussian_log_density(x, g.means.row(m), g.variances.row(m), D)
                         : kNegInf;
}

double reduce_lse(const double* lp, std::size_t n) {
    double best = kNegInf;
    for (std::size_t m = 0; m < n; ++m)
        if (lp[m] > best) best = lp[m];
    if (best == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) sum += std::exp(lp[m] - best);
    return best + std::log(sum);
}

void one_frame_emissions(const std::vector<DiagGmm>& states, const double* x, double* out_row,
                         std::vector<double>& scratch) {
    for (std::size_t j = 0; j < states.size(); ++j) {
        scratch.resize(states[j].mixture_count());
        frame_mixture_ll(states[j], x, scratch.data());
        out_row[j] = reduce_lse(scratch.data(), scratch.size());
    }
}

std::size_t nearest_one(const Matrix& codebook, const double* x, double& best_dist) {
    const std::size_t K = codebook.rows, D = codebook.cols;
    std::size_t best = 0;
    best_dist = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double* c = codebook.row(k);
        double d2 = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            const double diff = x[d] - c[d];
            d2 += diff * diff;
        }
        if (k == 0 || d2 < best_dist) {
            best_dist = d2;
            best = k;
        }
    }
    return best;
}

}  // namespace

void mixture_log_likelihoods(const DiagGmm& g, const Matrix& frames, std::vector<double>& out) {
    out.resize(frames.rows);
#pragma omp parallel
    {
        std::vector<double> scratch(g.mixture_count());
#pragma omp for schedule(static)
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(frames.rows); ++t) {
            frame_mixture_ll(g, frames.row(t), scratch.data());
            out[t] = reduce_lse(scratch.data(), scratch.size());
        }
    }
}

void emission_log_probs(const std::vector<DiagGmm>& states, const Matrix& frames, Matrix& out) {
    out = Matrix(frames.rows, states.size());
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(frames.rows); ++t)
            one_frame_emissions(states, frames.row(t), out.row(t), scratch);
    }
}

void component_log_densities(const DiagGmm& g, const Matrix& frames, Matrix& out) {
    out = Matrix(frames.rows, g.mixture_count());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(frames.rows); ++t)
        frame_mixture_ll(g, frames.row(t), out.row(t));
}

void nearest_codewords(const Matrix& codebook, const Matrix& frames, std::vector<std::size_t>& idx,
                       std::vector<double>& sqdist) {
    idx.resize(frames.rows);
    sqdist.resize(frames.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(frames.rows); ++t)
        idx[t] = nearest_one(codebook, frames.row(t), sqdist[t]);
}

namespace serial {

void mixture_log_likelihoods(const DiagGmm& g, const Matrix& frames, std::vector<double>& out) {
    out.resize(frames.rows);
    std::vector<double> scratch(g.mixture_count());
    for (std::size_t t = 0; t < frames.rows; ++t) {
        frame_mixture_ll(g, frames.row(t), scratch.data());
        out[t] = reduce_lse(scratch.data(), scratch.size());
    }
}

void emission_log_probs(const std::vector<DiagGmm>& states, const Matrix& frames, Matrix& out) {
    out = Matrix(frames.rows, states.size());
    std::vector<double> scratch;
    for (std::size_t t = 0; t < frames.rows; ++t)
        one_frame_emissions(states, frames.row(t), out.row(t), scratch);
}

void component_log_densities(const DiagGmm& g, const Matrix& frames, Matrix& out) {
    out = Matrix(frames.rows, g.mixture_count());
    for (std::size_t t = 0; t < frames.rows; ++t) frame_mixture_ll(g, frames.row(t), out.row(t));
}

void nearest_codewords(const Matrix& codebook, const Matrix& frames, std::vector<std::size_t>& idx,
                       std::vector<double>& sqdist) {
    idx.resize(frames.rows);
    sqdist.resize(frames.rows);
    for (std::size_t t = 0; t < frames.rows; ++t) idx[t] = nearest_one(codebook, frames.row(t), sqdist[t]);
}

}  // namespace serial

}  // namespace cascade::kern
