#include "cascade/gmm.hpp"

#include <cmath>

#include "cascade/numeric.hpp"

namespace cascade {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double diag_gaussian_log_density(const double* x, const double* mean, const double* var, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double diff = x[d] - mean[d];
        acc += std::log(var[d]) + diff * diff / var[d];
    }
    return -0.5 * (static_cast<double>(dim) * kLog2Pi + acc);
}

double gmm_log_density(const DiagGmm& g, const double* x) {
    const std::size_t M = g.mixture_count();
    const std::size_t D = g.dimension();
    double best = kNegInf;
    std::vector<double> lp(M);
    for (std::size_t m = 0; m < M; ++m) {
        lp[m] = g.weights[m] > 0.0
                    ? std::log(g.weights[m]) + diag_gaussian_log_density(x, g.means.row(m), g.variances.row(m), D)
                    : kNegInf;
        if (lp[m] > best) best = lp[m];
    }
    if (best == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) sum += std::exp(lp[m] - best);
    return best + std::log(sum);
}

}  // namespace cascade
