#include "cascade/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"
#include "cascade/kmeans.hpp"
#include "cascade/numeric.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

constexpr double kOccupancyEps = 1e-8;
constexpr double kSplitEps = 1e-3;

// 1e-3 of the per-dimension population variance, with an absolute floor
std::vector<double> frame_variance_floor(const Matrix& frames) {
    const std::size_t T = frames.rows, D = frames.cols;
    std::vector<double> mean(D, 0.0), sq(D, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* x = frames.row(t);
        for (std::size_t d = 0; d < D; ++d) {
            mean[d] += x[d];
            sq[d] += x[d] * x[d];
        }
    }
    std::vector<double> floor(D);
    for (std::size_t d = 0; d < D; ++d) {
        mean[d] /= static_cast<double>(T);
        const double var = sq[d] / static_cast<double>(T) - mean[d] * mean[d];
        floor[d] = std::max(var > 0.0 ? 1e-3 * var : 1e-8, 1e-8);
    }
    return floor;
}

}  // namespace

GmmModel train_gmm(const Matrix& frames, std::size_t mixture_count, std::uint64_t seed,
                   std::size_t max_iters, double rel_tol, std::vector<double>* ll_history) {
    if (mixture_count == 0) throw ContractError("mixture count must be >= 1");
    if (frames.rows < mixture_count)
        throw TrainingError("need at least " + std::to_string(mixture_count) + " frames, got " +
                            std::to_string(frames.rows));

    const std::size_t T = frames.rows, D = frames.cols, M = mixture_count;
    const std::vector<double> floor = frame_variance_floor(frames);

    GmmModel g;
    {
        const KmeansResult km = kmeans(frames, M, derive_seed(seed, "gmm-init"));
        g.weights.assign(M, 0.0);
        g.means = km.centers;
        g.variances = Matrix(M, D, 0.0);
        std::vector<double> count(M, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t c = km.assignment[t];
            count[c] += 1.0;
            const double* x = frames.row(t);
            for (std::size_t d = 0; d < D; ++d) g.variances(c, d) += x[d] * x[d];
        }
        for (std::size_t m = 0; m < M; ++m) {
            g.weights[m] = count[m] / static_cast<double>(T);
            for (std::size_t d = 0; d < D; ++d) {
                const double var =
                    count[m] > 0.0 ? g.variances(m, d) / count[m] - g.means(m, d) * g.means(m, d) : 0.0;
                g.variances(m, d) = std::max(var, floor[d]);
            }
        }
    }
    if (ll_history) ll_history->clear();

    Matrix comp;
    std::vector<double> frame_ll;
    double prev_ll = kNegInf;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        kern::component_log_densities(g, frames, comp);
        kern::mixture_log_likelihoods(g, frames, frame_ll);
        double ll = 0.0;
        for (double v : frame_ll) ll += v;
        if (ll_history) ll_history->push_back(ll);
        if (iter >= 1 && ll - prev_ll <= rel_tol * std::abs(prev_ll)) break;
        prev_ll = ll;

        std::vector<double> occ(M, 0.0);
        Matrix mean_num(M, D, 0.0), sq_num(M, D, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double* x = frames.row(t);
            for (std::size_t m = 0; m < M; ++m) {
                if (comp(t, m) == kNegInf) continue;
                const double r = std::exp(comp(t, m) - frame_ll[t]);
                occ[m] += r;
                double* mn = mean_num.row(m);
                double* sq = sq_num.row(m);
                for (std::size_t d = 0; d < D; ++d) {
                    mn[d] += r * x[d];
                    sq[d] += r * x[d] * x[d];
                }
            }
        }
        for (std::size_t m = 0; m < M; ++m) {
            g.weights[m] = occ[m] / static_cast<double>(T);
            if (occ[m] < kOccupancyEps) continue;  // keep the starved component's shape
            for (std::size_t d = 0; d < D; ++d) {
                const double mean = mean_num(m, d) / occ[m];
                g.means(m, d) = mean;
                g.variances(m, d) = std::max(sq_num(m, d) / occ[m] - mean * mean, floor[d]);
            }
        }
    }
    return g;
}

double gmm_log_likelihood(const GmmModel& model, const FeatureSequence& obs) {
    if (obs.rows > 0 && obs.cols != model.dimension())
        throw ContractError("observation dimension does not match model");
    std::vector<double> frame_ll;
    kern::mixture_log_likelihoods(model, obs, frame_ll);
    double total = 0.0;
    for (double v : frame_ll) total += v;
    return total;
}

VqCodebook train_vq_codebook(const Matrix& frames, std::size_t codebook_size, std::uint64_t seed) {
    (void)seed;  // splitting LBG has no random choices
    if (codebook_size == 0 || (codebook_size & (codebook_size - 1)) != 0)
        throw ContractError("codebook size must be a power of two");
    if (frames.rows < codebook_size)
        throw TrainingError("need at least " + std::to_string(codebook_size) + " frames, got " +
                            std::to_string(frames.rows));

    const std::size_t T = frames.rows, D = frames.cols;

    Matrix cb(1, D, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* x = frames.row(t);
        for (std::size_t d = 0; d < D; ++d) cb(0, d) += x[d];
    }
    for (std::size_t d = 0; d < D; ++d) cb(0, d) /= static_cast<double>(T);

    std::vector<std::size_t> idx;
    std::vector<double> sqdist;
    while (cb.rows < codebook_size) {
        Matrix split(cb.rows * 2, D);
        for (std::size_t k = 0; k < cb.rows; ++k)
            for (std::size_t d = 0; d < D; ++d) {
                split(2 * k, d) = cb(k, d) * (1.0 + kSplitEps);
                split(2 * k + 1, d) = cb(k, d) * (1.0 - kSplitEps);
            }
        cb = std::move(split);

        std::vector<std::size_t> prev;
        for (std::size_t iter = 0; iter < 100; ++iter) {
            kern::nearest_codewords(cb, frames, idx, sqdist);
            if (idx == prev) break;
            prev = idx;

            Matrix sum(cb.rows, D, 0.0);
            std::vector<double> count(cb.rows, 0.0);
            for (std::size_t t = 0; t < T; ++t) {
                const double* x = frames.row(t);
                double* s = sum.row(idx[t]);
                for (std::size_t d = 0; d < D; ++d) s[d] += x[d];
                count[idx[t]] += 1.0;
            }
            for (std::size_t k = 0; k < cb.rows; ++k) {
                if (count[k] == 0.0) continue;  // unused cell keeps its codeword
                for (std::size_t d = 0; d < D; ++d) cb(k, d) = sum(k, d) / count[k];
            }
        }
    }
    return VqCodebook{std::move(cb)};
}

double vq_distortion(const VqCodebook& codebook, const FeatureSequence& obs) {
    if (obs.rows == 0) throw ContractError("empty observation sequence");
    if (obs.cols != codebook.dimension()) throw ContractError("observation dimension does not match codebook");
    std::vector<std::size_t> idx;
    std::vector<double> sqdist;
    kern::nearest_codewords(codebook.codewords, obs, idx, sqdist);
    double total = 0.0;
    for (double v : sqdist) total += v;
    return total / static_cast<double>(obs.rows);
}

std::vector<double> aggregate_utterance(const FeatureSequence& obs) {
    if (obs.rows == 0) throw ContractError("empty observation sequence");
    const std::size_t T = obs.rows, D = obs.cols;
    std::vector<double> agg(2 * D, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* x = obs.row(t);
        for (std::size_t d = 0; d < D; ++d) {
            agg[d] += x[d];
            agg[D + d] += x[d] * x[d];
        }
    }
    for (std::size_t d = 0; d < D; ++d) {
        agg[d] /= static_cast<double>(T);
        const double var = agg[D + d] / static_cast<double>(T) - agg[d] * agg[d];
        agg[D + d] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return agg;
}

SvmOvrModel train_svm_ovr(const Matrix& vectors, const std::vector<std::size_t>& labels,
                          const std::vector<std::string>& class_labels, double regularization_c,
                          std::size_t epochs, std::uint64_t seed) {
    const std::size_t n = vectors.rows, F = vectors.cols, C = class_labels.size();
    if (C < 2) throw ContractError("need at least two classes");
    if (labels.size() != n) throw ContractError("one label per vector required");
    if (regularization_c <= 0.0) throw ContractError("regularization must be positive");

    std::vector<std::size_t> per_class(C, 0);
    for (std::size_t l : labels) {
        if (l >= C) throw ContractError("label index out of range");
        per_class[l] += 1;
    }
    for (std::size_t c = 0; c < C; ++c)
        if (per_class[c] == 0) throw TrainingError("class '" + class_labels[c] + "' has no examples");

    SvmOvrModel model;
    model.class_labels = class_labels;
    model.weights = Matrix(C, F, 0.0);
    model.biases.assign(C, 0.0);
    model.feature_mean.assign(F, 0.0);
    model.feature_scale.assign(F, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double* x = vectors.row(i);
        for (std::size_t d = 0; d < F; ++d) model.feature_mean[d] += x[d];
    }
    for (std::size_t d = 0; d < F; ++d) model.feature_mean[d] /= static_cast<double>(n);
    {
        std::vector<double> sq(F, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = vectors.row(i);
            for (std::size_t d = 0; d < F; ++d) {
                const double c = x[d] - model.feature_mean[d];
                sq[d] += c * c;
            }
        }
        for (std::size_t d = 0; d < F; ++d) {
            const double sd = std::sqrt(sq[d] / static_cast<double>(n));
            if (sd > 0.0) model.feature_scale[d] = sd;
        }
    }

    Matrix z(n, F);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = vectors.row(i);
        double* zi = z.row(i);
        for (std::size_t d = 0; d < F; ++d) zi[d] = (x[d] - model.feature_mean[d]) / model.feature_scale[d];
    }

    const double lambda = 1.0 / (regularization_c * static_cast<double>(n));
    for (std::size_t c = 0; c < C; ++c) {
        Rng rng(derive_seed(seed, "svm-class-" + std::to_string(c)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);

        double* w = model.weights.row(c);
        double b = 0.0;
        std::size_t t = 0;
        for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
            rng.shuffle(order);
            for (std::size_t i : order) {
                ++t;
                const double eta = 1.0 / (lambda * static_cast<double>(t));
                const double y = labels[i] == c ? 1.0 : -1.0;
                const double* zi = z.row(i);
                double margin = b;
                for (std::size_t d = 0; d < F; ++d) margin += w[d] * zi[d];
                margin *= y;

                const double shrink = 1.0 - eta * lambda;
                for (std::size_t d = 0; d < F; ++d) w[d] *= shrink;
                if (margin < 1.0) {
                    for (std::size_t d = 0; d < F; ++d) w[d] += eta * y * zi[d];
                    b += eta * y;
                }
            }
        }
        model.biases[c] = b;
    }
    return model;
}

std::vector<double> svm_scores(const SvmOvrModel& model, const std::vector<double>& vec) {
    const std::size_t F = model.feature_count(), C = model.class_count();
    if (vec.size() != F) throw ContractError("input dimension does not match model");
    std::vector<double> z(F);
    for (std::size_t d = 0; d < F; ++d) z[d] = (vec[d] - model.feature_mean[d]) / model.feature_scale[d];
    std::vector<double> scores(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        const double* w = model.weights.row(c);
        double s = model.biases[c];
        for (std::size_t d = 0; d < F; ++d) s += w[d] * z[d];
        scores[c] = s;
    }
    return scores;
}

}  // namespace cascade
