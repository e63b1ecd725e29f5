#include "cascade/hmm.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"
#include "cascade/kmeans.hpp"
#include "cascade/numeric.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

constexpr double kOccupancyEps = 1e-8;
constexpr double kAbsoluteVarFloor = 1e-8;

Matrix log_transitions(const HmmModel& m) {
    Matrix la(m.state_count, m.state_count, kNegInf);
    for (std::size_t i = 0; i < m.state_count; ++i)
        for (std::size_t j = 0; j < m.state_count; ++j)
            if (m.transitions(i, j) > 0.0) la(i, j) = std::log(m.transitions(i, j));
    return la;
}

void check_obs(const HmmModel& model, const FeatureSequence& obs) {
    if (obs.rows == 0) throw ContractError("empty observation sequence");
    if (obs.cols != model.dimension()) throw ContractError("observation dimension does not match model");
}

// log-space forward pass; returns log alpha (T x N) and the sequence
// log-likelihood
double forward_pass(const Matrix& log_a, const std::vector<double>& log_pi, const Matrix& log_b,
                    Matrix& log_alpha) {
    const std::size_t T = log_b.rows, N = log_b.cols;
    log_alpha = Matrix(T, N, kNegInf);
    for (std::size_t j = 0; j < N; ++j) log_alpha(0, j) = log_pi[j] + log_b(0, j);
    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t j = 0; j < N; ++j) {
            double acc = kNegInf;
            for (std::size_t i = 0; i < N; ++i) {
                const double term = log_alpha(t - 1, i) + log_a(i, j);
                if (term != kNegInf) acc = log_add(acc, term);
            }
            log_alpha(t, j) = acc + log_b(t, j);
        }
    }
    double ll = kNegInf;
    for (std::size_t j = 0; j < N; ++j) ll = log_add(ll, log_alpha(T - 1, j));
    return ll;
}

void backward_pass(const Matrix& log_a, const Matrix& log_b, Matrix& log_beta) {
    const std::size_t T = log_b.rows, N = log_b.cols;
    log_beta = Matrix(T, N, 0.0);
    for (std::size_t tt = T - 1; tt-- > 0;) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = kNegInf;
            for (std::size_t j = 0; j < N; ++j) {
                const double term = log_a(i, j) + log_b(tt + 1, j) + log_beta(tt + 1, j);
                if (term != kNegInf) acc = log_add(acc, term);
            }
            log_beta(tt, i) = acc;
        }
    }
}

// accumulated expected counts for one EM pass
struct BwStats {
    double loglik = 0.0;
    std::vector<double> pi_acc;      // N
    Matrix trans_num;                // N x N
    std::vector<double> trans_den;   // N
    Matrix occupancy;                // N x M
    std::vector<Matrix> mean_num;    // per state: M x D
    std::vector<Matrix> sq_num;      // per state: M x D (second moment)

    BwStats() = default;
    BwStats(std::size_t n, std::size_t m, std::size_t d)
        : pi_acc(n, 0.0), trans_num(n, n, 0.0), trans_den(n, 0.0), occupancy(n, m, 0.0) {
        mean_num.assign(n, Matrix(m, d, 0.0));
        sq_num.assign(n, Matrix(m, d, 0.0));
    }

    void merge(const BwStats& o) {
        loglik += o.loglik;
        for (std::size_t i = 0; i < pi_acc.size(); ++i) pi_acc[i] += o.pi_acc[i];
        for (std::size_t i = 0; i < trans_num.data.size(); ++i) trans_num.data[i] += o.trans_num.data[i];
        for (std::size_t i = 0; i < trans_den.size(); ++i) trans_den[i] += o.trans_den[i];
        for (std::size_t i = 0; i < occupancy.data.size(); ++i) occupancy.data[i] += o.occupancy.data[i];
        for (std::size_t s = 0; s < mean_num.size(); ++s) {
            for (std::size_t i = 0; i < mean_num[s].data.size(); ++i) {
                mean_num[s].data[i] += o.mean_num[s].data[i];
                sq_num[s].data[i] += o.sq_num[s].data[i];
            }
        }
    }
};

BwStats accumulate_sequence(const HmmModel& model, const Matrix& log_a, const std::vector<double>& log_pi,
                            const FeatureSequence& obs) {
    const std::size_t N = model.state_count;
    const std::size_t M = model.emissions.front().mixture_count();
    const std::size_t D = model.dimension();
    const std::size_t T = obs.rows;

    Matrix log_b;
    kern::serial::emission_log_probs(model.emissions, obs, log_b);

    Matrix log_alpha, log_beta;
    BwStats st(N, M, D);
    st.loglik = forward_pass(log_a, log_pi, log_b, log_alpha);
    backward_pass(log_a, log_b, log_beta);

    // state occupancies
    Matrix gamma(T, N, 0.0);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < N; ++j) {
            const double lg = log_alpha(t, j) + log_beta(t, j) - st.loglik;
            gamma(t, j) = lg == kNegInf ? 0.0 : std::exp(lg);
        }

    for (std::size_t j = 0; j < N; ++j) st.pi_acc[j] += gamma(0, j);

    for (std::size_t t = 0; t + 1 < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            st.trans_den[i] += gamma(t, i);
            if (log_alpha(t, i) == kNegInf) continue;
            for (std::size_t j = 0; j < N; ++j) {
                if (log_a(i, j) == kNegInf) continue;
                const double lx =
                    log_alpha(t, i) + log_a(i, j) + log_b(t + 1, j) + log_beta(t + 1, j) - st.loglik;
                if (lx != kNegInf) st.trans_num(i, j) += std::exp(lx);
            }
        }
    }

    // per-mixture responsibilities
    Matrix comp;
    for (std::size_t j = 0; j < N; ++j) {
        kern::serial::component_log_densities(model.emissions[j], obs, comp);
        for (std::size_t t = 0; t < T; ++t) {
            if (gamma(t, j) == 0.0) continue;
            const double* x = obs.row(t);
            for (std::size_t m = 0; m < M; ++m) {
                if (comp(t, m) == kNegInf) continue;
                const double r = gamma(t, j) * std::exp(comp(t, m) - log_b(t, j));
                st.occupancy(j, m) += r;
                double* mn = st.mean_num[j].row(m);
                double* sq = st.sq_num[j].row(m);
                for (std::size_t d = 0; d < D; ++d) {
                    mn[d] += r * x[d];
                    sq[d] += r * x[d] * x[d];
                }
            }
        }
    }
    return st;
}

void apply_m_step(HmmModel& model, const BwStats& st, std::size_t num_sequences,
                  const std::vector<double>& floor) {
    const std::size_t N = model.state_count;
    const std::size_t M = model.emissions.front().mixture_count();
    const std::size_t D = model.dimension();

    for (std::size_t j = 0; j < N; ++j)
        model.initial_probs[j] = st.pi_acc[j] / static_cast<double>(num_sequences);

    for (std::size_t i = 0; i < N; ++i) {
        if (st.trans_den[i] <= kOccupancyEps) continue;  // state unseen before the last frame
        for (std::size_t j = 0; j < N; ++j) model.transitions(i, j) = st.trans_num(i, j) / st.trans_den[i];
        double row_sum = 0.0;
        for (std::size_t j = 0; j < N; ++j) row_sum += model.transitions(i, j);
        if (row_sum > 0.0)
            for (std::size_t j = 0; j < N; ++j) model.transitions(i, j) /= row_sum;
    }

    for (std::size_t j = 0; j < N; ++j) {
        double total = 0.0;
        for (std::size_t m = 0; m < M; ++m) total += st.occupancy(j, m);
        if (total < kOccupancyEps) continue;  // empty-state rescue: keep previous parameters
        GmmEmission& g = model.emissions[j];
        for (std::size_t m = 0; m < M; ++m) {
            const double occ = st.occupancy(j, m);
            g.weights[m] = occ / total;
            if (occ < kOccupancyEps) continue;  // keep the component's previous shape
            const double* mn = st.mean_num[j].row(m);
            const double* sq = st.sq_num[j].row(m);
            for (std::size_t d = 0; d < D; ++d) {
                const double mean = mn[d] / occ;
                g.means(m, d) = mean;
                g.variances(m, d) = std::max(sq[d] / occ - mean * mean, floor[d]);
            }
        }
    }
}

}  // namespace

std::vector<double> variance_floor(const std::vector<FeatureSequence>& dataset) {
    if (dataset.empty()) throw ContractError("empty dataset");
    const std::size_t D = dataset.front().cols;
    std::size_t total = 0;
    std::vector<double> mean(D, 0.0), sq(D, 0.0);
    for (const auto& seq : dataset) {
        if (seq.cols != D) throw ContractError("inconsistent feature dimensions in dataset");
        for (std::size_t t = 0; t < seq.rows; ++t) {
            const double* x = seq.row(t);
            for (std::size_t d = 0; d < D; ++d) {
                mean[d] += x[d];
                sq[d] += x[d] * x[d];
            }
        }
        total += seq.rows;
    }
    if (total == 0) throw ContractError("dataset has no frames");
    std::vector<double> floor(D);
    for (std::size_t d = 0; d < D; ++d) {
        mean[d] /= static_cast<double>(total);
        const double var = sq[d] / static_cast<double>(total) - mean[d] * mean[d];
        floor[d] = var > 0.0 ? 1e-3 * var : kAbsoluteVarFloor;
        floor[d] = std::max(floor[d], kAbsoluteVarFloor);
    }
    return floor;
}

HmmModel init_hmm(const std::vector<FeatureSequence>& dataset, const HmmInitConfig& config) {
    if (dataset.empty()) throw ContractError("empty dataset");
    if (config.state_count == 0 || config.mixture_count == 0)
        throw ContractError("state and mixture counts must be >= 1");
    const std::size_t N = config.state_count;
    const std::size_t M = config.mixture_count;
    const std::size_t D = dataset.front().cols;
    for (const auto& seq : dataset) {
        if (seq.cols != D) throw ContractError("inconsistent feature dimensions in dataset");
        if (seq.rows < N)
            throw TrainingError("sequence of " + std::to_string(seq.rows) + " frames is shorter than " +
                                std::to_string(N) + " states");
    }

    const std::vector<double> floor = variance_floor(dataset);

    // pool each state's frames across sequences by uniform segmentation
    std::vector<Matrix> pooled(N);
    {
        std::vector<std::size_t> counts(N, 0);
        for (const auto& seq : dataset)
            for (std::size_t s = 0; s < N; ++s)
                counts[s] += seq.rows * (s + 1) / N - seq.rows * s / N;
        for (std::size_t s = 0; s < N; ++s) pooled[s] = Matrix(counts[s], D);
        std::vector<std::size_t> fill(N, 0);
        for (const auto& seq : dataset) {
            for (std::size_t s = 0; s < N; ++s) {
                const std::size_t lo = seq.rows * s / N, hi = seq.rows * (s + 1) / N;
                for (std::size_t t = lo; t < hi; ++t)
                    std::copy_n(seq.row(t), D, pooled[s].row(fill[s]++));
            }
        }
    }

    HmmModel model;
    model.state_count = N;
    model.initial_probs.assign(N, 0.0);
    model.initial_probs[0] = 1.0;
    model.transitions = Matrix(N, N, 0.0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        model.transitions(i, i) = 0.6;
        model.transitions(i, i + 1) = 0.4;
    }
    model.transitions(N - 1, N - 1) = 1.0;

    model.emissions.resize(N);
    for (std::size_t s = 0; s < N; ++s) {
        const Matrix& pts = pooled[s];
        if (pts.rows < M)
            throw TrainingError("state " + std::to_string(s) + " has fewer pooled frames than mixtures");
        const KmeansResult km = kmeans(pts, M, derive_seed(config.seed, "init-state-" + std::to_string(s)));

        GmmEmission g;
        g.weights.assign(M, 0.0);
        g.means = Matrix(M, D);
        g.variances = Matrix(M, D);
        std::vector<double> count(M, 0.0);
        Matrix sq(M, D, 0.0);
        for (std::size_t t = 0; t < pts.rows; ++t) {
            const std::size_t c = km.assignment[t];
            count[c] += 1.0;
            const double* x = pts.row(t);
            for (std::size_t d = 0; d < D; ++d) sq(c, d) += x[d] * x[d];
        }
        for (std::size_t m = 0; m < M; ++m) {
            g.weights[m] = count[m] / static_cast<double>(pts.rows);
            for (std::size_t d = 0; d < D; ++d) {
                g.means(m, d) = km.centers(m, d);
                const double var =
                    count[m] > 0.0 ? sq(m, d) / count[m] - g.means(m, d) * g.means(m, d) : 0.0;
                g.variances(m, d) = std::max(var, floor[d]);
            }
        }
        model.emissions[s] = std::move(g);
    }
    return model;
}

double forward_log_likelihood(const HmmModel& model, const FeatureSequence& obs) {
    check_obs(model, obs);
    Matrix log_b;
    kern::emission_log_probs(model.emissions, obs, log_b);
    std::vector<double> log_pi(model.state_count);
    for (std::size_t j = 0; j < model.state_count; ++j)
        log_pi[j] = model.initial_probs[j] > 0.0 ? std::log(model.initial_probs[j]) : kNegInf;
    Matrix log_alpha;
    return forward_pass(log_transitions(model), log_pi, log_b, log_alpha);
}

std::pair<HmmModel, TrainReport> baum_welch_train(const HmmModel& model,
                                                  const std::vector<FeatureSequence>& dataset,
                                                  std::size_t max_iters, double rel_tol) {
    if (dataset.empty()) throw TrainingError("empty training set");
    for (const auto& seq : dataset) {
        if (seq.cols != model.dimension()) throw TrainingError("feature dimension does not match model");
        if (seq.rows < model.state_count)
            throw TrainingError("sequence shorter than the state count");
    }

    HmmModel current = model;
    TrainReport report;
    if (max_iters == 0) return {current, report};

    const std::vector<double> floor = variance_floor(dataset);
    const std::size_t R = dataset.size();
    const std::size_t N = current.state_count;
    const std::size_t M = current.emissions.front().mixture_count();
    const std::size_t D = current.dimension();

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const Matrix log_a = log_transitions(current);
        std::vector<double> log_pi(N);
        for (std::size_t j = 0; j < N; ++j)
            log_pi[j] = current.initial_probs[j] > 0.0 ? std::log(current.initial_probs[j]) : kNegInf;

        std::vector<BwStats> per_seq(R);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(R); ++r)
            per_seq[r] = accumulate_sequence(current, log_a, log_pi, dataset[r]);

        BwStats total(N, M, D);
        for (const auto& st : per_seq) total.merge(st);  // fixed order keeps results thread-count independent

        report.log_likelihoods.push_back(total.loglik);
        const std::size_t k = report.log_likelihoods.size();
        if (k >= 2) {
            const double prev = report.log_likelihoods[k - 2];
            const double gain = total.loglik - prev;
            if (gain <= rel_tol * std::abs(prev)) {
                report.converged = true;
                break;  // current model produced this likelihood; stop before touching it
            }
        }
        apply_m_step(current, total, R, floor);
        report.iterations += 1;
    }
    return {current, report};
}

}  // namespace cascade
