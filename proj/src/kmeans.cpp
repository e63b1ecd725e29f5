#include "cascade/kmeans.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"
#include "cascade/rng.hpp"

namespace cascade {

namespace {

double sqdist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

// k-means++ seeding
Matrix seed_centers(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t T = points.rows, D = points.cols;
    Matrix centers(k, D);
    std::vector<double> best(T, 0.0);

    std::size_t first = rng.index(T);
    std::copy_n(points.row(first), D, centers.row(0));
    for (std::size_t t = 0; t < T; ++t) best[t] = sqdist(points.row(t), centers.row(0), D);

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double b : best) total += b;
        std::size_t pick;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            pick = T - 1;
            for (std::size_t t = 0; t < T; ++t) {
                acc += best[t];
                if (acc >= target) {
                    pick = t;
                    break;
                }
            }
        } else {
            pick = rng.index(T);  // all remaining points coincide with a center
        }
        std::copy_n(points.row(pick), D, centers.row(c));
        for (std::size_t t = 0; t < T; ++t)
            best[t] = std::min(best[t], sqdist(points.row(t), centers.row(c), D));
    }
    return centers;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
    const std::size_t T = points.rows, D = points.cols;
    if (k == 0) throw ContractError("k must be >= 1");
    if (T < k) throw TrainingError("fewer points than clusters");

    Rng rng(seed);
    KmeansResult res;
    res.centers = seed_centers(points, k, rng);
    res.assignment.assign(T, 0);

    std::vector<std::size_t> idx;
    std::vector<double> dist;
    std::vector<double> counts(k);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        kern::nearest_codewords(res.centers, points, idx, dist);

        // re-seed empty clusters from the farthest points, in cluster order
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t t = 0; t < T; ++t) counts[idx[t]] += 1.0;
        bool reseeded = false;
        std::vector<bool> taken(T, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0.0) continue;
            std::size_t far_t = 0;
            double far_d = -1.0;
            for (std::size_t t = 0; t < T; ++t) {
                if (taken[t]) continue;
                if (dist[t] > far_d) {
                    far_d = dist[t];
                    far_t = t;
                }
            }
            taken[far_t] = true;
            std::copy_n(points.row(far_t), D, res.centers.row(c));
            reseeded = true;
        }
        if (reseeded) kern::nearest_codewords(res.centers, points, idx, dist);

        const bool unchanged = iter > 0 && idx == res.assignment;
        res.assignment = idx;
        if (unchanged) break;

        Matrix sums(k, D, 0.0);
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double* p = points.row(t);
            double* s = sums.row(idx[t]);
            for (std::size_t d = 0; d < D; ++d) s[d] += p[d];
            counts[idx[t]] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0.0)
                for (std::size_t d = 0; d < D; ++d) res.centers(c, d) = sums(c, d) / counts[c];
    }

    kern::nearest_codewords(res.centers, points, idx, dist);
    res.assignment = idx;
    double total = 0.0;
    for (double d2 : dist) total += d2;
    res.mean_distortion = total / static_cast<double>(T);
    return res;
}

}  // namespace cascade
