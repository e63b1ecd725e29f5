#pragma once

#include <cstdint>
#include <vector>

#include "cascade/matrix.hpp"

namespace cascade {

struct KmeansResult {
    Matrix centers;                      // k x D
    std::vector<std::size_t> assignment;  // per point, lowest index on ties
    double mean_distortion = 0.0;         // mean squared distance to the assigned center
};

// Seeded k-means++ init followed by Lloyd iterations. Deterministic given
// (points, k, seed); empty clusters are re-seeded with the point farthest
// from its assigned center.
KmeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters = 50);

}  // namespace cascade
