#include <doctest.h>

#include <cmath>
#include <vector>

#include "cascade/baselines.hpp"
#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"
#include "cascade/numeric.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Matrix gaussian_blob(std::size_t n, double mx, double my, double sd, Rng& rng) {
    Matrix pts(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        pts(i, 0) = rng.normal(mx, sd);
        pts(i, 1) = rng.normal(my, sd);
    }
    return pts;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows + b.rows, a.cols);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
    return out;
}

}  // namespace

TEST_CASE("single-component gmm is the sample mean and variance") {
    Matrix frames(4, 2);
    double vals[4][2] = {{0, 1}, {2, 1}, {0, 3}, {2, 3}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) frames(i, j) = vals[i][j];

    GmmModel g = train_gmm(frames, 1, 42);
    REQUIRE(g.mixture_count() == 1);
    CHECK(g.weights[0] == doctest::Approx(1.0));
    CHECK(g.means(0, 0) == doctest::Approx(1.0));
    CHECK(g.means(0, 1) == doctest::Approx(2.0));
    CHECK(g.variances(0, 0) == doctest::Approx(1.0));  // population convention
    CHECK(g.variances(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("well-separated clusters get dedicated components") {
    Rng rng(7);
    Matrix a = gaussian_blob(60, 0.0, 0.0, 0.4, rng);
    Matrix b = gaussian_blob(60, 10.0, 10.0, 0.4, rng);  // 25 sigma apart
    Matrix frames = vstack(a, b);

    GmmModel g = train_gmm(frames, 2, 3);

    // Posterior of each point concentrates on its own cluster's component.
    Matrix comp;
    kern::serial::component_log_densities(g, frames, comp);
    const std::size_t comp_a = g.means(0, 0) < g.means(1, 0) ? 0 : 1;
    for (std::size_t t = 0; t < frames.rows; ++t) {
        const double denom = log_add(comp(t, 0), comp(t, 1));
        const double post_own = std::exp(comp(t, t < 60 ? comp_a : 1 - comp_a) - denom);
        CHECK(post_own >= 0.99);
    }
    CHECK(g.weights[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("gmm training is deterministic and tracks its likelihood history") {
    Rng rng(12);
    Matrix frames = vstack(gaussian_blob(40, 0, 0, 1.0, rng), gaussian_blob(40, 4, -2, 1.0, rng));

    std::vector<double> hist1, hist2;
    GmmModel g1 = train_gmm(frames, 4, 99, 50, 1e-6, &hist1);
    GmmModel g2 = train_gmm(frames, 4, 99, 50, 1e-6, &hist2);
    CHECK(g1 == g2);
    CHECK(hist1 == hist2);

    REQUIRE(hist1.size() >= 2);
    for (std::size_t i = 1; i < hist1.size(); ++i) CHECK(hist1[i] >= hist1[i - 1] - 1e-6);
}

TEST_CASE("gmm rejects bad inputs") {
    Matrix two(2, 1);
    two(0, 0) = 0.0;
    two(1, 0) = 1.0;
    CHECK_THROWS_AS(train_gmm(two, 3, 0), TrainingError);  // fewer frames than components
    CHECK_THROWS_AS(train_gmm(two, 0, 0), ContractError);
}

TEST_CASE("gmm log-likelihood closed forms") {
    GmmModel g;
    g.weights = {1.0};
    g.means = Matrix(1, 2);
    g.means(0, 0) = 1.0;
    g.means(0, 1) = -1.0;
    g.variances = Matrix(1, 2);
    g.variances(0, 0) = 2.0;
    g.variances(0, 1) = 0.5;

    FeatureSequence peak(1, 2);
    peak(0, 0) = 1.0;
    peak(0, 1) = -1.0;
    const double expect = -0.5 * (std::log(kTwoPi * 2.0) + std::log(kTwoPi * 0.5));
    CHECK(gmm_log_likelihood(g, peak) == doctest::Approx(expect).epsilon(1e-13));

    FeatureSequence wrong(1, 3);
    CHECK_THROWS_AS(gmm_log_likelihood(g, wrong), ContractError);
}

TEST_CASE("gmm scores add over concatenation") {
    Rng rng(31);
    GmmModel g = train_gmm(gaussian_blob(30, 0, 0, 1.0, rng), 2, 5);
    Matrix a = gaussian_blob(7, 0, 0, 1.0, rng);
    Matrix b = gaussian_blob(9, 1, 1, 1.0, rng);
    CHECK(gmm_log_likelihood(g, vstack(a, b)) ==
          doctest::Approx(gmm_log_likelihood(g, a) + gmm_log_likelihood(g, b)).epsilon(1e-12));
}

TEST_CASE("gmm density matches a direct mixture sum") {
    Rng rng(44);
    GmmModel g = train_gmm(gaussian_blob(25, 0, 0, 1.5, rng), 3, 8);
    Matrix frames = gaussian_blob(10, 0, 0, 1.5, rng);

    double direct_total = 0.0;
    for (std::size_t t = 0; t < frames.rows; ++t) {
        double p = 0.0;
        for (std::size_t m = 0; m < g.mixture_count(); ++m) {
            double quad = 0.0, norm = 1.0;
            for (std::size_t d = 0; d < 2; ++d) {
                const double diff = frames(t, d) - g.means(m, d);
                quad += diff * diff / g.variances(m, d);
                norm *= kTwoPi * g.variances(m, d);
            }
            p += g.weights[m] * std::exp(-0.5 * quad) / std::sqrt(norm);
        }
        direct_total += std::log(p);
    }
    CHECK(gmm_log_likelihood(g, frames) == doctest::Approx(direct_total).epsilon(1e-10));
}

TEST_CASE("single codeword is the centroid") {
    Matrix frames(3, 2);
    double vals[3][2] = {{0, 0}, {3, 0}, {0, 3}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) frames(i, j) = vals[i][j];

    VqCodebook cb = train_vq_codebook(frames, 1, 0);
    REQUIRE(cb.size() == 1);
    CHECK(cb.codewords(0, 0) == doctest::Approx(1.0));
    CHECK(cb.codewords(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("two distinct points are quantized exactly") {
    Matrix frames(6, 1);
    for (std::size_t i = 0; i < 6; ++i) frames(i, 0) = i % 2 == 0 ? -2.0 : 5.0;

    VqCodebook cb = train_vq_codebook(frames, 2, 0);
    REQUIRE(cb.size() == 2);
    const double lo = std::min(cb.codewords(0, 0), cb.codewords(1, 0));
    const double hi = std::max(cb.codewords(0, 0), cb.codewords(1, 0));
    CHECK(lo == doctest::Approx(-2.0));
    CHECK(hi == doctest::Approx(5.0));
    CHECK(vq_distortion(cb, frames) == doctest::Approx(0.0));
}

TEST_CASE("larger codebooks never fit worse") {
    Rng rng(17);
    Matrix frames = vstack(gaussian_blob(50, 0, 0, 1.0, rng), gaussian_blob(50, 6, 2, 1.5, rng));
    const double d2 = vq_distortion(train_vq_codebook(frames, 2, 0), frames);
    const double d4 = vq_distortion(train_vq_codebook(frames, 4, 0), frames);
    CHECK(d4 <= d2 + 1e-12);
}

TEST_CASE("vq validates sizes") {
    Matrix frames(3, 1);
    CHECK_THROWS_AS(train_vq_codebook(frames, 3, 0), ContractError);  // not a power of two
    CHECK_THROWS_AS(train_vq_codebook(frames, 8, 0), TrainingError);  // not enough frames
}

TEST_CASE("distortion agrees with a brute-force nearest search") {
    Rng rng(23);
    Matrix frames = gaussian_blob(40, 0, 0, 2.0, rng);
    VqCodebook cb = train_vq_codebook(gaussian_blob(64, 0, 0, 2.0, rng), 8, 0);

    double total = 0.0;
    for (std::size_t t = 0; t < frames.rows; ++t) {
        double best = 1e300;
        for (std::size_t k = 0; k < cb.size(); ++k) {
            double sq = 0.0;
            for (std::size_t d = 0; d < 2; ++d) {
                const double diff = frames(t, d) - cb.codewords(k, d);
                sq += diff * diff;
            }
            best = std::min(best, sq);
        }
        total += best;
    }
    CHECK(vq_distortion(cb, frames) == doctest::Approx(total / 40.0).epsilon(1e-12));

    FeatureSequence one(1, 2);
    one(0, 0) = cb.codewords(0, 0) + 3.0;
    one(0, 1) = cb.codewords(0, 1);
    // distance to codeword 0 is 3 but a closer one may exist; pin with a 1-word book
    VqCodebook single;
    single.codewords = Matrix(1, 2);
    single.codewords(0, 0) = 1.0;
    single.codewords(0, 1) = 2.0;
    FeatureSequence probe(1, 2);
    probe(0, 0) = 1.0;
    probe(0, 1) = 4.5;
    CHECK(vq_distortion(single, probe) == doctest::Approx(6.25));  // d = 2.5

    FeatureSequence empty;
    CHECK_THROWS_AS(vq_distortion(single, empty), ContractError);
}

TEST_CASE("utterance aggregation is mean plus population sd") {
    FeatureSequence constant(5, 3, 2.0);
    auto agg = aggregate_utterance(constant);
    REQUIRE(agg.size() == 6);
    for (std::size_t d = 0; d < 3; ++d) {
        CHECK(agg[d] == 2.0);
        CHECK(agg[3 + d] == 0.0);
    }

    FeatureSequence single(1, 2);
    single(0, 0) = -1.0;
    single(0, 1) = 4.0;
    agg = aggregate_utterance(single);
    CHECK(agg == std::vector<double>{-1.0, 4.0, 0.0, 0.0});

    FeatureSequence sym(2, 2);
    sym(0, 0) = 3.0;
    sym(0, 1) = -0.5;
    sym(1, 0) = -3.0;
    sym(1, 1) = 0.5;
    agg = aggregate_utterance(sym);
    CHECK(agg[0] == doctest::Approx(0.0));
    CHECK(agg[1] == doctest::Approx(0.0));
    CHECK(agg[2] == doctest::Approx(3.0));
    CHECK(agg[3] == doctest::Approx(0.5));

    FeatureSequence empty;
    CHECK_THROWS_AS(aggregate_utterance(empty), ContractError);
}

TEST_CASE("svm separates two points and is deterministic") {
    Matrix vecs(2, 1);
    vecs(0, 0) = -1.0;
    vecs(1, 0) = 1.0;
    std::vector<std::size_t> labels{0, 1};
    std::vector<std::string> names{"neg", "pos"};

    SvmOvrModel m = train_svm_ovr(vecs, labels, names, 1.0, 100, 5);
    auto s0 = svm_scores(m, {-1.0});
    auto s1 = svm_scores(m, {1.0});
    CHECK(s0[0] > s0[1]);
    CHECK(s1[1] > s1[0]);

    SvmOvrModel m2 = train_svm_ovr(vecs, labels, names, 1.0, 100, 5);
    CHECK(m == m2);
    CHECK(svm_scores(m2, {0.25}) == svm_scores(m, {0.25}));
}

TEST_CASE("svm recovers three separated clusters") {
    Rng rng(61);
    Matrix all(150, 2);
    std::vector<std::size_t> labels(150);
    const double centers[3][2] = {{0, 0}, {30, 0}, {0, 30}};  // >= 10 sigma margins
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 50; ++i) {
            all(c * 50 + i, 0) = rng.normal(centers[c][0], 1.0);
            all(c * 50 + i, 1) = rng.normal(centers[c][1], 1.0);
            labels[c * 50 + i] = c;
        }

    SvmOvrModel m = train_svm_ovr(all, labels, {"a", "b", "c"}, 1.0, 200, 9);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 150; ++i) {
        auto scores = svm_scores(m, {all(i, 0), all(i, 1)});
        std::size_t best = 0;
        for (std::size_t c = 1; c < 3; ++c)
            if (scores[c] > scores[best]) best = c;
        if (best == labels[i]) ++correct;
    }
    CHECK(correct >= 143);  // >= 95%
}

TEST_CASE("svm validates its inputs") {
    Matrix vecs(2, 1);
    vecs(1, 0) = 1.0;
    CHECK_THROWS_AS(train_svm_ovr(vecs, {0, 0}, {"only"}, 1.0, 10, 0), ContractError);
    CHECK_THROWS_AS(train_svm_ovr(vecs, {0, 0}, {"a", "b"}, 1.0, 10, 0), TrainingError);  // b empty
    CHECK_THROWS_AS(train_svm_ovr(vecs, {0, 1}, {"a", "b"}, -1.0, 10, 0), ContractError);
    SvmOvrModel m = train_svm_ovr(vecs, {0, 1}, {"a", "b"}, 1.0, 10, 0);
    CHECK_THROWS_AS(svm_scores(m, {1.0, 2.0}), ContractError);  // wrong dimension
}
