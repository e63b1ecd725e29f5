#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cascade/fft.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// O(n^2) DFT used as the independent reference.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -kTau * static_cast<double>(k) * static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("is_power_of_two") {
    CHECK(is_power_of_two(1));
    CHECK(is_power_of_two(2));
    CHECK(is_power_of_two(64));
    CHECK_FALSE(is_power_of_two(0));
    CHECK_FALSE(is_power_of_two(3));
    CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("fft of trivial sizes") {
    std::vector<std::complex<double>> one{{3.5, -1.0}};
    fft_inplace(one);
    CHECK(one[0] == std::complex<double>(3.5, -1.0));

    std::vector<std::complex<double>> two{{1.0, 0.0}, {2.0, 0.0}};
    fft_inplace(two);
    CHECK(two[0].real() == doctest::Approx(3.0));
    CHECK(two[1].real() == doctest::Approx(-1.0));
}

TEST_CASE("fft matches the naive dft on random inputs") {
    Rng rng(314);
    for (std::size_t n : {2u, 4u, 8u, 16u, 64u, 256u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto ref = naive_dft(x);
        fft_inplace(x);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(x[k].real() == doctest::Approx(ref[k].real()).epsilon(1e-9));
            CHECK(x[k].imag() == doctest::Approx(ref[k].imag()).epsilon(1e-9));
        }
    }
}

TEST_CASE("power spectrum of dc and of a pure bin tone") {
    std::vector<double> dc(8, 1.0);
    auto ps = power_spectrum(dc, 8);
    REQUIRE(ps.size() == 5);  // n/2 + 1
    CHECK(ps[0] == doctest::Approx(64.0));
    for (std::size_t k = 1; k < ps.size(); ++k) CHECK(ps[k] == doctest::Approx(0.0).epsilon(1e-12));

    const std::size_t n = 32, bin = 5;
    std::vector<double> tone(n);
    for (std::size_t t = 0; t < n; ++t) tone[t] = std::cos(kTau * bin * t / n);
    ps = power_spectrum(tone, n);
    for (std::size_t k = 0; k < ps.size(); ++k) {
        double expect = k == bin ? (n / 2.0) * (n / 2.0) : 0.0;
        CHECK(ps[k] == doctest::Approx(expect).epsilon(1e-9).scale(n * n));
    }
}

TEST_CASE("power spectrum zero-pads short input") {
    std::vector<double> x{1.0, -1.0, 0.5};
    auto ps = power_spectrum(x, 8);
    REQUIRE(ps.size() == 5);

    std::vector<std::complex<double>> padded(8, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) padded[i] = x[i];
    auto ref = naive_dft(padded);
    for (std::size_t k = 0; k < ps.size(); ++k)
        CHECK(ps[k] == doctest::Approx(std::norm(ref[k])).epsilon(1e-10));
}
