#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cascade {

bool is_power_of_two(std::size_t n);

// In-place radix-2 Cooley-Tukey. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x);

// |X[k]|^2 for k = 0..n/2 over a zero-padded real input of length n.
// n must be a power of two and >= x.size().
std::vector<double> power_spectrum(std::span<const double> x, std::size_t n);

}  // namespace cascade
