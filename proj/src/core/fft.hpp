#pragma once

#include <complex>
#include <vector>

namespace qbh {

bool is_power_of_two(size_t n);

// In-place radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

std::vector<std::complex<double>> fft_real(const std::vector<double>& x, size_t fft_size);

}  // namespace qbh
