#include "core/fft.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace qbh {

bool is_power_of_two(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    const size_t n = data.size();
    if (!is_power_of_two(n))
        throw argument_error("fft size must be a power of two, got " + std::to_string(n));

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = data[i + k];
                std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        for (auto& c : data) c /= static_cast<double>(n);
    }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x, size_t fft_size) {
    if (x.size() > fft_size)
        throw argument_error("frame longer than fft size");
    std::vector<std::complex<double>> data(fft_size, {0.0, 0.0});
    for (size_t i = 0; i < x.size(); ++i) data[i] = {x[i], 0.0};
    fft_inplace(data, false);
    return data;
}

}  // namespace qbh
