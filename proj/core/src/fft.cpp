#include "sgda/fft.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sgda {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative Cooley-Tukey, n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

// Bluestein chirp-z for arbitrary n, built on a power-of-two convolution.
// chirp_n = exp(-i*pi*n^2/N); the n^2 term is reduced mod 2N before the
// angle is formed to keep precision for large n.
void fft_bluestein(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = std::complex<double>(std::cos(ang), std::sin(ang));
    }

    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    std::vector<std::complex<double>> b(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);

    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    if (x.size() == 1) return;
    if (is_pow2(x.size())) {
        fft_pow2(x, inverse);
    } else {
        fft_bluestein(x, inverse);
    }
}

std::vector<std::complex<double>> fft(const std::vector<double>& real_input) {
    std::vector<std::complex<double>> x(real_input.begin(), real_input.end());
    fft_inplace(x, false);
    return x;
}

std::vector<double> fft_magnitude_onesided(const std::vector<double>& real_input) {
    const auto spectrum = fft(real_input);
    const std::size_t half = real_input.size() / 2;
    std::vector<double> mag(half + 1);
    for (std::size_t k = 0; k <= half; ++k) mag[k] = std::abs(spectrum[k]);
    return mag;
}

}  // namespace sgda
