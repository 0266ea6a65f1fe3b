#pragma once

#include <complex>
#include <vector>

namespace sgda {

// In-place complex FFT for arbitrary length: iterative radix-2 when n is a
// power of two, Bluestein's chirp-z otherwise. Deterministic and thread-safe.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse = false);

std::vector<std::complex<double>> fft(const std::vector<double>& real_input);

// One-sided magnitude |X_k| for k = 0..floor(n/2) of a real input, no window,
// no scaling.
std::vector<double> fft_magnitude_onesided(const std::vector<double>& real_input);

}  // namespace sgda
