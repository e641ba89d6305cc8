#pragma once
// Complex FFT helpers on top of Eigen's kissfft backend.
//
// Conventions (unnormalized):
//   forward:  X_k = sum_j x_j exp(-2*pi*i*j*k/N)
//   inverse:  x_j = sum_k X_k exp(+2*pi*i*j*k/N)        (no 1/N factor)

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace rtp {

inline void fft_forward(std::vector<std::complex<double>>& v) {
    thread_local Eigen::FFT<double> engine;
    std::vector<std::complex<double>> out(v.size());
    engine.fwd(out, v);
    v.swap(out);
}

inline void fft_inverse_unscaled(std::vector<std::complex<double>>& v) {
    for (auto& z : v) z = std::conj(z);
    fft_forward(v);
    for (auto& z : v) z = std::conj(z);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace rtp
