#include "strato/fourier.hpp"

#include <fftw3.h>

#include <cmath>

#include "strato/errors.hpp"

namespace strato {

Dft::Dft(std::size_t n) : n_(n) {
    if (n < 8) fail(ErrorCode::InvalidParams, "horizontal grid needs at least 8 points");
    std::vector<Complex> scratch_in(n), scratch_out(n);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, flags);
    if (!fwd_ || !inv_) fail(ErrorCode::InvalidParams, "FFT plan creation failed");
}

Dft::~Dft() {
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Dft::forward(const Complex* in, Complex* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= scale;
}

void Dft::inverse(const Complex* in, Complex* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(inv_),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

std::vector<Complex> Dft::forward(const std::vector<double>& physical) const {
    if (physical.size() != n_) fail(ErrorCode::GridError, "field size does not match transform");
    std::vector<Complex> in(n_), out(n_);
    for (std::size_t i = 0; i < n_; ++i) in[i] = physical[i];
    forward(in.data(), out.data());
    return out;
}

std::vector<double> Dft::inverse_real(const std::vector<Complex>& spectral) const {
    if (spectral.size() != n_) fail(ErrorCode::GridError, "field size does not match transform");
    std::vector<Complex> out(n_);
    inverse(spectral.data(), out.data());
    std::vector<double> result(n_);
    for (std::size_t i = 0; i < n_; ++i) result[i] = out[i].real();
    return result;
}

std::vector<double> wavenumbers(std::size_t n, double length) {
    if (!(length > 0.0)) fail(ErrorCode::InvalidParams, "domain length must be positive");
    std::vector<double> k(n);
    const double base = 2.0 * std::acos(-1.0) / length;
    for (std::size_t j = 0; j < n; ++j) {
        const long long signed_j = (j <= n / 2) ? static_cast<long long>(j)
                                                : static_cast<long long>(j) -
                                                      static_cast<long long>(n);
        k[j] = base * static_cast<double>(signed_j);
    }
    return k;
}

std::vector<char> dealias_mask(std::size_t n) {
    std::vector<char> mask(n, 0);
    const long long cutoff = static_cast<long long>(n) / 3;
    for (std::size_t j = 0; j < n; ++j) {
        long long signed_j = (j <= n / 2) ? static_cast<long long>(j)
                                          : static_cast<long long>(j) -
                                                static_cast<long long>(n);
        if (n % 2 == 0 && j == n / 2) continue;  // Nyquist always dropped
        if (signed_j >= -cutoff && signed_j <= cutoff) mask[j] = 1;
    }
    return mask;
}

void zero_nyquist(std::vector<Complex>& spectral) {
    const std::size_t n = spectral.size();
    if (n % 2 == 0) spectral[n / 2] = 0.0;
}

double hs_norm_sq(const std::vector<Complex>& spectral, const std::vector<double>& k,
                  double s) {
    double sum = 0.0;
    for (std::size_t j = 0; j < spectral.size(); ++j)
        sum += std::pow(1.0 + k[j] * k[j], s) * std::norm(spectral[j]);
    return sum;
}

}  // namespace strato
