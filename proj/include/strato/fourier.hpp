#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace strato {

using Complex = std::complex<double>;

// Periodic spectral transforms on the horizontal grid, backed by FFTW. Plans
// are created once (deterministic ESTIMATE mode) and may be executed from
// several threads on distinct arrays.
class Dft {
public:
    explicit Dft(std::size_t n);
    ~Dft();
    Dft(const Dft&) = delete;
    Dft& operator=(const Dft&) = delete;

    std::size_t size() const { return n_; }

    // forward includes the 1/n factor: a pure cos(kx) field has coefficients
    // 1/2 at +-k; inverse is the plain synthesis sum.
    void forward(const Complex* in, Complex* out) const;
    void inverse(const Complex* in, Complex* out) const;

    std::vector<Complex> forward(const std::vector<double>& physical) const;
    std::vector<double> inverse_real(const std::vector<Complex>& spectral) const;

private:
    std::size_t n_ = 0;
    void* fwd_ = nullptr;  // fftw_plan kept opaque to keep fftw3.h out of headers
    void* inv_ = nullptr;
};

// Signed wavenumbers in FFT storage order: k_j = 2*pi*j/length for
// j <= n/2, negative branch above. (k[n/2] is the Nyquist bin for even n.)
std::vector<double> wavenumbers(std::size_t n, double length);

// Mask for quadratic dealiasing (2/3 rule): keep |j| <= n/3; the Nyquist bin
// is always dropped.
std::vector<char> dealias_mask(std::size_t n);

// Zeroes the Nyquist bin (even n); complex rotations would break conjugate
// symmetry there.
void zero_nyquist(std::vector<Complex>& spectral);

double hs_norm_sq(const std::vector<Complex>& spectral, const std::vector<double>& k,
                  double s);

}  // namespace strato
