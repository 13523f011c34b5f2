#pragma once

#include <complex>
#include <cstddef>

namespace tomo::fft {

// Thin wrapper around FFTW with a process-wide plan cache. Plans are created
// with FFTW_ESTIMATE|FFTW_UNALIGNED (deterministic across runs, usable on any
// caller buffer); execution uses the new-array interface and is thread-safe.

// real n -> n/2+1 complex
void rfft(size_t n, const double* in, std::complex<double>* out);

// n/2+1 complex -> real n, normalized by 1/n
void irfft(size_t n, const std::complex<double>* in, double* out);

// in-place 1D complex transform; sign -1 forward, +1 backward (unnormalized)
void cfft(size_t n, std::complex<double>* data, int sign);

// in-place 2D n x n backward complex transform (unnormalized)
void cfft2_backward(size_t n, std::complex<double>* data);

} // namespace tomo::fft
