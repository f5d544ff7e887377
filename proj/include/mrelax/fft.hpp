#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mrelax {

// Thin wrapper around FFTW's 1D real transforms with plans cached per size.
// Forward transforms are normalized by 1/n, so spectrum[k] is the Fourier
// coefficient of mode k in the half-complex layout k = 0..n/2 (Hermitian
// symmetry supplies the negative modes). Plan creation is serialized behind a
// mutex; executing on distinct caller-owned buffers is thread safe.

// out must have n/2+1 entries.
void rfft(std::span<const double> in, std::span<std::complex<double>> out);

// in must have n/2+1 entries; it is left untouched. out must have n entries.
void irfft(std::span<const std::complex<double>> in, std::span<double> out);

inline std::size_t spectrum_size(std::size_t n) { return n / 2 + 1; }

}  // namespace mrelax
