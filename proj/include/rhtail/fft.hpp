#pragma once

#include <complex>
#include <vector>

namespace rhtail {

using cd = std::complex<double>;

/// Unitary DFT (1/sqrt(m) both ways). Radix-2 in-place for powers of two,
/// cached-twiddle direct transform otherwise.
void fft_1d(cd* a, int m, bool inverse);

/// Unitary transform of a row-major dim-dimensional array with m points per
/// side (dim in {1,2}).
void fft_nd(std::vector<cd>& a, int dim, int m, bool inverse);

}  // namespace rhtail
