#pragma once

#include <complex>

namespace ebessel {

// In-place 2D radix-2 FFT, rows then columns, row-major data of size nx*ny
// (nx columns, ny rows; both powers of two). Forward uses exp(-i 2 pi j k / N)
// and no scaling; inverse applies 1/(nx*ny). Rows and columns are transformed
// independently, so OpenMP parallelism never changes the arithmetic and the
// output is bitwise identical for any worker count.
void fft2_inplace(std::complex<double>* data, int nx, int ny, bool inverse);

// Swaps quadrants so that index (nx/2, ny/2) becomes index (0, 0) and vice
// versa. An involution for even dimensions.
void fftshift2_inplace(std::complex<double>* data, int nx, int ny);

}  // namespace ebessel
