#include "ebessel/fft.hpp"

#include <utility>
#include <vector>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/grid.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

// Iterative decimation-in-time radix-2 transform. tw holds forward twiddles
// for the full length n; the inverse conjugates them and scaling is handled
// by the caller.
void fft1d(cd* a, int n, const std::vector<cd>& tw, bool inverse) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int step = n / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                cd w = tw[static_cast<size_t>(k) * step];
                if (inverse) w = std::conj(w);
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

std::vector<cd> make_twiddles(int n) {
    std::vector<cd> tw(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        tw[static_cast<size_t>(k)] = std::polar(1.0, -kTwoPi * k / n);
    return tw;
}

}  // namespace

void fft2_inplace(cd* data, int nx, int ny, bool inverse) {
    if (!is_power_of_two(nx) || !is_power_of_two(ny))
        throw SamplingError("fft dimensions must be powers of two");

    const std::vector<cd> twx = make_twiddles(nx);
    const std::vector<cd> twy = nx == ny ? twx : make_twiddles(ny);

    for_each_index(ny, [&](int row) {
        fft1d(data + static_cast<size_t>(row) * nx, nx, twx, inverse);
    });

    for_each_index(nx, [&](int col) {
        std::vector<cd> buf(static_cast<size_t>(ny));
        for (int row = 0; row < ny; ++row)
            buf[static_cast<size_t>(row)] = data[static_cast<size_t>(row) * nx + col];
        fft1d(buf.data(), ny, twy, inverse);
        for (int row = 0; row < ny; ++row)
            data[static_cast<size_t>(row) * nx + col] = buf[static_cast<size_t>(row)];
    });

    if (inverse) {
        const double scale = 1.0 / (static_cast<double>(nx) * static_cast<double>(ny));
        for_each_index(ny, [&](int row) {
            cd* p = data + static_cast<size_t>(row) * nx;
            for (int i = 0; i < nx; ++i) p[i] *= scale;
        });
    }
}

void fftshift2_inplace(cd* data, int nx, int ny) {
    const int hx = nx / 2;
    const int hy = ny / 2;
    for_each_index(hy, [&](int row) {
        cd* a = data + static_cast<size_t>(row) * nx;
        cd* b = data + static_cast<size_t>(row + hy) * nx;
        for (int i = 0; i < hx; ++i) {
            std::swap(a[i], b[i + hx]);
            std::swap(a[i + hx], b[i]);
        }
    });
}

}  // namespace ebessel
