#include "ebessel/vortex.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

inline double wrap_step(double a, double b) {
    // arg(e^{ib} conj(e^{ia})) without trigonometry on the full phasor.
    double d = std::fmod(b - a, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d <= -kPi) d += kTwoPi;
    return d;
}

}  // namespace

std::pair<RealGrid, RealGrid> periodic_gradient(const RealGrid& phase) {
    const int nx = phase.grid.nx;
    const int ny = phase.grid.ny;
    RealGrid gx{phase.grid, std::vector<double>(phase.grid.pixel_count(), 0.0)};
    RealGrid gy{phase.grid, std::vector<double>(phase.grid.pixel_count(), 0.0)};

    for_each_index(ny, [&](int iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx - 1; ++ix)
            gx.values[row + ix] =
                wrap_step(phase.values[row + ix], phase.values[row + ix + 1]);
        if (nx > 1) gx.values[row + nx - 1] = gx.values[row + nx - 2];
    });
    for_each_index(ny, [&](int iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        if (iy < ny - 1) {
            for (int ix = 0; ix < nx; ++ix)
                gy.values[row + ix] =
                    wrap_step(phase.values[row + ix], phase.values[row + nx + ix]);
        } else if (ny > 1) {
            const size_t below = row - static_cast<size_t>(nx);
            for (int ix = 0; ix < nx; ++ix)
                gy.values[row + ix] =
                    wrap_step(phase.values[below + ix], phase.values[row + ix]);
        }
    });
    return {std::move(gx), std::move(gy)};
}

VortexMap winding_numbers(const Field2D& field, int loop_size_px,
                          double amplitude_floor) {
    if (loop_size_px < 3 || loop_size_px % 2 == 0)
        throw DomainError("loop size must be an odd integer >= 3");
    if (amplitude_floor < 0.0 || amplitude_floor > 1.0)
        throw DomainError("amplitude floor must lie in [0, 1]");

    const int nx = field.grid.nx;
    const int ny = field.grid.ny;
    const int half = loop_size_px / 2;

    std::vector<double> amp(field.grid.pixel_count());
    double peak = 0.0;
    {
        std::vector<double> row_peak(static_cast<size_t>(ny), 0.0);
        for_each_index(ny, [&](int iy) {
            const size_t row = static_cast<size_t>(iy) * nx;
            double p = 0.0;
            for (int ix = 0; ix < nx; ++ix) {
                const double a = std::abs(field.values[row + ix]);
                amp[row + ix] = a;
                if (a > p) p = a;
            }
            row_peak[static_cast<size_t>(iy)] = p;
        });
        for (double p : row_peak)
            if (p > peak) peak = p;
    }
    const double floor_abs = amplitude_floor * peak;

    // Counter-clockwise perimeter offsets (y axis increases with row index):
    // bottom row left-to-right, right column upward, top row right-to-left,
    // left column downward.
    std::vector<std::pair<int, int>> perim;
    for (int dx = -half; dx <= half; ++dx) perim.emplace_back(dx, -half);
    for (int dy = -half + 1; dy <= half; ++dy) perim.emplace_back(half, dy);
    for (int dx = half - 1; dx >= -half; --dx) perim.emplace_back(dx, half);
    for (int dy = half - 1; dy >= -half + 1; --dy) perim.emplace_back(-half, dy);
    const int np = static_cast<int>(perim.size());

    std::vector<int> charge(field.grid.pixel_count(), 0);
    std::vector<uint8_t> skipped(field.grid.pixel_count(), 0);

    for_each_index(ny, [&](int iy) {
        if (iy < half || iy >= ny - half) return;
        for (int ix = half; ix < nx - half; ++ix) {
            bool masked = false;
            for (int p = 0; p < np && !masked; ++p) {
                const size_t idx =
                    static_cast<size_t>(iy + perim[p].second) * nx +
                    (ix + perim[p].first);
                if (amp[idx] <= floor_abs) masked = true;
            }
            const size_t center = static_cast<size_t>(iy) * nx + ix;
            if (masked) {
                skipped[center] = 1;
                continue;
            }
            double total = 0.0;
            size_t prev = static_cast<size_t>(iy + perim[np - 1].second) * nx +
                          (ix + perim[np - 1].first);
            for (int p = 0; p < np; ++p) {
                const size_t cur =
                    static_cast<size_t>(iy + perim[p].second) * nx +
                    (ix + perim[p].first);
                total += std::arg(field.values[cur] *
                                  std::conj(field.values[prev]));
                prev = cur;
            }
            charge[center] = static_cast<int>(std::lround(total / kTwoPi));
        }
    });

    VortexMap map;
    map.loop_size_px = loop_size_px;
    map.amplitude_floor = amplitude_floor;
    for (uint8_t s : skipped) map.skipped_loops += s;

    // 8-connected clustering of equal-charge detections; one vortex per
    // component at the amplitude-weighted centroid.
    std::vector<uint8_t> visited(field.grid.pixel_count(), 0);
    std::vector<size_t> stack;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const size_t seed = static_cast<size_t>(iy) * nx + ix;
            if (charge[seed] == 0 || visited[seed]) continue;
            const int q = charge[seed];
            double wsum = 0.0, xsum = 0.0, ysum = 0.0;
            visited[seed] = 1;
            stack.assign(1, seed);
            while (!stack.empty()) {
                const size_t cur = stack.back();
                stack.pop_back();
                const int cy = static_cast<int>(cur) / nx;
                const int cx = static_cast<int>(cur) % nx;
                const double w = amp[cur] > 0.0 ? amp[cur] : 1e-300;
                wsum += w;
                xsum += w * cx;
                ysum += w * cy;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int jx = cx + dx, jy = cy + dy;
                        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
                        const size_t nb = static_cast<size_t>(jy) * nx + jx;
                        if (visited[nb] || charge[nb] != q) continue;
                        visited[nb] = 1;
                        stack.push_back(nb);
                    }
                }
            }
            map.vortices.push_back({xsum / wsum, ysum / wsum, q});
        }
    }
    return map;
}

int total_charge(const VortexMap& map, double cx_px, double cy_px,
                 double radius_px) {
    if (radius_px < 0.0) throw DomainError("region radius must be >= 0");
    int total = 0;
    for (const Vortex& v : map.vortices) {
        const double dx = v.x_px - cx_px;
        const double dy = v.y_px - cy_px;
        if (dx * dx + dy * dy <= radius_px * radius_px) total += v.charge;
    }
    return total;
}

}  // namespace ebessel
