#pragma once

#include <cstddef>
#include <vector>

#include "ebessel/constants.hpp"

namespace ebessel {

// Uniform square-pixel grid. Real-space coordinates are centered on pixel
// (nx/2, ny/2); spectral grids produced by the far-field transform reuse the
// same struct with pitch_m holding the wavenumber step in 1/m.
struct GridGeometry {
    int nx = 0;
    int ny = 0;
    double pitch_m = 0.0;

    size_t pixel_count() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
    double coord_x(int ix) const { return (ix - nx / 2) * pitch_m; }
    double coord_y(int iy) const { return (iy - ny / 2) * pitch_m; }
    double extent_x_m() const { return nx * pitch_m; }
    double extent_y_m() const { return ny * pitch_m; }
    // Spectral sample spacing of this grid's discrete Fourier transform.
    double freq_pitch_x() const { return kTwoPi / (nx * pitch_m); }
    double freq_pitch_y() const { return kTwoPi / (ny * pitch_m); }

    bool operator==(const GridGeometry&) const = default;
};

bool is_power_of_two(int v);

// Throws SamplingError unless nx, ny are powers of two >= 64 and pitch_m > 0.
void validate(const GridGeometry& grid);

// Non-negative scalar samples on a grid (intensity, thickness, phase, ...).
struct RealGrid {
    GridGeometry grid;
    std::vector<double> values;
};

}  // namespace ebessel
