#pragma once

#include <complex>
#include <vector>

#include "ebessel/grid.hpp"

namespace ebessel {

// Sampled complex scalar wavefunction on a transverse grid. z_m is
// bookkeeping only: propagation is always relative. Far-field results reuse
// this struct with grid.pitch_m holding the wavenumber step (1/m).
struct Field2D {
    GridGeometry grid;
    std::vector<std::complex<double>> values;
    double wavelength_m = 0.0;
    double z_m = 0.0;
};

// Total power sum |psi|^2 * pitch^2, reduced in fixed row order.
double total_power(const Field2D& field);

}  // namespace ebessel
