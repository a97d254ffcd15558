#pragma once

#include <utility>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/field.hpp"
#include "ebessel/hologram.hpp"

namespace ebessel {

// Partially coherent source: a Gaussian spread of incidence angles plus an
// optional deterministic convergence of the illuminating wavefront.
struct SourceModel {
    double tilt_sigma_rad = 0.0;
    int n_samples = 1;
    double convergence_rad = 0.0;
};

// psi = T * exp(i k (tx x + ty y)) * exp(i k theta_c rho^2 / (2 R)), the
// quadratic term only when convergence_rad > 0 (it focuses the beam at
// R / theta_c). Throws SamplingError when the tilt carrier would alias.
Field2D illuminate(const TransmittanceMap& map, const ElectronParams& params,
                   const SourceModel& source, double aperture_radius_m,
                   double tilt_x_rad = 0.0, double tilt_y_rad = 0.0);

// Fresnel propagation over dz via the spectral transfer function
// exp(+i pi lambda dz nu^2) (nu in cycles/m), the paraxial angular spectrum;
// equivalently a convolution with the quadratic-phase Fresnel kernel
// proportional to (1/z) exp(-i k rho^2 / (2 z)). Unitary on the transform
// grid. An anti-wraparound guard compares the beam's spectral support and
// spatial extent against the grid border, zero-pads 2x automatically when
// needed, and throws PropagationRangeError (with the largest safe dz) when
// even padding is insufficient.
Field2D propagate_fresnel(const Field2D& field, double dz_m);

// Centered discrete Fourier transform of the field; the returned grid is in
// transverse-wavenumber coordinates with pitch 2 pi / (nx * pitch_m). Phase
// conventions are origin-true: a real symmetric input gives a real symmetric
// spectrum. Power is conserved exactly (Parseval).
Field2D propagate_farfield(const Field2D& field);

// Ideal lens pass: transverse size divided by M, transverse wavenumbers
// multiplied by M, values scaled to conserve power.
Field2D apply_ideal_lens(const Field2D& field, double angular_magnification);

// Average of |propagate_fresnel(illuminate(tilt), dz)|^2 over a deterministic
// Gauss-Hermite tensor grid of tilts (n_samples must be a perfect square;
// accumulation order is fixed row-major over nodes).
RealGrid incoherent_average(const TransmittanceMap& map, const ElectronParams& params,
                            const SourceModel& source, double aperture_radius_m,
                            double dz_m);

// Nodes and weights of n-point Gauss-Hermite quadrature (physicists'
// convention, integral of exp(-t^2) f(t); weights sum to sqrt(pi)).
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

}  // namespace ebessel
