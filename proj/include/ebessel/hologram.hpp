#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/grid.hpp"

namespace ebessel {

enum class Profile { Blazed, Sinusoidal };

// Full parameter set of one phase mask. phase_depth_rad is the cosine
// amplitude phi0 for Sinusoidal and the full modulation depth for Blazed.
struct HologramSpec {
    int n = 0;
    double k_rho_per_m = 0.0;
    double grating_pitch_m = 0.0;
    double aperture_radius_m = 0.0;
    Profile profile = Profile::Blazed;
    double phase_depth_rad = kTwoPi;
    GridGeometry grid;
};

// Throws DomainError / SamplingError when the spec violates its invariants
// (non-positive lengths, fewer than 4 samples per grating period, aperture
// closer than R/4 to the grid border).
void validate(const HologramSpec& spec);

// beta = k_rho * rho + n * phi + (2 pi / Lambda) * x, unreduced. phi is 0 at
// the exact origin where atan2 is undefined.
double phase_beta(const HologramSpec& spec, double x_m, double y_m);

// Blazed: (depth / 2 pi) * Mod(beta, 2 pi); Sinusoidal: phi0 * cos(beta).
double phase_profile(const HologramSpec& spec, double x_m, double y_m);

// Per-pixel membrane thickness implementing the spec's phase pattern.
// phase_offset_rad records the uniform phase difference between the requested
// profile and C_E * V0 * t (a global phase with no observable effect):
// requested = C_E * V0 * t + phase_offset_rad.
struct ThicknessMap {
    GridGeometry grid;
    double base_thickness_m = 0.0;
    std::vector<double> values_m;
    double inner_potential_v = 0.0;
    double phase_offset_rad = 0.0;
};

struct TransmittanceMap {
    GridGeometry grid;
    std::vector<std::complex<double>> values;
};

// Mills the requested phase profile into a membrane of the given base
// thickness (thickness everywhere <= base, offset so the deepest point of
// the pattern just reaches the base surface; pixels outside the aperture stay
// unmilled). Throws InfeasibleMaskError when the required peak-to-valley
// depth exceeds the base thickness.
ThicknessMap thickness_from_phase(const HologramSpec& spec, const ElectronParams& params,
                                  double v0_volts, double base_thickness_m);

// T = a0 * exp(i * phase_profile) inside the aperture disk, 0 outside.
TransmittanceMap build_transmittance(const HologramSpec& spec, double amplitude_a0);

// Wave picture of a milled mask: T = a0 * exp(i C_E V0 t) inside the
// aperture, 0 outside. Matches build_transmittance up to the recorded global
// phase offset.
TransmittanceMap transmittance_from_thickness(const ThicknessMap& map,
                                              const ElectronParams& params,
                                              double aperture_radius_m, double amplitude_a0);

enum class PerturbationKind {
    // Smooth random phase field added inside the aperture; magnitude is its
    // RMS in radians, corr_length_m the Gaussian correlation length.
    PhaseRipple,
    // Smooth random fringe displacement expressed as a phase shift constant
    // along the grating direction; magnitude is the RMS phase in radians.
    FringeJitter,
};

struct Perturbation {
    PerturbationKind kind = PerturbationKind::PhaseRipple;
    double magnitude_rad = 0.0;
    double corr_length_m = 0.0;
    uint32_t seed = 1;
};

// Pure phase perturbation: |T| is preserved pixelwise, magnitude 0 returns
// the input unchanged. Deterministic for a fixed seed.
TransmittanceMap perturb_hologram(const TransmittanceMap& map, const Perturbation& pert);

}  // namespace ebessel
