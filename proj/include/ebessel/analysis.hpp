#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/field.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/propagation.hpp"

namespace ebessel {

struct OrderEntry {
    int m = 0;
    double center_k_per_m = 0.0;
    double intensity_fraction = 0.0;
};

// Per-diffraction-order intensity bookkeeping. Fractions are normalized by
// the total power inside the rectangular windows of the requested range and
// sum to 1; residual_fraction is the share of total power outside all
// windows. overlap is set when k_rho >= k_x / 2, i.e. the ring of one order
// reaches into its neighbor's window.
struct OrderSpectrum {
    std::vector<OrderEntry> orders;
    double partition_width_k = 0.0;
    double residual_fraction = 0.0;
    bool overlap = false;
};

// Jacobi-Anger order fractions of a sinusoidal phase grating:
// fraction(m) = J_m(phi0)^2. Centers are reported in grating-order units
// (center_k = m) since no physical pitch is involved.
OrderSpectrum analytic_order_fractions(double phi0_rad, int m_min, int m_max);

// Integrates |psi|^2 of a far field over windows of width k_x centered at
// m k_x (full height). The exit efficiency is fraction(m = 1).
OrderSpectrum measure_order_spectrum(const Field2D& farfield, const HologramSpec& spec,
                                     int m_min, int m_max);

// Exit efficiency (share of the total transmitted power landing in the
// m = +1 window, measured over windows |m| <= 3) as a function of the
// peak-to-valley thickness t0. The denominator is the whole far field, not
// just the windowed part, so orders whose rings poke past the outermost
// window boundary do not skew the curve. Each point mills a mask via
// thickness_from_phase and measures the far field of the transmitted wave.
std::vector<std::pair<double, double>> efficiency_vs_thickness(
    const HologramSpec& spec, const ElectronParams& params, double v0_volts,
    const std::vector<double>& t0_m);

// Stationary-phase validity bounds of the m-th order: the Bessel zone ends at
// z_max = k R / (m k_rho) and shrinks radially as rho_max(z) = R - m k_rho z / k.
struct ValidityRange {
    double z_max_m = 0.0;
    double aperture_radius_m = 0.0;
    double rho_slope = 0.0;  // m k_rho / k
    double rho_max_m(double z_m) const { return aperture_radius_m - rho_slope * z_m; }
};

ValidityRange validity_range(const HologramSpec& spec, const ElectronParams& params, int m);

// Stationary-phase approximation of the m-th order near field:
//   N exp(i (k z - k rho^2 / 2z + m n phi + m^2 k_rho^2 z / 2k)) J_mn(m k_rho rho)
// with N the stationary-phase amplitude m k_rho sqrt(2 pi z / k) (up to a
// unimodular factor). With enforce_validity the point is checked against
// validity_range and a ValidityError names the violated bound; pass false to
// evaluate the (wrong) formula beyond its range for divergence studies.
std::complex<double> spa_reference(const HologramSpec& spec, const ElectronParams& params,
                                   int m, double z_m, double rho_m, double phi_rad,
                                   bool enforce_validity = true);

// The m-th diffraction order isolated from a plane-wave-illuminated hologram:
// far field windowed to |q_x - m k_x| < k_x/2, re-centered so the order's
// carrier is removed, transformed back, and optionally zero-padded by
// pad_factor for downstream propagation headroom. Requires the grating
// frequency to fall on a spectral sample (integer k_x / dk).
Field2D isolated_order_field(const HologramSpec& spec, const ElectronParams& params, int m,
                             int pad_factor = 1);

// Intensity at the m = 1 order's center (max over a 3x3 neighborhood) as a
// function of propagation distance, for an n = 0 hologram under collimated
// illumination. One spectrum is reused across all z samples.
std::vector<std::pair<double, double>> onaxis_curve(const HologramSpec& spec,
                                                    const ElectronParams& params,
                                                    const std::vector<double>& z_m);

// Per-order beam sizes under convergent illumination. rms_radius_m[i][j] is
// the background-clipped (1% of peak) RMS radius of order orders[i] at
// z_m[j]; focal_z_m[i] is the size minimum (parabolically refined when
// interior to the scan).
struct FocalScanResult {
    std::vector<int> orders;
    std::vector<double> z_m;
    std::vector<std::vector<double>> rms_radius_m;
    std::vector<double> focal_z_m;
};

FocalScanResult focal_scan(const HologramSpec& spec, const ElectronParams& params,
                           const SourceModel& source, const std::vector<double>& z_m,
                           int m_max);

}  // namespace ebessel
