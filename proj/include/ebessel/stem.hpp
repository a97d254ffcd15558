#pragma once

#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/field.hpp"
#include "ebessel/grid.hpp"

namespace ebessel {

enum class ProbeKind { BesselRing, ApertureLimited };

// Far-field probe-forming aperture. convergence_rad is the semi-angle after
// the lens; for BesselRing it sets the ring center radius k*convergence and
// ring_fractional_width its full fractional width. Aberrations (defocus_m,
// cs_m) apply to ApertureLimited probes only.
struct ProbeSpec {
    ProbeKind kind = ProbeKind::ApertureLimited;
    double convergence_rad = 0.0;
    double ring_fractional_width = 0.0;
    double cs_m = 0.0;
    double defocus_m = 0.0;
    int n = 0;
};

// ADF contrast transfer curve. k is spatial frequency in cycles per meter;
// samples are radial annulus means one spectral pixel wide, h >= 0.
struct TransferSample {
    double k_per_m = 0.0;
    double h = 0.0;
};

struct TransferCurve {
    std::vector<TransferSample> samples;
    double normalization_k = 0.0;
};

// Builds the real-space probe field from its far-field aperture function on
// the grid's wavenumber lattice, normalized to unit power and centered.
Field2D build_probe(const ProbeSpec& spec, const ElectronParams& params,
                    const GridGeometry& grid);

// H(k) = |Fourier transform of the probe intensity|, radially averaged.
// Cross-checked internally against the autocorrelation of the far-field
// amplitude on a set of lags (identical within 1e-9 relative).
TransferCurve adf_transfer(const Field2D& probe);

// Builds every probe, computes transfer curves, and rescales all curves to
// share the first nonzero radial bin's value with the first curve.
std::vector<TransferCurve> compare_probes(const std::vector<ProbeSpec>& specs,
                                          const ElectronParams& params,
                                          const GridGeometry& grid);

// Frequencies where two curves cross, by linear interpolation between bins.
std::vector<double> find_crossings(const TransferCurve& a,
                                   const TransferCurve& b);

}  // namespace ebessel
