#pragma once

#include <complex>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/hologram.hpp"

namespace ebessel {

// Diffraction amplitude of the m-th hologram order at radius rho (on the
// phi = 0 ray; multiply by exp(i m n phi) for other azimuths), computed by
// direct numeric quadrature of the radial Fresnel integral
//   -2 pi i^(mn+1) / (lambda z) * exp(i k (z - rho^2 / 2z)) *
//   integral_0^R rho' exp(i (m k_rho rho' - k rho'^2 / 2z)) J_mn(k rho rho' / z) drho'
// with oscillation-aware panel sizing (panels no wider than a quarter period
// of the fastest local phase) and an embedded 8/16-point Gauss error
// estimate. Throws OracleError if the estimate will not drop below 1e-6
// relative. This is the independent reference for both the spectral
// propagator and the stationary-phase formula.
std::vector<std::complex<double>> quadrature_oracle(const HologramSpec& spec,
                                                    const ElectronParams& params, int m,
                                                    double z_m,
                                                    const std::vector<double>& rho_m);

}  // namespace ebessel
