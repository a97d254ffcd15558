#pragma once

namespace ebessel {

// Relativistic electron-wave constants. wavelength_m follows the de Broglie
// relation lambda = h c / sqrt(E (E + 2 E0)); interaction_const is the phase
// accumulated per volt of mean inner potential per meter of material,
// C_E = (2 pi e / lambda) (E + E0) / (E (E + 2 E0)), in rad / (V m).
struct ElectronParams {
    double energy_kev = 0.0;
    double rest_energy_kev = 0.0;
    double wavelength_m = 0.0;
    double wavenumber_per_m = 0.0;
    double interaction_const = 0.0;
};

// Throws DomainError for non-positive or non-finite energies.
ElectronParams derive_params(double energy_kev);

}  // namespace ebessel
