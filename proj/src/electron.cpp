#include "ebessel/electron.hpp"

#include <cmath>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"

namespace ebessel {

ElectronParams derive_params(double energy_kev) {
    if (!(energy_kev > 0.0) || !std::isfinite(energy_kev))
        throw DomainError("electron energy must be positive and finite");

    const double e_j = energy_kev * 1e3 * kElementaryCharge;
    const double e0_j = kRestEnergyKev * 1e3 * kElementaryCharge;

    ElectronParams p;
    p.energy_kev = energy_kev;
    p.rest_energy_kev = kRestEnergyKev;
    p.wavelength_m = kPlanck * kLightSpeed / std::sqrt(e_j * (e_j + 2.0 * e0_j));
    p.wavenumber_per_m = kTwoPi / p.wavelength_m;
    p.interaction_const = kTwoPi * kElementaryCharge / p.wavelength_m *
                          (e_j + e0_j) / (e_j * (e_j + 2.0 * e0_j));
    return p;
}

}  // namespace ebessel
