#pragma once

namespace ebessel {

// CODATA 2018 exact SI values; pinned so every derived quantity is
// reproducible bit-for-bit.
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kLightSpeed = 299792458.0;            // m/s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kElectronMass = 9.1093837015e-31;     // kg

// Electron rest energy used throughout, in keV.
inline constexpr double kRestEnergyKev = 511.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace ebessel
