#pragma once

#include <stdexcept>
#include <string>

namespace ebessel {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid physical parameter (non-positive energy, negative radius, ...).
struct DomainError : Error {
    using Error::Error;
};

// Configuration text failed to parse or validate; the message lists every
// problem found, not just the first.
struct ConfigError : Error {
    using Error::Error;
};

// Grid too coarse for the requested content: grating undersampled, carrier
// beyond Nyquist, or aperture touching the border.
struct SamplingError : Error {
    using Error::Error;
};

// Propagation distance rejected by the anti-wraparound guard even after
// automatic zero-padding.
struct PropagationRangeError : Error {
    PropagationRangeError(const std::string& msg, double max_safe_dz)
        : Error(msg), max_safe_dz_m(max_safe_dz) {}
    double max_safe_dz_m;
};

// Requested phase pattern cannot be milled from the given base thickness.
struct InfeasibleMaskError : Error {
    using Error::Error;
};

// Malformed, truncated, or wrong-version file.
struct FormatError : Error {
    using Error::Error;
};

// Analysis precondition violated (diffraction orders not separable, ...).
struct AnalysisError : Error {
    using Error::Error;
};

// Adaptive quadrature failed to reach the requested accuracy.
struct OracleError : Error {
    using Error::Error;
};

// Evaluation point outside the stationary-phase validity range.
struct ValidityError : Error {
    using Error::Error;
};

}  // namespace ebessel
