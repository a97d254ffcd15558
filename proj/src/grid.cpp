#include "ebessel/grid.hpp"

#include <string>

#include "ebessel/errors.hpp"

namespace ebessel {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void validate(const GridGeometry& grid) {
    if (!is_power_of_two(grid.nx) || !is_power_of_two(grid.ny))
        throw SamplingError("grid dimensions must be powers of two, got " +
                            std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
    if (grid.nx < 64 || grid.ny < 64)
        throw SamplingError("grid dimensions must be at least 64, got " +
                            std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
    if (!(grid.pitch_m > 0.0))
        throw SamplingError("grid pitch must be positive");
}

}  // namespace ebessel
