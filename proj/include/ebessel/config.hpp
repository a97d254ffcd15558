#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/grid.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/propagation.hpp"
#include "ebessel/stem.hpp"

namespace ebessel {

// Inclusive linear range lo..hi with count samples (count = 1 pins lo).
struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> samples() const;
};

struct TransferConfig {
    std::vector<ProbeSpec> probes;
    GridGeometry grid;
};

// Fully-resolved run parameters in SI units. echo_text is the normalized
// configuration (defaults filled, keys sorted) whose reparse reproduces this
// struct exactly; every run writes it next to its outputs.
struct RunConfig {
    ElectronParams params;
    HologramSpec hologram;
    SourceModel source;
    double inner_potential_v = 0.0;
    double base_thickness_m = 0.0;
    double amplitude = 1.0;
    std::optional<Perturbation> perturbation;
    std::string output_dir = ".";

    std::optional<RangeSpec> efficiency_t0_m;
    std::optional<RangeSpec> onaxis_z_m;
    std::optional<RangeSpec> focal_scan_z_m;
    int focal_scan_m_max = 1;
    int vortex_loop_px = 5;
    double vortex_amplitude_floor = 1e-3;
    double fib_dwell_per_nm_us = 1.0;
    int fib_repetitions = 1;
    std::optional<TransferConfig> transfer;

    std::string echo_text;
};

// Parses the JSON run configuration (interface units: keV, nm, um, urad,
// mrad as documented per key), validating every parameter against module
// preconditions. All problems are collected and reported together in one
// ConfigError, each prefixed with its key path. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

}  // namespace ebessel
