#include "ebessel/hologram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ebessel/errors.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

bool inside_aperture(const HologramSpec& spec, double x, double y) {
    return x * x + y * y <= spec.aperture_radius_m * spec.aperture_radius_m;
}

// Deterministic standard-normal stream: raw 32-bit mt19937 words fed through
// Box-Muller, independent of any library distribution implementation.
class NormalStream {
public:
    explicit NormalStream(uint32_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
        const double u2 = (static_cast<double>(rng_()) + 0.5) / 4294967296.0;
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::vector<double> smooth_noise_2d(const GridGeometry& grid, double corr_length_m,
                                    uint32_t seed) {
    const int nx = grid.nx, ny = grid.ny;
    std::vector<cd> noise(grid.pixel_count());
    NormalStream normals(seed);
    for (size_t i = 0; i < noise.size(); ++i) noise[i] = normals.next();

    if (corr_length_m > 0.0) {
        fft2_inplace(noise.data(), nx, ny, false);
        const double dkx = grid.freq_pitch_x();
        const double dky = grid.freq_pitch_y();
        for_each_index(ny, [&](int iy) {
            const int fy = iy < ny / 2 ? iy : iy - ny;
            const double qy = fy * dky;
            cd* row = noise.data() + static_cast<size_t>(iy) * nx;
            for (int ix = 0; ix < nx; ++ix) {
                const int fx = ix < nx / 2 ? ix : ix - nx;
                const double qx = fx * dkx;
                const double q2 = qx * qx + qy * qy;
                row[ix] *= std::exp(-0.5 * q2 * corr_length_m * corr_length_m);
            }
        });
        fft2_inplace(noise.data(), nx, ny, true);
    }

    std::vector<double> out(noise.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = noise[i].real();
    return out;
}

std::vector<double> smooth_noise_1d(int n, double corr_length_px, uint32_t seed) {
    std::vector<double> noise(static_cast<size_t>(n));
    NormalStream normals(seed);
    for (double& v : noise) v = normals.next();
    if (corr_length_px <= 0.0) return noise;

    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * corr_length_px)));
    std::vector<double> kernel(static_cast<size_t>(2 * half + 1));
    double ksum = 0.0;
    for (int j = -half; j <= half; ++j) {
        const double w = std::exp(-0.5 * j * j / (corr_length_px * corr_length_px));
        kernel[static_cast<size_t>(j + half)] = w;
        ksum += w;
    }
    for (double& w : kernel) w /= ksum;

    std::vector<double> out(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = -half; j <= half; ++j) {
            int idx = (i + j) % n;
            if (idx < 0) idx += n;
            s += kernel[static_cast<size_t>(j + half)] * noise[static_cast<size_t>(idx)];
        }
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

}  // namespace

void validate(const HologramSpec& spec) {
    validate(spec.grid);
    if (spec.k_rho_per_m < 0.0) throw DomainError("k_rho must be non-negative");
    if (!(spec.grating_pitch_m > 0.0)) throw DomainError("grating pitch must be positive");
    if (!(spec.aperture_radius_m > 0.0)) throw DomainError("aperture radius must be positive");
    if (spec.phase_depth_rad < 0.0) throw DomainError("phase depth must be non-negative");
    if (spec.grid.pitch_m > spec.grating_pitch_m / 4.0)
        throw SamplingError("grid pitch " + std::to_string(spec.grid.pitch_m) +
                            " m undersamples the grating (need at least 4 samples per period)");
    const double half_extent =
        (std::min(spec.grid.nx, spec.grid.ny) / 2 - 1) * spec.grid.pitch_m;
    if (1.25 * spec.aperture_radius_m > half_extent)
        throw SamplingError("aperture does not fit in the grid with an R/4 guard margin");
}

double phase_beta(const HologramSpec& spec, double x_m, double y_m) {
    const double rho = std::hypot(x_m, y_m);
    const double phi = (x_m == 0.0 && y_m == 0.0) ? 0.0 : std::atan2(y_m, x_m);
    return spec.k_rho_per_m * rho + spec.n * phi + kTwoPi / spec.grating_pitch_m * x_m;
}

double phase_profile(const HologramSpec& spec, double x_m, double y_m) {
    const double beta = phase_beta(spec, x_m, y_m);
    if (spec.profile == Profile::Sinusoidal) return spec.phase_depth_rad * std::cos(beta);
    const double wrapped = beta - kTwoPi * std::floor(beta / kTwoPi);
    return spec.phase_depth_rad / kTwoPi * wrapped;
}

ThicknessMap thickness_from_phase(const HologramSpec& spec, const ElectronParams& params,
                                  double v0_volts, double base_thickness_m) {
    validate(spec);
    if (!(v0_volts > 0.0)) throw DomainError("inner potential must be positive");
    if (!(base_thickness_m > 0.0)) throw DomainError("base thickness must be positive");

    const int nx = spec.grid.nx, ny = spec.grid.ny;
    std::vector<double> phase(spec.grid.pixel_count(), 0.0);
    std::vector<char> active(spec.grid.pixel_count(), 0);
    std::vector<double> row_min(static_cast<size_t>(ny),
                                std::numeric_limits<double>::infinity());
    std::vector<double> row_max(static_cast<size_t>(ny),
                                -std::numeric_limits<double>::infinity());
    for_each_index(ny, [&](int iy) {
        const double y = spec.grid.coord_y(iy);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = spec.grid.coord_x(ix);
            if (!inside_aperture(spec, x, y)) continue;
            const size_t idx = static_cast<size_t>(iy) * nx + ix;
            const double p = phase_profile(spec, x, y);
            phase[idx] = p;
            active[idx] = 1;
            row_min[static_cast<size_t>(iy)] = std::min(row_min[static_cast<size_t>(iy)], p);
            row_max[static_cast<size_t>(iy)] = std::max(row_max[static_cast<size_t>(iy)], p);
        }
    });
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < ny; ++iy) {
        pmin = std::min(pmin, row_min[static_cast<size_t>(iy)]);
        pmax = std::max(pmax, row_max[static_cast<size_t>(iy)]);
    }
    if (!std::isfinite(pmin)) throw DomainError("aperture contains no grid pixels");

    const double ce_v0 = params.interaction_const * v0_volts;
    const double peak_to_valley = (pmax - pmin) / ce_v0;
    if (peak_to_valley > base_thickness_m)
        throw InfeasibleMaskError("pattern needs a peak-to-valley depth of " +
                                  std::to_string(peak_to_valley * 1e9) +
                                  " nm, more than the base thickness of " +
                                  std::to_string(base_thickness_m * 1e9) + " nm");

    ThicknessMap map;
    map.grid = spec.grid;
    map.base_thickness_m = base_thickness_m;
    map.inner_potential_v = v0_volts;
    map.phase_offset_rad = pmax - ce_v0 * base_thickness_m;
    map.values_m.assign(spec.grid.pixel_count(), base_thickness_m);
    for_each_index(ny, [&](int iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const size_t idx = static_cast<size_t>(iy) * nx + ix;
            if (active[idx])
                map.values_m[idx] = base_thickness_m + (phase[idx] - pmax) / ce_v0;
        }
    });
    return map;
}

TransmittanceMap build_transmittance(const HologramSpec& spec, double amplitude_a0) {
    validate(spec);
    if (amplitude_a0 < 0.0 || amplitude_a0 > 1.0)
        throw DomainError("amplitude must be in [0, 1]");

    TransmittanceMap map;
    map.grid = spec.grid;
    map.values.assign(spec.grid.pixel_count(), cd{0.0, 0.0});
    const int nx = spec.grid.nx;
    for_each_index(spec.grid.ny, [&](int iy) {
        const double y = spec.grid.coord_y(iy);
        cd* row = map.values.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = spec.grid.coord_x(ix);
            if (inside_aperture(spec, x, y))
                row[ix] = std::polar(amplitude_a0, phase_profile(spec, x, y));
        }
    });
    return map;
}

TransmittanceMap transmittance_from_thickness(const ThicknessMap& map,
                                              const ElectronParams& params,
                                              double aperture_radius_m, double amplitude_a0) {
    if (!(aperture_radius_m > 0.0)) throw DomainError("aperture radius must be positive");
    if (amplitude_a0 < 0.0 || amplitude_a0 > 1.0)
        throw DomainError("amplitude must be in [0, 1]");

    TransmittanceMap out;
    out.grid = map.grid;
    out.values.assign(map.grid.pixel_count(), cd{0.0, 0.0});
    const int nx = map.grid.nx;
    const double ce_v0 = params.interaction_const * map.inner_potential_v;
    const double r2 = aperture_radius_m * aperture_radius_m;
    for_each_index(map.grid.ny, [&](int iy) {
        const double y = map.grid.coord_y(iy);
        cd* row = out.values.data() + static_cast<size_t>(iy) * nx;
        const double* t = map.values_m.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = map.grid.coord_x(ix);
            if (x * x + y * y <= r2) row[ix] = std::polar(amplitude_a0, ce_v0 * t[ix]);
        }
    });
    return out;
}

TransmittanceMap perturb_hologram(const TransmittanceMap& map, const Perturbation& pert) {
    if (pert.magnitude_rad < 0.0) throw DomainError("perturbation magnitude must be >= 0");
    TransmittanceMap out = map;
    if (pert.magnitude_rad == 0.0) return out;

    const int nx = map.grid.nx, ny = map.grid.ny;
    std::vector<double> ripple;
    if (pert.kind == PerturbationKind::PhaseRipple) {
        ripple = smooth_noise_2d(map.grid, pert.corr_length_m, pert.seed);
    } else {
        const std::vector<double> line =
            smooth_noise_1d(ny, pert.corr_length_m / map.grid.pitch_m, pert.seed);
        ripple.resize(map.grid.pixel_count());
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                ripple[static_cast<size_t>(iy) * nx + ix] = line[static_cast<size_t>(iy)];
    }

    // Scale the ripple so its RMS over the transmitting pixels is exactly the
    // requested magnitude.
    double sum_sq = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < ripple.size(); ++i) {
        if (std::norm(map.values[i]) > 0.0) {
            sum_sq += ripple[i] * ripple[i];
            ++count;
        }
    }
    if (count == 0) throw DomainError("transmittance map has no transmitting pixels");
    const double rms = std::sqrt(sum_sq / static_cast<double>(count));
    if (rms == 0.0) throw DomainError("degenerate perturbation realization");
    const double scale = pert.magnitude_rad / rms;

    for_each_index(ny, [&](int iy) {
        cd* row = out.values.data() + static_cast<size_t>(iy) * nx;
        const double* r = ripple.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix)
            if (std::norm(row[ix]) > 0.0) row[ix] *= std::polar(1.0, scale * r[ix]);
    });
    return out;
}

}  // namespace ebessel
