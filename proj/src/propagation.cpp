#include "ebessel/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

constexpr double kSupportThreshold = 1e-4;  // relative amplitude defining "occupied"
constexpr int kGuardPixels = 2;

double max_abs(const std::vector<cd>& v, int nx, int ny) {
    std::vector<double> row_max(static_cast<size_t>(ny), 0.0);
    for_each_index(ny, [&](int iy) {
        const cd* p = v.data() + static_cast<size_t>(iy) * nx;
        double m = 0.0;
        for (int ix = 0; ix < nx; ++ix) m = std::max(m, std::abs(p[ix]));
        row_max[static_cast<size_t>(iy)] = m;
    });
    double m = 0.0;
    for (int iy = 0; iy < ny; ++iy) m = std::max(m, row_max[static_cast<size_t>(iy)]);
    return m;
}

// Largest |q| carrying amplitude above threshold, over an unshifted spectrum.
double spectral_support(const std::vector<cd>& spec, const GridGeometry& grid,
                        double threshold) {
    const int nx = grid.nx, ny = grid.ny;
    const double dkx = grid.freq_pitch_x();
    const double dky = grid.freq_pitch_y();
    std::vector<double> row_sup(static_cast<size_t>(ny), 0.0);
    for_each_index(ny, [&](int iy) {
        const int fy = iy < ny / 2 ? iy : iy - ny;
        const double qy = fy * dky;
        const cd* p = spec.data() + static_cast<size_t>(iy) * nx;
        double sup = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            if (std::abs(p[ix]) <= threshold) continue;
            const int fx = ix < nx / 2 ? ix : ix - nx;
            const double qx = fx * dkx;
            sup = std::max(sup, qx * qx + qy * qy);
        }
        row_sup[static_cast<size_t>(iy)] = sup;
    });
    double sup = 0.0;
    for (int iy = 0; iy < ny; ++iy) sup = std::max(sup, row_sup[static_cast<size_t>(iy)]);
    return std::sqrt(sup);
}

// Largest centered radius carrying amplitude above threshold.
double spatial_extent(const std::vector<cd>& vals, const GridGeometry& grid,
                      double threshold) {
    const int nx = grid.nx, ny = grid.ny;
    std::vector<double> row_ext(static_cast<size_t>(ny), 0.0);
    for_each_index(ny, [&](int iy) {
        const double y = grid.coord_y(iy);
        const cd* p = vals.data() + static_cast<size_t>(iy) * nx;
        double ext = 0.0;
        for (int ix = 0; ix < nx; ++ix) {
            if (std::abs(p[ix]) <= threshold) continue;
            const double x = grid.coord_x(ix);
            ext = std::max(ext, x * x + y * y);
        }
        row_ext[static_cast<size_t>(iy)] = ext;
    });
    double ext = 0.0;
    for (int iy = 0; iy < ny; ++iy) ext = std::max(ext, row_ext[static_cast<size_t>(iy)]);
    return std::sqrt(ext);
}

void apply_transfer_function(std::vector<cd>& spec, const GridGeometry& grid, double dz,
                             double k) {
    const int nx = grid.nx, ny = grid.ny;
    const double dkx = grid.freq_pitch_x();
    const double dky = grid.freq_pitch_y();
    const double c = dz / (2.0 * k);
    for_each_index(ny, [&](int iy) {
        const int fy = iy < ny / 2 ? iy : iy - ny;
        const double qy = fy * dky;
        cd* p = spec.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const int fx = ix < nx / 2 ? ix : ix - nx;
            const double qx = fx * dkx;
            p[ix] *= std::polar(1.0, c * (qx * qx + qy * qy));
        }
    });
}

Field2D propagate_unguarded(const Field2D& field, double dz) {
    Field2D out = field;
    fft2_inplace(out.values.data(), out.grid.nx, out.grid.ny, false);
    apply_transfer_function(out.values, out.grid, dz, kTwoPi / field.wavelength_m);
    fft2_inplace(out.values.data(), out.grid.nx, out.grid.ny, true);
    out.z_m += dz;
    return out;
}

}  // namespace

Field2D illuminate(const TransmittanceMap& map, const ElectronParams& params,
                   const SourceModel& source, double aperture_radius_m, double tilt_x_rad,
                   double tilt_y_rad) {
    validate(map.grid);
    const double k = params.wavenumber_per_m;
    const double q_nyq = kPi / map.grid.pitch_m;
    if (std::abs(k * tilt_x_rad) >= q_nyq || std::abs(k * tilt_y_rad) >= q_nyq)
        throw SamplingError("tilt carrier beyond the grid Nyquist limit");
    if (source.convergence_rad > 0.0 && !(aperture_radius_m > 0.0))
        throw DomainError("convergent illumination needs a positive reference radius");

    Field2D field;
    field.grid = map.grid;
    field.wavelength_m = params.wavelength_m;
    field.z_m = 0.0;
    field.values.assign(map.grid.pixel_count(), cd{0.0, 0.0});

    const int nx = map.grid.nx;
    const double curv = source.convergence_rad > 0.0
                            ? k * source.convergence_rad / (2.0 * aperture_radius_m)
                            : 0.0;
    for_each_index(map.grid.ny, [&](int iy) {
        const double y = map.grid.coord_y(iy);
        const cd* t = map.values.data() + static_cast<size_t>(iy) * nx;
        cd* out = field.values.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            if (t[ix] == cd{0.0, 0.0}) continue;
            const double x = map.grid.coord_x(ix);
            double phase = k * (tilt_x_rad * x + tilt_y_rad * y);
            if (curv != 0.0) phase += curv * (x * x + y * y);
            out[ix] = t[ix] * std::polar(1.0, phase);
        }
    });
    return field;
}

Field2D propagate_fresnel(const Field2D& field, double dz_m) {
    validate(field.grid);
    if (!(field.wavelength_m > 0.0)) throw DomainError("field has no wavelength");
    if (dz_m < 0.0) throw DomainError("propagation distance must be >= 0");
    if (dz_m == 0.0) return field;

    const double k = kTwoPi / field.wavelength_m;
    const int nx = field.grid.nx, ny = field.grid.ny;

    std::vector<cd> spec = field.values;
    fft2_inplace(spec.data(), nx, ny, false);

    const double spec_max = max_abs(spec, nx, ny);
    if (spec_max == 0.0) {
        Field2D out = field;
        out.z_m += dz_m;
        return out;
    }
    const double q_sup = spectral_support(spec, field.grid, kSupportThreshold * spec_max);
    const double field_max = max_abs(field.values, nx, ny);
    const double r_ext =
        spatial_extent(field.values, field.grid, kSupportThreshold * field_max);
    const double walk = q_sup / k * dz_m;
    const double half = (std::min(nx, ny) / 2 - kGuardPixels) * field.grid.pitch_m;

    if (r_ext + walk <= half) {
        apply_transfer_function(spec, field.grid, dz_m, k);
        fft2_inplace(spec.data(), nx, ny, true);
        Field2D out;
        out.grid = field.grid;
        out.wavelength_m = field.wavelength_m;
        out.z_m = field.z_m + dz_m;
        out.values = std::move(spec);
        return out;
    }

    // One automatic 2x zero-pad, then give up with the largest safe distance.
    const double half_padded = (std::min(nx, ny) - kGuardPixels) * field.grid.pitch_m;
    if (r_ext + walk > half_padded) {
        const double max_safe = std::max(0.0, (half_padded - r_ext) * k / q_sup);
        throw PropagationRangeError(
            "propagation over " + std::to_string(dz_m) +
                " m would wrap around the grid even after 2x padding; "
                "maximum safe distance is " +
                std::to_string(max_safe) + " m",
            max_safe);
    }

    Field2D padded;
    padded.grid = {2 * nx, 2 * ny, field.grid.pitch_m};
    padded.wavelength_m = field.wavelength_m;
    padded.z_m = field.z_m;
    padded.values.assign(padded.grid.pixel_count(), cd{0.0, 0.0});
    for_each_index(ny, [&](int iy) {
        const cd* src = field.values.data() + static_cast<size_t>(iy) * nx;
        cd* dst = padded.values.data() +
                  (static_cast<size_t>(iy) + ny / 2) * (2 * nx) + nx / 2;
        std::copy(src, src + nx, dst);
    });

    Field2D moved = propagate_unguarded(padded, dz_m);

    Field2D out;
    out.grid = field.grid;
    out.wavelength_m = field.wavelength_m;
    out.z_m = field.z_m + dz_m;
    out.values.assign(field.grid.pixel_count(), cd{0.0, 0.0});
    for_each_index(ny, [&](int iy) {
        const cd* src = moved.values.data() +
                        (static_cast<size_t>(iy) + ny / 2) * (2 * nx) + nx / 2;
        cd* dst = out.values.data() + static_cast<size_t>(iy) * nx;
        std::copy(src, src + nx, dst);
    });
    return out;
}

Field2D propagate_farfield(const Field2D& field) {
    validate(field.grid);
    if (field.grid.nx != field.grid.ny)
        throw SamplingError("far-field transform requires a square grid");

    const int n = field.grid.nx;
    Field2D out;
    out.grid = {n, n, field.grid.freq_pitch_x()};
    out.wavelength_m = field.wavelength_m;
    out.z_m = field.z_m;
    out.values.resize(field.grid.pixel_count());

    // Alternating signs re-center the transform: slot (sx, sy) holds the
    // amplitude at q = ((sx - n/2) dk, (sy - n/2) dk) with origin-true phase.
    std::vector<cd> work(field.grid.pixel_count());
    for_each_index(n, [&](int iy) {
        const cd* src = field.values.data() + static_cast<size_t>(iy) * n;
        cd* dst = work.data() + static_cast<size_t>(iy) * n;
        for (int ix = 0; ix < n; ++ix)
            dst[ix] = ((ix + iy) & 1) ? -src[ix] : src[ix];
    });
    fft2_inplace(work.data(), n, n, false);
    const double scale = field.grid.pitch_m * field.grid.pitch_m / kTwoPi;
    for_each_index(n, [&](int iy) {
        const cd* src = work.data() + static_cast<size_t>(iy) * n;
        cd* dst = out.values.data() + static_cast<size_t>(iy) * n;
        for (int ix = 0; ix < n; ++ix) {
            const double s = ((ix + iy) & 1) ? -scale : scale;
            dst[ix] = src[ix] * s;
        }
    });
    return out;
}

Field2D apply_ideal_lens(const Field2D& field, double angular_magnification) {
    if (!(angular_magnification > 0.0) || !std::isfinite(angular_magnification))
        throw DomainError("angular magnification must be positive and finite");
    Field2D out = field;
    out.grid.pitch_m = field.grid.pitch_m / angular_magnification;
    for_each_index(field.grid.ny, [&](int iy) {
        cd* p = out.values.data() + static_cast<size_t>(iy) * field.grid.nx;
        for (int ix = 0; ix < field.grid.nx; ++ix) p[ix] *= angular_magnification;
    });
    return out;
}

RealGrid incoherent_average(const TransmittanceMap& map, const ElectronParams& params,
                            const SourceModel& source, double aperture_radius_m,
                            double dz_m) {
    if (source.n_samples < 1) throw DomainError("n_samples must be >= 1");

    std::vector<double> tilts{0.0};
    std::vector<double> weights{1.0};
    if (source.tilt_sigma_rad > 0.0 && source.n_samples > 1) {
        const int n_axis = static_cast<int>(std::lround(std::sqrt(
            static_cast<double>(source.n_samples))));
        if (n_axis * n_axis != source.n_samples)
            throw DomainError("n_samples must be a perfect square (tensor-grid tilts)");
        auto [nodes, w] = gauss_hermite(n_axis);
        tilts.resize(static_cast<size_t>(n_axis));
        weights.resize(static_cast<size_t>(n_axis));
        const double root_pi = std::sqrt(kPi);
        for (int i = 0; i < n_axis; ++i) {
            tilts[static_cast<size_t>(i)] =
                std::sqrt(2.0) * source.tilt_sigma_rad * nodes[static_cast<size_t>(i)];
            weights[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / root_pi;
        }
    }

    RealGrid result;
    result.grid = map.grid;
    result.values.assign(map.grid.pixel_count(), 0.0);
    for (size_t jy = 0; jy < tilts.size(); ++jy) {
        for (size_t jx = 0; jx < tilts.size(); ++jx) {
            Field2D sample = illuminate(map, params, source, aperture_radius_m,
                                        tilts[jx], tilts[jy]);
            if (dz_m > 0.0) sample = propagate_fresnel(sample, dz_m);
            const double w = weights[jx] * weights[jy];
            for (size_t i = 0; i < result.values.size(); ++i)
                result.values[i] += w * std::norm(sample.values[i]);
        }
    }
    return result;
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    if (n < 1 || n > 64) throw DomainError("Gauss-Hermite order out of range");

    auto hermite = [](double x, int order) {
        double hm = 1.0, h = 2.0 * x;
        if (order == 0) return hm;
        for (int k = 1; k < order; ++k) {
            const double hn = 2.0 * x * h - 2.0 * k * hm;
            hm = h;
            h = hn;
        }
        return h;
    };

    // Roots by sign-change scan plus bisection: deterministic and robust for
    // the small orders used here.
    const double bound = std::sqrt(2.0 * n + 2.0);
    const int scan = 2000 * n;
    std::vector<double> nodes;
    double prev_x = -bound, prev_v = hermite(prev_x, n);
    for (int i = 1; i <= scan; ++i) {
        const double x = -bound + 2.0 * bound * i / scan;
        const double v = hermite(x, n);
        if (v == 0.0) {
            // A root exactly on a scan point (x = 0 for odd n); record it
            // here and let the zero prev_v suppress the sign-change branch
            // on the next interval so it is not counted twice.
            nodes.push_back(x);
        } else if (prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0)) {
            double lo = prev_x, hi = x, vlo = prev_v;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = hermite(mid, n);
                if (vm == 0.0) { lo = hi = mid; break; }
                if ((vlo < 0.0) != (vm < 0.0)) hi = mid;
                else { lo = mid; vlo = vm; }
            }
            nodes.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    if (static_cast<int>(nodes.size()) != n)
        throw DomainError("Gauss-Hermite root search failed");

    double log_factor = (n - 1) * std::log(2.0) + 0.5 * std::log(kPi);
    for (int k = 2; k <= n; ++k) log_factor += std::log(static_cast<double>(k));
    std::vector<double> weights(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double hnm1 = hermite(nodes[static_cast<size_t>(i)], n - 1);
        weights[static_cast<size_t>(i)] =
            std::exp(log_factor) / (static_cast<double>(n) * n * hnm1 * hnm1);
    }
    return {nodes, weights};
}

}  // namespace ebessel
