#include "ebessel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ebessel/besselfn.hpp"
#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

cd ipow(int p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

double grating_kx(const HologramSpec& spec) { return kTwoPi / spec.grating_pitch_m; }

void require_separable(const HologramSpec& spec) {
    if (spec.k_rho_per_m >= 0.5 * grating_kx(spec))
        throw AnalysisError("diffraction orders overlap: k_rho >= k_x / 2");
}

// Integer number of spectral bins spanned by the grating frequency; the
// windowing shift must land exactly on a sample.
int carrier_bins(const HologramSpec& spec) {
    const double dk = spec.grid.freq_pitch_x();
    const double bins = grating_kx(spec) / dk;
    const double rounded = std::round(bins);
    if (std::abs(bins - rounded) > 1e-6 * bins)
        throw AnalysisError(
            "grating frequency does not fall on a spectral sample; choose the grid so "
            "that the grid extent is an integer multiple of the grating pitch");
    return static_cast<int>(rounded);
}

// Background-clipped second-moment radius of an intensity image.
double rms_radius(const std::vector<double>& intensity, const GridGeometry& grid) {
    double peak = 0.0;
    for (double v : intensity) peak = std::max(peak, v);
    if (peak <= 0.0) return 0.0;
    const double clip = 0.01 * peak;
    const int nx = grid.nx, ny = grid.ny;
    double w_sum = 0.0, x_sum = 0.0, y_sum = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = grid.coord_y(iy);
        const double* p = intensity.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            if (p[ix] < clip) continue;
            w_sum += p[ix];
            x_sum += p[ix] * grid.coord_x(ix);
            y_sum += p[ix] * y;
        }
    }
    const double cx = x_sum / w_sum;
    const double cy = y_sum / w_sum;
    double m2 = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = grid.coord_y(iy);
        const double* p = intensity.data() + static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            if (p[ix] < clip) continue;
            const double dx = grid.coord_x(ix) - cx;
            const double dy = y - cy;
            m2 += p[ix] * (dx * dx + dy * dy);
        }
    }
    return std::sqrt(m2 / w_sum);
}

}  // namespace

OrderSpectrum analytic_order_fractions(double phi0_rad, int m_min, int m_max) {
    if (phi0_rad < 0.0) throw DomainError("phi0 must be non-negative");
    if (m_min > m_max) throw DomainError("empty order range");
    OrderSpectrum spectrum;
    spectrum.partition_width_k = 1.0;
    for (int m = m_min; m <= m_max; ++m) {
        const double jm = bessel_j(m, phi0_rad);
        spectrum.orders.push_back({m, static_cast<double>(m), jm * jm});
    }
    return spectrum;
}

OrderSpectrum measure_order_spectrum(const Field2D& farfield, const HologramSpec& spec,
                                     int m_min, int m_max) {
    if (m_min > m_max) throw DomainError("empty order range");
    const int nx = farfield.grid.nx, ny = farfield.grid.ny;
    const double dk = farfield.grid.pitch_m;
    const double kx = grating_kx(spec);
    const int n_orders = m_max - m_min + 1;

    std::vector<double> row_power(static_cast<size_t>(ny), 0.0);
    std::vector<double> row_window(static_cast<size_t>(ny) * n_orders, 0.0);
    for_each_index(ny, [&](int iy) {
        const cd* p = farfield.values.data() + static_cast<size_t>(iy) * nx;
        double total = 0.0;
        double* win = row_window.data() + static_cast<size_t>(iy) * n_orders;
        for (int ix = 0; ix < nx; ++ix) {
            const double v = std::norm(p[ix]);
            total += v;
            const double qx = (ix - nx / 2) * dk;
            const long mf = std::lround(qx / kx);
            if (mf >= m_min && mf <= m_max) win[mf - m_min] += v;
        }
        row_power[static_cast<size_t>(iy)] = total;
    });

    double total = 0.0;
    std::vector<double> window(static_cast<size_t>(n_orders), 0.0);
    for (int iy = 0; iy < ny; ++iy) {
        total += row_power[static_cast<size_t>(iy)];
        for (int j = 0; j < n_orders; ++j)
            window[static_cast<size_t>(j)] += row_window[static_cast<size_t>(iy) * n_orders + j];
    }
    const double in_window = std::accumulate(window.begin(), window.end(), 0.0);
    if (!(in_window > 0.0)) throw AnalysisError("far field carries no power in the windows");

    OrderSpectrum spectrum;
    spectrum.partition_width_k = kx;
    spectrum.overlap = spec.k_rho_per_m >= 0.5 * kx;
    spectrum.residual_fraction = 1.0 - in_window / total;
    for (int m = m_min; m <= m_max; ++m)
        spectrum.orders.push_back(
            {m, m * kx, window[static_cast<size_t>(m - m_min)] / in_window});
    return spectrum;
}

std::vector<std::pair<double, double>> efficiency_vs_thickness(
    const HologramSpec& spec, const ElectronParams& params, double v0_volts,
    const std::vector<double>& t0_m) {
    std::vector<std::pair<double, double>> curve;
    curve.reserve(t0_m.size());
    const double ce_v0 = params.interaction_const * v0_volts;
    for (double t0 : t0_m) {
        if (t0 < 0.0) throw DomainError("peak-to-valley thickness must be >= 0");
        HologramSpec point = spec;
        point.phase_depth_rad =
            spec.profile == Profile::Sinusoidal ? 0.5 * ce_v0 * t0 : ce_v0 * t0;
        const double base = std::max(t0, 1e-9) * (1.0 + 1e-9) + 1e-12;
        const ThicknessMap mask = thickness_from_phase(point, params, v0_volts, base);
        const TransmittanceMap wave =
            transmittance_from_thickness(mask, params, point.aperture_radius_m, 1.0);
        const Field2D exit = illuminate(wave, params, SourceModel{}, point.aperture_radius_m);
        const OrderSpectrum spectrum =
            measure_order_spectrum(propagate_farfield(exit), point, -3, 3);
        double eta = 0.0;
        for (const OrderEntry& e : spectrum.orders)
            if (e.m == 1) eta = e.intensity_fraction;
        curve.emplace_back(t0, eta * (1.0 - spectrum.residual_fraction));
    }
    return curve;
}

ValidityRange validity_range(const HologramSpec& spec, const ElectronParams& params, int m) {
    if (m == 0 || !(spec.k_rho_per_m > 0.0))
        throw DomainError("validity range undefined for m = 0 or k_rho = 0");
    ValidityRange range;
    range.aperture_radius_m = spec.aperture_radius_m;
    range.rho_slope = m * spec.k_rho_per_m / params.wavenumber_per_m;
    range.z_max_m = params.wavenumber_per_m * spec.aperture_radius_m /
                    (m * spec.k_rho_per_m);
    return range;
}

cd spa_reference(const HologramSpec& spec, const ElectronParams& params, int m, double z_m,
                 double rho_m, double phi_rad, bool enforce_validity) {
    if (!(z_m > 0.0)) throw DomainError("spa_reference requires z > 0");
    const ValidityRange range = validity_range(spec, params, m);
    if (enforce_validity) {
        if (z_m > range.z_max_m)
            throw ValidityError("z = " + std::to_string(z_m) +
                                " m exceeds the stationary-phase bound z_max = " +
                                std::to_string(range.z_max_m) + " m");
        if (rho_m > range.rho_max_m(z_m))
            throw ValidityError("rho = " + std::to_string(rho_m) +
                                " m is outside the stationary-phase region rho_max = " +
                                std::to_string(range.rho_max_m(z_m)) + " m");
    }

    const double k = params.wavenumber_per_m;
    const int nu = m * spec.n;
    const double b = m * spec.k_rho_per_m;
    const cd amplitude = -ipow(nu + 1) * std::polar(1.0, -kPi / 4.0) * b *
                         std::sqrt(kTwoPi * z_m / k);
    const double phase = k * z_m - k * rho_m * rho_m / (2.0 * z_m) + nu * phi_rad +
                         b * b * z_m / (2.0 * k);
    return amplitude * std::polar(1.0, phase) * bessel_j(nu, b * rho_m);
}

Field2D isolated_order_field(const HologramSpec& spec, const ElectronParams& params, int m,
                             int pad_factor) {
    validate(spec);
    require_separable(spec);
    if (pad_factor < 1 || !is_power_of_two(pad_factor))
        throw DomainError("pad_factor must be a power of two");
    const int shift = carrier_bins(spec) * m;

    const TransmittanceMap map = build_transmittance(spec, 1.0);
    Field2D field = illuminate(map, params, SourceModel{}, spec.aperture_radius_m);

    const int nx = spec.grid.nx, ny = spec.grid.ny;
    fft2_inplace(field.values.data(), nx, ny, false);

    // Move the order carrier to zero frequency and cut its window
    // -k_x/2 <= q_x < k_x/2 (order-window tiling of the q_x axis).
    const int half_window = carrier_bins(spec) / 2;
    const int kx_bins = carrier_bins(spec);
    std::vector<cd> windowed(field.values.size(), cd{0.0, 0.0});
    for_each_index(ny, [&](int iy) {
        const cd* src = field.values.data() + static_cast<size_t>(iy) * nx;
        cd* dst = windowed.data() + static_cast<size_t>(iy) * nx;
        for (int fx = 0; fx < nx; ++fx) {
            const int centered = fx < nx / 2 ? fx : fx - nx;
            if (centered < -half_window || centered >= kx_bins - half_window) continue;
            int from = (fx + shift) % nx;
            if (from < 0) from += nx;
            dst[fx] = src[from];
        }
    });
    fft2_inplace(windowed.data(), nx, ny, true);

    if (pad_factor == 1) {
        field.values = std::move(windowed);
        return field;
    }

    Field2D padded;
    padded.grid = {nx * pad_factor, ny * pad_factor, spec.grid.pitch_m};
    padded.wavelength_m = params.wavelength_m;
    padded.z_m = 0.0;
    padded.values.assign(padded.grid.pixel_count(), cd{0.0, 0.0});
    const int off_x = (padded.grid.nx - nx) / 2;
    const int off_y = (padded.grid.ny - ny) / 2;
    for_each_index(ny, [&](int iy) {
        const cd* src = windowed.data() + static_cast<size_t>(iy) * nx;
        cd* dst = padded.values.data() +
                  (static_cast<size_t>(iy) + off_y) * padded.grid.nx + off_x;
        std::copy(src, src + nx, dst);
    });
    return padded;
}

std::vector<std::pair<double, double>> onaxis_curve(const HologramSpec& spec,
                                                    const ElectronParams& params,
                                                    const std::vector<double>& z_m) {
    if (spec.n != 0) throw DomainError("on-axis curve requires an n = 0 hologram");
    for (double z : z_m)
        if (!(z > 0.0)) throw DomainError("z samples must be positive");

    // The isolated converging order stays far from the padded border for all
    // relevant z (aperture-edge content walks inward), so one spectrum is
    // propagated directly per sample; agreement with the radial-integral
    // oracle is covered by tests.
    Field2D order = isolated_order_field(spec, params, 1, 2);
    const int n = order.grid.nx;
    fft2_inplace(order.values.data(), n, n, false);
    const double k = params.wavenumber_per_m;

    std::vector<std::pair<double, double>> curve;
    curve.reserve(z_m.size());
    std::vector<cd> work(order.values.size());
    for (double z : z_m) {
        work = order.values;
        const double dk = order.grid.freq_pitch_x();
        const double c = z / (2.0 * k);
        for_each_index(n, [&](int iy) {
            const int fy = iy < n / 2 ? iy : iy - n;
            const double qy = fy * dk;
            cd* p = work.data() + static_cast<size_t>(iy) * n;
            for (int ix = 0; ix < n; ++ix) {
                const int fx = ix < n / 2 ? ix : ix - n;
                const double qx = fx * dk;
                p[ix] *= std::polar(1.0, c * (qx * qx + qy * qy));
            }
        });
        fft2_inplace(work.data(), n, n, true);
        double peak = 0.0;
        for (int iy = n / 2 - 1; iy <= n / 2 + 1; ++iy)
            for (int ix = n / 2 - 1; ix <= n / 2 + 1; ++ix)
                peak = std::max(peak, std::norm(work[static_cast<size_t>(iy) * n + ix]));
        curve.emplace_back(z, peak);
    }
    return curve;
}

FocalScanResult focal_scan(const HologramSpec& spec, const ElectronParams& params,
                           const SourceModel& source, const std::vector<double>& z_m,
                           int m_max) {
    validate(spec);
    require_separable(spec);
    if (!(source.convergence_rad > 0.0))
        throw DomainError("focal scan requires convergent illumination");
    if (m_max < 0) throw DomainError("m_max must be >= 0");
    const double kx = grating_kx(spec);
    const double q_nyquist = kPi / spec.grid.pitch_m;
    if ((m_max + 0.5) * kx > q_nyquist)
        throw AnalysisError("order windows for |m| <= " + std::to_string(m_max) +
                            " do not fit inside the grid Nyquist limit");
    const int kx_bins = carrier_bins(spec);
    const int half_window = kx_bins / 2;

    const TransmittanceMap map = build_transmittance(spec, 1.0);
    Field2D field = illuminate(map, params, source, spec.aperture_radius_m);
    const int nx = spec.grid.nx, ny = spec.grid.ny;
    fft2_inplace(field.values.data(), nx, ny, false);
    const double k = params.wavenumber_per_m;
    const double dk = spec.grid.freq_pitch_x();

    FocalScanResult result;
    result.z_m = z_m;
    std::vector<cd> order_spec(field.values.size());
    std::vector<cd> work(field.values.size());
    std::vector<double> intensity(field.values.size());
    for (int m = -m_max; m <= m_max; ++m) {
        const int shift = kx_bins * m;
        std::fill(order_spec.begin(), order_spec.end(), cd{0.0, 0.0});
        for_each_index(ny, [&](int iy) {
            const cd* src = field.values.data() + static_cast<size_t>(iy) * nx;
            cd* dst = order_spec.data() + static_cast<size_t>(iy) * nx;
            for (int fx = 0; fx < nx; ++fx) {
                const int centered = fx < nx / 2 ? fx : fx - nx;
                if (centered < -half_window || centered >= kx_bins - half_window) continue;
                int from = (fx + shift) % nx;
                if (from < 0) from += nx;
                dst[fx] = src[from];
            }
        });

        std::vector<double> sizes;
        sizes.reserve(z_m.size());
        for (double z : z_m) {
            work = order_spec;
            const double c = z / (2.0 * k);
            for_each_index(ny, [&](int iy) {
                const int fy = iy < ny / 2 ? iy : iy - ny;
                const double qy = fy * dk;
                cd* p = work.data() + static_cast<size_t>(iy) * nx;
                for (int ix = 0; ix < nx; ++ix) {
                    const int fx = ix < nx / 2 ? ix : ix - nx;
                    const double qx = fx * dk;
                    p[ix] *= std::polar(1.0, c * (qx * qx + qy * qy));
                }
            });
            fft2_inplace(work.data(), nx, ny, true);
            for (size_t i = 0; i < work.size(); ++i) intensity[i] = std::norm(work[i]);
            sizes.push_back(rms_radius(intensity, spec.grid));
        }

        size_t best = 0;
        for (size_t i = 1; i < sizes.size(); ++i)
            if (sizes[i] < sizes[best]) best = i;
        double focal = z_m[best];
        if (best > 0 && best + 1 < sizes.size()) {
            const double y0 = sizes[best - 1], y1 = sizes[best], y2 = sizes[best + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            if (denom > 0.0)
                focal += 0.5 * (y0 - y2) / denom * (z_m[best + 1] - z_m[best]);
        }
        result.orders.push_back(m);
        result.rms_radius_m.push_back(std::move(sizes));
        result.focal_z_m.push_back(focal);
    }
    return result;
}

}  // namespace ebessel
