// Acceptance harness: end-to-end behavioral checks for the whole pipeline.
// Each criterion prints one PASS/FAIL line; the process exits nonzero if any
// criterion fails.  Checks are run against frozen reference numbers that were
// derived independently of the library code (closed-form Bessel weights,
// Gaussian beam formulas, stationary-phase references, adaptive quadrature).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ebessel/analysis.hpp"
#include "ebessel/besselfn.hpp"
#include "ebessel/config.hpp"
#include "ebessel/electron.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/field.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/io.hpp"
#include "ebessel/propagation.hpp"
#include "ebessel/quadrature.hpp"
#include "ebessel/stem.hpp"
#include "ebessel/vortex.hpp"

namespace fs = std::filesystem;
using namespace ebessel;

namespace {

constexpr double kJ0HalfIntensity = 1.1263642393772584;  // J0(x)^2 = 1/2
constexpr double kGaussFwhmPerW = 1.1774100225154747;    // sqrt(2 ln 2)
constexpr double kBesselOneMax = 1.8411837813406593;     // argmax J1(x)^2
constexpr double kJ1SquaredMax = 0.3385671392282725;     // J1(kBesselOneMax)^2

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return std::string(buf);
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return out;
}

double fraction_of(const OrderSpectrum& spectrum, int m) {
    for (const auto& order : spectrum.orders)
        if (order.m == m) return order.intensity_fraction;
    throw std::logic_error("order missing from spectrum");
}

HologramSpec base_spec(const ElectronParams& params, double alpha_rad,
                       double radius_m, double pitch_m, int n_px,
                       double grating_m, int topological) {
    HologramSpec spec;
    spec.n = topological;
    spec.k_rho_per_m = params.wavenumber_per_m * alpha_rad;
    spec.grating_pitch_m = grating_m;
    spec.aperture_radius_m = radius_m;
    spec.profile = Profile::Sinusoidal;
    spec.phase_depth_rad = 1.0;
    spec.grid = GridGeometry{n_px, n_px, pitch_m};
    return spec;
}

template <typename F>
double golden_min(F f, double lo, double hi, int iters = 96) {
    const double g = 0.6180339887498949;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Azimuthally averaged intensity around the grid center, one bin per pixel
// of radius.  Only pixels within max_bins of the center are visited.
std::vector<double> center_radial_profile(const Field2D& field, int max_bins) {
    const int nx = field.grid.nx;
    const int ny = field.grid.ny;
    const int cx = nx / 2;
    const int cy = ny / 2;
    std::vector<double> sum(static_cast<size_t>(max_bins), 0.0);
    std::vector<long> count(static_cast<size_t>(max_bins), 0);
    const int x0 = std::max(0, cx - max_bins);
    const int x1 = std::min(nx - 1, cx + max_bins);
    const int y0 = std::max(0, cy - max_bins);
    const int y1 = std::min(ny - 1, cy + max_bins);
    for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
            const double r = std::hypot(ix - cx, iy - cy);
            const int bin = static_cast<int>(std::lround(r));
            if (bin >= max_bins) continue;
            sum[static_cast<size_t>(bin)] +=
                std::norm(field.values[static_cast<size_t>(iy) * nx + ix]);
            count[static_cast<size_t>(bin)] += 1;
        }
    }
    std::vector<double> mean(static_cast<size_t>(max_bins), 0.0);
    for (int b = 0; b < max_bins; ++b)
        if (count[static_cast<size_t>(b)] > 0)
            mean[static_cast<size_t>(b)] =
                sum[static_cast<size_t>(b)] / count[static_cast<size_t>(b)];
    return mean;
}

// Least-squares fit of c*J0(k r)^2 to the central lobe of a radial intensity
// profile (bins up to and including the first local minimum).  A naive
// half-maximum crossing is biased by edge-wave interference fringes riding on
// the lobe; fitting the full lobe shape averages the fringes out.  Returns
// the full width at half maximum of the fitted profile.
double fitted_bessel_fwhm(const std::vector<double>& profile, double pitch_m) {
    size_t dip = 1;
    while (dip + 1 < profile.size() &&
           !(profile[dip] < profile[dip - 1] && profile[dip] <= profile[dip + 1]))
        ++dip;
    if (dip + 1 >= profile.size())
        throw std::runtime_error("no local minimum inside radial profile");
    const double k_seed = 2.404825557695773 / (static_cast<double>(dip) * pitch_m);
    auto sse = [&](double k) {
        double num = 0.0, den = 0.0;
        for (size_t b = 0; b <= dip; ++b) {
            const double r = static_cast<double>(b) * pitch_m;
            const double w = r + 0.25 * pitch_m;
            const double m2 = std::pow(bessel_j(0, k * r), 2);
            num += w * m2 * profile[b];
            den += w * m2 * m2;
        }
        const double c = den > 0.0 ? num / den : 0.0;
        double s = 0.0;
        for (size_t b = 0; b <= dip; ++b) {
            const double r = static_cast<double>(b) * pitch_m;
            const double w = r + 0.25 * pitch_m;
            const double d = c * std::pow(bessel_j(0, k * r), 2) - profile[b];
            s += w * d * d;
        }
        return s;
    };
    const double k_hat = golden_min(sse, 0.6 * k_seed, 1.6 * k_seed);
    return 2.0 * kJ0HalfIntensity / k_hat;
}

// Same idea for a Gaussian intensity profile c*exp(-2 r^2 / w^2); the fit
// window runs down to 5% of the central intensity.
double fitted_gauss_fwhm(const std::vector<double>& profile, double pitch_m) {
    size_t edge = 1;
    while (edge + 1 < profile.size() && profile[edge] > 0.05 * profile[0]) ++edge;
    size_t half = 1;
    while (half + 1 < profile.size() && profile[half] > 0.5 * profile[0]) ++half;
    const double w_seed = static_cast<double>(half) * pitch_m / 0.5887050112577373;
    auto sse = [&](double w) {
        double num = 0.0, den = 0.0;
        for (size_t b = 0; b <= edge; ++b) {
            const double r = static_cast<double>(b) * pitch_m;
            const double wt = r + 0.25 * pitch_m;
            const double m = std::exp(-2.0 * r * r / (w * w));
            num += wt * m * profile[b];
            den += wt * m * m;
        }
        const double c = den > 0.0 ? num / den : 0.0;
        double s = 0.0;
        for (size_t b = 0; b <= edge; ++b) {
            const double r = static_cast<double>(b) * pitch_m;
            const double wt = r + 0.25 * pitch_m;
            const double d = c * std::exp(-2.0 * r * r / (w * w)) - profile[b];
            s += wt * d * d;
        }
        return s;
    };
    const double w_hat = golden_min(sse, 0.5 * w_seed, 2.0 * w_seed);
    return kGaussFwhmPerW * w_hat;
}

double trapezoid_power(const std::vector<double>& rho,
                       const std::vector<double>& intensity, size_t lo,
                       size_t hi) {
    double acc = 0.0;
    for (size_t i = lo; i + 1 <= hi; ++i) {
        const double fa = rho[i] * intensity[i];
        const double fb = rho[i + 1] * intensity[i + 1];
        acc += 0.5 * (fa + fb) * (rho[i + 1] - rho[i]);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// 1. Diffraction orders of a sinusoidal phase grating carry squared-Bessel
//    intensity fractions.
// ---------------------------------------------------------------------------
bool criterion_order_fractions(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    HologramSpec spec =
        base_spec(params, 6e-6, 5e-6, 12.5e-9, 2048, 100e-9, 0);
    double worst = 0.0;
    double worst_phi = 0.0;
    int worst_m = 0;
    for (double phi0 : {0.5, 1.0, kBesselOneMax}) {
        spec.phase_depth_rad = phi0;
        const TransmittanceMap mask = build_transmittance(spec, 1.0);
        const Field2D exit =
            illuminate(mask, params, SourceModel{}, spec.aperture_radius_m);
        const OrderSpectrum measured =
            measure_order_spectrum(propagate_farfield(exit), spec, -3, 3);
        const OrderSpectrum expected = analytic_order_fractions(phi0, -3, 3);
        for (int m = -3; m <= 3; ++m) {
            const double share = fraction_of(measured, m) *
                                 (1.0 - measured.residual_fraction);
            const double err = std::abs(share - fraction_of(expected, m));
            if (err > worst) {
                worst = err;
                worst_phi = phi0;
                worst_m = m;
            }
        }
    }
    detail = fmt("max |fraction - J_m(phi0)^2| = %.2e (phi0 = %.4f, m = %+d)",
                 worst, worst_phi, worst_m);
    return worst < 0.01;
}

// ---------------------------------------------------------------------------
// 2. Efficiency versus groove depth: the sinusoidal optimum sits at the peak
//    of J1^2 and a full-wave blazed profile funnels nearly all intensity into
//    the working order.
// ---------------------------------------------------------------------------
bool criterion_efficiency_optimum(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    HologramSpec spec =
        base_spec(params, 6e-6, 2.5e-6, 12.5e-9, 1024, 100e-9, 0);
    const double v0 = 17.0;
    const double ce_v0 = params.interaction_const * v0;
    auto depth_for = [&](double phi0) { return 2.0 * phi0 / ce_v0; };

    std::vector<double> coarse_phi;
    std::vector<double> coarse_t;
    for (double phi0 = 0.125; phi0 <= 3.0 + 1e-12; phi0 += 0.125) {
        coarse_phi.push_back(phi0);
        coarse_t.push_back(depth_for(phi0));
    }
    const auto coarse = efficiency_vs_thickness(spec, params, v0, coarse_t);
    size_t pc = 0;
    for (size_t i = 1; i < coarse.size(); ++i)
        if (coarse[i].second > coarse[pc].second) pc = i;
    if (coarse_phi[pc] < 1.5 || coarse_phi[pc] > 2.2) {
        detail = fmt("coarse sweep peaks at phase depth %.3f rad", coarse_phi[pc]);
        return false;
    }

    std::vector<double> fine_phi;
    std::vector<double> fine_t;
    for (int j = 0; j <= 8; ++j) {
        fine_phi.push_back(1.65 + 0.05 * j);
        fine_t.push_back(depth_for(fine_phi.back()));
    }
    const auto fine = efficiency_vs_thickness(spec, params, v0, fine_t);
    // Least-squares parabola over the whole fine window; a three-point
    // vertex at this spacing would sit on a curvature signal of ~1e-3 and
    // amplify any smooth measurement bias.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0s = 0, t1 = 0, t2 = 0;
    for (size_t i = 0; i < fine.size(); ++i) {
        const double x = fine_phi[i] - kBesselOneMax;
        const double y = fine[i].second;
        s0 += 1.0;
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        t0s += y;
        t1 += x * y;
        t2 += x * x * y;
    }
    const double d = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                     s2 * (s1 * s3 - s2 * s2);
    const double a = (t0s * (s2 * s4 - s3 * s3) - s1 * (t1 * s4 - t2 * s3) +
                      s2 * (t1 * s3 - t2 * s2)) /
                     d;
    const double b = (s0 * (t1 * s4 - t2 * s3) - t0s * (s1 * s4 - s2 * s3) +
                      s2 * (s1 * t2 - s2 * t1)) /
                     d;
    const double c = (s0 * (s2 * t2 - s3 * t1) - s1 * (s1 * t2 - s2 * t1) +
                      t0s * (s1 * s3 - s2 * s2)) /
                     d;
    if (!(c < 0.0)) {
        detail = "fine sweep is not concave";
        return false;
    }
    const double xv = -b / (2.0 * c);
    if (std::abs(xv) > 0.2) {
        detail = fmt("fine sweep vertex out of window (offset %.3f rad)", xv);
        return false;
    }
    const double phi_hat = kBesselOneMax + xv;
    const double eta_hat = a + xv * (b + xv * c);

    HologramSpec blazed = spec;
    blazed.profile = Profile::Blazed;
    blazed.phase_depth_rad = kTwoPi;
    const double t_full = kTwoPi / ce_v0;
    const double eta_blazed =
        efficiency_vs_thickness(blazed, params, v0, {t_full})[0].second;

    detail = fmt("eta* = %.4f at phase depth %.4f rad, blazed eta = %.4f",
                 eta_hat, phi_hat, eta_blazed);
    return std::abs(eta_hat - kJ1SquaredMax) <= 0.005 &&
           std::abs(phi_hat - kBesselOneMax) <= 0.01 && eta_blazed >= 0.95;
}

// ---------------------------------------------------------------------------
// 3. On-axis intensity of the converging order climbs toward a focal peak and
//    collapses past it.
// ---------------------------------------------------------------------------
bool criterion_onaxis_focus(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    const HologramSpec spec =
        base_spec(params, 6e-6, 5e-6, 12.5e-9, 2048, 100e-9, 0);
    const std::vector<double> zs = linspace(0.06, 1.2, 20);
    const auto curve = onaxis_curve(spec, params, zs);
    size_t peak = 0;
    for (size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second > curve[peak].second) peak = i;
    const double z_peak = curve[peak].first;
    const double i_peak = curve[peak].second;

    double run_max = 0.0;
    double drawdown = 1.0;
    for (size_t i = 0; i <= peak; ++i) {
        run_max = std::max(run_max, curve[i].second);
        drawdown = std::min(drawdown, curve[i].second / run_max);
    }
    const double tail_ratio = curve.back().second / i_peak;
    const double gain = i_peak / curve.front().second;
    detail = fmt(
        "peak at z = %.3f m, rise x%.1f, tail/peak = %.3f, drawdown %.2f",
        z_peak, gain, tail_ratio, drawdown);
    return z_peak >= 0.6 && z_peak <= 0.9 && tail_ratio < 0.5 &&
           drawdown >= 0.5 && gain >= 2.0;
}

// ---------------------------------------------------------------------------
// 4. The stationary-phase reference matches adaptive quadrature inside its
//    validity range and departs from it beyond.
// ---------------------------------------------------------------------------
bool criterion_stationary_phase(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    const HologramSpec spec =
        base_spec(params, 6e-6, 5e-6, 12.5e-9, 2048, 100e-9, 0);
    const double z_max = validity_range(spec, params, 1).z_max_m;
    const double k_rho = spec.k_rho_per_m;
    const double zeros[5] = {2.404825557695773, 5.520078110286311,
                             8.653727912911013, 11.791534439014281,
                             14.930917708487787};
    std::vector<double> bounds = {0.0};
    for (double z0 : zeros) bounds.push_back(z0 / k_rho);
    const int n_rho = 240;
    std::vector<double> rho = linspace(1e-10, bounds.back(), n_rho);

    auto ring_rms = [&](double z_frac) {
        const double z = z_frac * z_max;
        const auto oracle = quadrature_oracle(spec, params, 1, z, rho);
        std::vector<double> iq(rho.size()), is(rho.size());
        for (size_t i = 0; i < rho.size(); ++i) {
            iq[i] = std::norm(oracle[i]);
            is[i] = std::norm(
                spa_reference(spec, params, 1, z, rho[i], 0.0, false));
        }
        std::vector<double> pq(5, 0.0), ps(5, 0.0);
        for (int r = 0; r < 5; ++r) {
            size_t lo = 0;
            while (lo < rho.size() && rho[lo] < bounds[static_cast<size_t>(r)])
                ++lo;
            size_t hi = lo;
            while (hi + 1 < rho.size() &&
                   rho[hi + 1] <= bounds[static_cast<size_t>(r) + 1])
                ++hi;
            pq[static_cast<size_t>(r)] = trapezoid_power(rho, iq, lo, hi);
            ps[static_cast<size_t>(r)] = trapezoid_power(rho, is, lo, hi);
        }
        double sq = 0.0, ss = 0.0;
        for (int r = 0; r < 5; ++r) {
            sq += pq[static_cast<size_t>(r)];
            ss += ps[static_cast<size_t>(r)];
        }
        const double c = sq / ss;
        double acc = 0.0;
        for (int r = 0; r < 5; ++r) {
            const double e = (pq[static_cast<size_t>(r)] -
                              c * ps[static_cast<size_t>(r)]) /
                             pq[static_cast<size_t>(r)];
            acc += e * e;
        }
        return std::sqrt(acc / 5.0);
    };

    const double rms_in = ring_rms(0.3);
    const double rms_out = ring_rms(1.5);
    detail = fmt("ring-power RMS: %.4f at 0.3 z_max, %.4f at 1.5 z_max "
                 "(z_max = %.3f m)",
                 rms_in, rms_out, z_max);
    return rms_in <= 0.05 && rms_out > 0.20;
}

// ---------------------------------------------------------------------------
// 5. Propagator oracles: Gaussian beam spreading law, power conservation,
//    semigroup composition, and the Airy ring of a hard disk.
// ---------------------------------------------------------------------------
bool criterion_propagator_oracles(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    const double k = params.wavenumber_per_m;
    const double w0 = 1e-6;
    const int n = 1024;
    const double pitch = 25e-9;

    Field2D gauss;
    gauss.grid = GridGeometry{n, n, pitch};
    gauss.wavelength_m = params.wavelength_m;
    gauss.values.resize(gauss.grid.pixel_count());
    for (int iy = 0; iy < n; ++iy) {
        const double y = gauss.grid.coord_y(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = gauss.grid.coord_x(ix);
            gauss.values[static_cast<size_t>(iy) * n + ix] =
                std::exp(-(x * x + y * y) / (w0 * w0));
        }
    }
    const double p0 = total_power(gauss);
    const Field2D far_z = propagate_fresnel(gauss, 1.0);

    double wsum = 0.0, isum = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        const double y = far_z.grid.coord_y(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = far_z.grid.coord_x(ix);
            const double w = std::norm(far_z.values[static_cast<size_t>(iy) * n + ix]);
            wsum += w * (x * x + y * y);
            isum += w;
        }
    }
    const double width = std::sqrt(2.0 * wsum / isum);
    const double z_r = 0.5 * k * w0 * w0;
    const double width_expect = w0 * std::sqrt(1.0 + 1.0 / (z_r * z_r));
    const double width_err = std::abs(width / width_expect - 1.0);
    const double power_err = std::abs(total_power(far_z) - p0) / p0;

    const Field2D two_step =
        propagate_fresnel(propagate_fresnel(gauss, 0.4), 0.6);
    double diff = 0.0, amax = 0.0;
    for (size_t i = 0; i < far_z.values.size(); ++i) {
        diff = std::max(diff, std::abs(two_step.values[i] - far_z.values[i]));
        amax = std::max(amax, std::abs(far_z.values[i]));
    }
    const double semigroup_err = diff / amax;

    Field2D disk;
    disk.grid = GridGeometry{n, n, pitch};
    disk.wavelength_m = params.wavelength_m;
    disk.values.resize(disk.grid.pixel_count());
    const double r_ap = 1e-6;
    for (int iy = 0; iy < n; ++iy) {
        const double y = disk.grid.coord_y(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = disk.grid.coord_x(ix);
            disk.values[static_cast<size_t>(iy) * n + ix] =
                (std::hypot(x, y) <= r_ap) ? 1.0 : 0.0;
        }
    }
    const double p_disk = total_power(disk);
    const Field2D far = propagate_farfield(disk);
    const double parseval_err =
        std::abs(total_power(far) - p_disk) / p_disk;

    const double dk = far.grid.pitch_m;
    int dip = -1;
    const size_t row = static_cast<size_t>(n / 2) * n + n / 2;
    double prev = std::norm(far.values[row]);
    double here = std::norm(far.values[row + 1]);
    for (int i = 2; i < n / 2 - 1; ++i) {
        const double next = std::norm(far.values[row + static_cast<size_t>(i)]);
        if (here < prev && here <= next) {
            dip = i - 1;
            break;
        }
        prev = here;
        here = next;
    }
    const double ring_expect = 3.8317059702075125 / r_ap;
    const double ring_err = std::abs(dip * dk - ring_expect);

    detail = fmt("width err %.2e, power err %.2e, semigroup err %.2e, "
                 "Parseval err %.2e, ring err %.2f bins",
                 width_err, power_err, semigroup_err, parseval_err,
                 ring_err / dk);
    return width_err <= 0.005 && power_err <= 1e-6 && semigroup_err <= 1e-6 &&
           parseval_err <= 1e-9 && dip > 0 && ring_err <= dk;
}

// ---------------------------------------------------------------------------
// 6. The far field of the ring-carrier mask is an annulus at the designed
//    transverse wavenumber whose width tracks the inverse aperture diameter.
// ---------------------------------------------------------------------------
bool criterion_farfield_ring(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    struct Case {
        double radius_m;
        double alpha_rad;
        int n_px;
        double pitch_m;
    };
    const Case cases[] = {{1.22e-6, 10e-6, 2048, 12.5e-9},
                          {5e-6, 6e-6, 2048, 12.5e-9},
                          {10e-6, 6e-6, 2048, 25e-9}};
    // The annulus peak itself sits below k_rho (the rho-weighted aperture
    // integral skews the apex), so the center is taken as the midpoint of
    // the half-power crossings. The exit wave is zero-embedded to 4x the
    // synthesis grid before the transform so the crossings are resolved;
    // the pass tolerance stays one spectral pixel of the synthesis grid.
    const int big = 8192;
    std::string parts;
    for (const Case& c : cases) {
        const HologramSpec spec = base_spec(params, c.alpha_rad, c.radius_m,
                                            c.pitch_m, c.n_px, 100e-9, 0);
        const TransmittanceMap mask = build_transmittance(spec, 1.0);
        const Field2D exit = illuminate(mask, params, SourceModel{}, c.radius_m);
        Field2D wide;
        wide.grid = GridGeometry{big, big, c.pitch_m};
        wide.wavelength_m = exit.wavelength_m;
        wide.values.assign(wide.grid.pixel_count(), {0.0, 0.0});
        const int off = (big - c.n_px) / 2;
        for (int iy = 0; iy < c.n_px; ++iy)
            std::copy_n(exit.values.data() + static_cast<size_t>(iy) * c.n_px,
                        c.n_px,
                        wide.values.data() +
                            (static_cast<size_t>(iy) + off) * big + off);
        const Field2D far = propagate_farfield(wide);
        const double dk = far.grid.pitch_m;
        const double dk_native = dk * big / c.n_px;
        const double kx = kTwoPi / spec.grating_pitch_m;
        const int nb = static_cast<int>(std::lround(0.5 * kx / dk));
        std::vector<double> sum(static_cast<size_t>(nb), 0.0);
        std::vector<long> count(static_cast<size_t>(nb), 0);
        for (int iy = 0; iy < big; ++iy) {
            const double qy = far.grid.coord_y(iy);
            if (std::abs(qy) > 0.5 * kx) continue;
            for (int ix = 0; ix < big; ++ix) {
                const double qx = far.grid.coord_x(ix) - kx;
                if (std::abs(qx) > 0.5 * kx) continue;
                const int bin =
                    static_cast<int>(std::lround(std::hypot(qx, qy) / dk));
                if (bin >= nb) continue;
                sum[static_cast<size_t>(bin)] += std::norm(
                    far.values[static_cast<size_t>(iy) * big + ix]);
                count[static_cast<size_t>(bin)] += 1;
            }
        }
        std::vector<double> prof(static_cast<size_t>(nb), 0.0);
        for (int b = 0; b < nb; ++b)
            if (count[static_cast<size_t>(b)] > 0)
                prof[static_cast<size_t>(b)] = sum[static_cast<size_t>(b)] /
                                               count[static_cast<size_t>(b)];
        size_t pk = 0;
        for (size_t b = 1; b < prof.size(); ++b)
            if (prof[b] > prof[pk]) pk = b;
        const double half = 0.5 * prof[pk];
        size_t hi = pk;
        while (hi + 1 < prof.size() && prof[hi + 1] >= half) ++hi;
        double r_hi = static_cast<double>(hi) * dk;
        if (hi + 1 < prof.size())
            r_hi += dk * (prof[hi] - half) / (prof[hi] - prof[hi + 1]);
        size_t lo = pk;
        while (lo > 0 && prof[lo - 1] >= half) --lo;
        double r_lo = static_cast<double>(lo) * dk;
        if (lo > 0)
            r_lo -= dk * (prof[lo] - half) / (prof[lo] - prof[lo - 1]);
        const double center_err =
            std::abs(0.5 * (r_lo + r_hi) - spec.k_rho_per_m);
        const double fwhm = r_hi - r_lo;
        const double norm_width = fwhm / kTwoPi * 2.0 * c.radius_m;
        parts += fmt("%s[R = %.2f um: center err %.2f px, width x %.2f]",
                     parts.empty() ? "" : " ", c.radius_m * 1e6,
                     center_err / dk_native, norm_width);
        if (center_err > dk_native || norm_width < 0.5 || norm_width > 2.0) {
            detail = parts;
            return false;
        }
    }
    detail = parts;
    return true;
}

// ---------------------------------------------------------------------------
// 7. Winding-number detection: synthetic vortices of charge -3..3 at three
//    loop radii, a vortex-free plane wave, and the splitting of a charge-2
//    beam into unit vortices under a phase perturbation.
// ---------------------------------------------------------------------------
bool criterion_vortex_detection(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    for (int n : {-3, -2, -1, 1, 2, 3}) {
        // Nodeless ring profile: a radial factor with sign changes would put
        // exact-pi phase steps on the sampled grid and confuse the winding
        // sums along its nodal circles.
        Field2D f;
        f.grid = GridGeometry{128, 128, 1e-6};
        f.wavelength_m = params.wavelength_m;
        f.values.resize(f.grid.pixel_count());
        for (int iy = 0; iy < 128; ++iy) {
            for (int ix = 0; ix < 128; ++ix) {
                const double dx = ix - 64.0;
                const double dy = iy - 64.0;
                const double s = std::hypot(dx, dy) / 6.0;
                const double phi = std::atan2(dy, dx);
                f.values[static_cast<size_t>(iy) * 128 + ix] =
                    std::pow(s, std::abs(n)) * std::exp(-0.5 * s * s) *
                    std::polar(1.0, n * phi);
            }
        }
        for (int loop : {3, 5, 7}) {
            const VortexMap vm = winding_numbers(f, loop, 1e-3);
            if (vm.vortices.size() != 1) {
                detail = fmt("charge %+d loop %d: %zu clusters", n, loop,
                             vm.vortices.size());
                return false;
            }
            const Vortex& v = vm.vortices.front();
            if (v.charge != n || std::abs(v.x_px - 64.0) > 1.5 ||
                std::abs(v.y_px - 64.0) > 1.5) {
                detail = fmt("charge %+d loop %d: found %+d at (%.1f, %.1f)",
                             n, loop, v.charge, v.x_px, v.y_px);
                return false;
            }
        }
    }

    Field2D plane;
    plane.grid = GridGeometry{128, 128, 1e-6};
    plane.wavelength_m = params.wavelength_m;
    plane.values.resize(plane.grid.pixel_count());
    for (int iy = 0; iy < 128; ++iy)
        for (int ix = 0; ix < 128; ++ix)
            plane.values[static_cast<size_t>(iy) * 128 + ix] =
                std::polar(1.0, 0.4 * ix + 0.1 * iy);
    if (!winding_numbers(plane, 5, 1e-3).vortices.empty()) {
        detail = "plane wave reported vortices";
        return false;
    }

    // A doubly charged beam is structurally unstable: a weak phase ripple on
    // the mask splits it into two unit-charge vortices near the axis.
    HologramSpec spec =
        base_spec(params, 6e-6, 5e-6, 12.5e-9, 1024, 100e-9, 2);
    TransmittanceMap mask = build_transmittance(spec, 1.0);
    Perturbation ripple;
    ripple.kind = PerturbationKind::PhaseRipple;
    ripple.magnitude_rad = 0.1;
    ripple.corr_length_m = 1e-6;
    ripple.seed = 8;
    mask = perturb_hologram(mask, ripple);
    Field2D exit = illuminate(mask, params, SourceModel{}, spec.aperture_radius_m);

    const int n_px = 1024;
    fft2_inplace(exit.values.data(), n_px, n_px, false);
    const int carrier =
        static_cast<int>(std::lround(n_px * spec.grid.pitch_m / spec.grating_pitch_m));
    const int half_window = carrier / 2;
    std::vector<std::complex<double>> shifted(exit.values.size(), 0.0);
    for (int iy = 0; iy < n_px; ++iy) {
        for (int fx = 0; fx < n_px; ++fx) {
            const int centered = fx < n_px / 2 ? fx : fx - n_px;
            if (centered < -half_window || centered >= half_window) continue;
            const int from = (fx + carrier) % n_px;
            shifted[static_cast<size_t>(iy) * n_px + fx] =
                exit.values[static_cast<size_t>(iy) * n_px + from];
        }
    }
    fft2_inplace(shifted.data(), n_px, n_px, true);

    Field2D big;
    big.grid = GridGeometry{2048, 2048, spec.grid.pitch_m};
    big.wavelength_m = params.wavelength_m;
    big.values.resize(big.grid.pixel_count());
    const int off = (2048 - n_px) / 2;
    for (int iy = 0; iy < n_px; ++iy)
        for (int ix = 0; ix < n_px; ++ix)
            big.values[static_cast<size_t>(iy + off) * 2048 + (ix + off)] =
                shifted[static_cast<size_t>(iy) * n_px + ix];

    // Read the map at the smallest loop: once the pair has separated by a
    // few pixels, any loop wide enough to enclose both members reports an
    // extra composite charge-2 cluster between them.
    const Field2D out = propagate_fresnel(big, 0.12);
    const VortexMap vm = winding_numbers(out, 3, 1e-3);
    std::vector<const Vortex*> near;
    for (const Vortex& v : vm.vortices)
        if (std::hypot(v.x_px - 1024.0, v.y_px - 1024.0) <= 100.0)
            near.push_back(&v);
    const int total = total_charge(vm, 1024.0, 1024.0, 100.0);
    if (near.size() != 2 || total != 2) {
        detail = fmt("split: %zu vortices near axis, net charge %+d",
                     near.size(), total);
        return false;
    }
    const double sep = std::hypot(near[0]->x_px - near[1]->x_px,
                                  near[0]->y_px - near[1]->y_px);
    if (near[0]->charge != 1 || near[1]->charge != 1 || sep < 2.0) {
        detail = fmt("split: charges %+d/%+d, separation %.1f px",
                     near[0]->charge, near[1]->charge, sep);
        return false;
    }
    detail = fmt("synthetic charges -3..+3 located; charge-2 beam split into "
                 "two unit vortices %.1f px apart",
                 sep);
    return true;
}

// ---------------------------------------------------------------------------
// 8. Annular-aperture probes beat an aberrated full-aperture probe at high
//    spatial frequency in the ADF transfer curve.
// ---------------------------------------------------------------------------
bool criterion_transfer_crossover(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    const GridGeometry grid{1024, 1024, 0.022e-9};
    ProbeSpec ring;
    ring.kind = ProbeKind::BesselRing;
    ring.convergence_rad = 15e-3;
    ring.ring_fractional_width = 0.06;
    ProbeSpec full;
    full.kind = ProbeKind::ApertureLimited;
    full.convergence_rad = 15e-3;
    full.cs_m = 0.5e-3;
    full.defocus_m = 40e-9;
    const auto curves = compare_probes({ring, full}, params, grid);
    const TransferCurve& h_ring = curves[0];
    const TransferCurve& h_full = curves[1];
    double best_gap = -1.0;
    double best_k = 0.0;
    bool crossed = false;
    for (size_t i = 0;
         i < h_ring.samples.size() && i < h_full.samples.size(); ++i) {
        const double k = h_ring.samples[i].k_per_m;
        if (k < 0.9e10 || k > 1.3e10) continue;
        const double gap = h_ring.samples[i].h - h_full.samples[i].h;
        if (gap > best_gap) {
            best_gap = gap;
            best_k = k;
        }
        if (gap > 0.0) crossed = true;
    }
    detail = fmt("max (H_ring - H_full) = %.3f at k = %.3e cycles/m",
                 best_gap, best_k);
    return crossed;
}

// ---------------------------------------------------------------------------
// 9. The isolated converging order keeps a near-constant central lobe over
//    half its validity range while a size-matched Gaussian more than doubles.
// ---------------------------------------------------------------------------
bool criterion_nondiffracting(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    // alpha and R trade off against the propagation canvas: the far end of
    // the scan (0.5 z_max = 0.16 m) must stay inside the safe Fresnel range
    // of the padded grid while the lobe (~4.5 px) stays resolvable.
    const HologramSpec spec =
        base_spec(params, 16e-6, 5e-6, 12.5e-9, 2048, 64e-9, 0);
    const double z_max = validity_range(spec, params, 1).z_max_m;
    const Field2D iso = isolated_order_field(spec, params, 1, 2);

    std::vector<double> widths;
    const double z_fracs[] = {0.1, 0.2, 0.3, 0.4, 0.5};
    for (double zf : z_fracs) {
        const Field2D out = propagate_fresnel(iso, zf * z_max);
        const std::vector<double> prof = center_radial_profile(out, 24);
        widths.push_back(fitted_bessel_fwhm(prof, out.grid.pitch_m));
    }
    double w_lo = widths[0], w_hi = widths[0], w_mean = 0.0;
    for (double w : widths) {
        w_lo = std::min(w_lo, w);
        w_hi = std::max(w_hi, w);
        w_mean += w;
    }
    w_mean /= widths.size();
    const double variation = (w_hi - w_lo) / w_mean;

    const double w0 = w_mean / kGaussFwhmPerW;
    Field2D gauss;
    gauss.grid = GridGeometry{4096, 4096, 12.5e-9};
    gauss.wavelength_m = params.wavelength_m;
    gauss.values.resize(gauss.grid.pixel_count());
    for (int iy = 0; iy < 4096; ++iy) {
        const double y = gauss.grid.coord_y(iy);
        for (int ix = 0; ix < 4096; ++ix) {
            const double x = gauss.grid.coord_x(ix);
            gauss.values[static_cast<size_t>(iy) * 4096 + ix] =
                std::exp(-(x * x + y * y) / (w0 * w0));
        }
    }
    const Field2D g_first = propagate_fresnel(gauss, z_fracs[0] * z_max);
    const Field2D g_last = propagate_fresnel(gauss, z_fracs[4] * z_max);
    const double fw_first =
        fitted_gauss_fwhm(center_radial_profile(g_first, 900),
                          g_first.grid.pitch_m);
    const double fw_last = fitted_gauss_fwhm(center_radial_profile(g_last, 900),
                                             g_last.grid.pitch_m);
    const double ratio = fw_last / fw_first;

    detail = fmt("lobe FWHM %.1f-%.1f nm (variation %.1f%%); matched Gaussian "
                 "FWHM grows x%.1f",
                 w_lo * 1e9, w_hi * 1e9, variation * 100.0, ratio);
    return variation < 0.10 && ratio >= 2.0;
}

// ---------------------------------------------------------------------------
// 10. Round trips: field files are bit-exact, the config echo is a fixed
//     point, and thickness maps reproduce the requested phase profile.
// ---------------------------------------------------------------------------
bool criterion_round_trips(std::string& detail) {
    const ElectronParams params = derive_params(200.0);
    const fs::path dir = fs::temp_directory_path() / "ebessel_acceptance";
    fs::create_directories(dir);

    Field2D f;
    f.grid = GridGeometry{96, 64, 12.5e-9};
    f.wavelength_m = params.wavelength_m;
    f.z_m = 0.125;
    f.values.resize(f.grid.pixel_count());
    for (size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = {0.25 + std::sin(0.71 * i), std::cos(1.31 * i - 0.4)};
    const fs::path path = dir / "roundtrip.efld";
    export_field(f, path.string());
    const Field2D g = import_field(path.string());
    const bool field_ok =
        g.grid == f.grid && g.wavelength_m == f.wavelength_m &&
        g.z_m == f.z_m && g.values.size() == f.values.size() &&
        std::memcmp(g.values.data(), f.values.data(),
                    f.values.size() * sizeof(std::complex<double>)) == 0;

    const std::string text = R"({
  "electron": {"energy_kev": 300.0},
  "hologram": {
    "n": 2,
    "grating_pitch_nm": 100.0,
    "aperture_radius_um": 5.0,
    "k_rho_per_um": 19.1,
    "profile": "sinusoidal",
    "phase_depth_rad": 1.8,
    "grid_pixels": 1024,
    "grid_pitch_nm": 12.5
  },
  "material": {"inner_potential_v": 15.2, "base_thickness_nm": 120.0},
  "perturbation": {"kind": "fringe_jitter", "magnitude_rad": 0.05,
                   "corr_length_nm": 250.0, "seed": 7},
  "efficiency": {"t0_min_nm": 0.5, "t0_max_nm": 60.0, "count": 13}
})";
    const RunConfig c1 = parse_config(text);
    const RunConfig c2 = parse_config(c1.echo_text);
    const bool echo_ok =
        c2.echo_text == c1.echo_text &&
        c2.hologram.k_rho_per_m == c1.hologram.k_rho_per_m &&
        c2.params.wavelength_m == c1.params.wavelength_m &&
        c2.base_thickness_m == c1.base_thickness_m;

    HologramSpec spec;
    spec.n = 1;
    spec.k_rho_per_m = params.wavenumber_per_m * 6e-6;
    spec.grating_pitch_m = 100e-9;
    spec.aperture_radius_m = 2e-6;
    spec.profile = Profile::Blazed;
    spec.phase_depth_rad = kTwoPi;
    spec.grid = GridGeometry{512, 512, 12.5e-9};
    const double v0 = 17.0;
    const ThicknessMap tm = thickness_from_phase(spec, params, v0, 60e-9);
    double worst = 0.0;
    for (int iy = 0; iy < 512; ++iy) {
        const double y = spec.grid.coord_y(iy);
        for (int ix = 0; ix < 512; ++ix) {
            const double x = spec.grid.coord_x(ix);
            if (std::hypot(x, y) > spec.aperture_radius_m) continue;
            const double rebuilt =
                params.interaction_const * v0 *
                    tm.values_m[static_cast<size_t>(iy) * 512 + ix] +
                tm.phase_offset_rad;
            const double want = phase_profile(spec, x, y);
            worst = std::max(worst, std::abs(rebuilt - want));
        }
    }
    const bool phase_ok = worst <= 1e-12;
    detail = fmt("field bits %s, echo fixed point %s, phase residual %.1e rad",
                 field_ok ? "equal" : "DIFFER", echo_ok ? "yes" : "NO", worst);
    fs::remove_all(dir);
    return field_ok && echo_ok && phase_ok;
}

}  // namespace

int main() {
    struct Criterion {
        const char* label;
        bool (*run)(std::string&);
    };
    const Criterion table[] = {
        {"sinusoidal grating order fractions follow squared Bessel weights",
         criterion_order_fractions},
        {"efficiency optimum and blazed-profile throughput",
         criterion_efficiency_optimum},
        {"on-axis intensity of converging order peaks at its focal distance",
         criterion_onaxis_focus},
        {"stationary-phase reference valid in range, invalid beyond",
         criterion_stationary_phase},
        {"free-space propagator matches Gaussian/Airy oracles",
         criterion_propagator_oracles},
        {"far-field annulus centered at design wavenumber with 1/diameter width",
         criterion_farfield_ring},
        {"winding-number vortex detection and charge-2 splitting",
         criterion_vortex_detection},
        {"annular probe out-transfers aberrated full aperture at high k",
         criterion_transfer_crossover},
        {"isolated order holds lobe width where matched Gaussian doubles",
         criterion_nondiffracting},
        {"file, config, and thickness round trips are exact",
         criterion_round_trips},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& c : table) {
        ++index;
        std::string note;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = c.run(note);
        } catch (const std::exception& e) {
            note = fmt("exception: %s", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("[%2d] %s  %s (%s; %.1f s)\n", index,
                    ok ? "PASS" : "FAIL", c.label, note.c_str(), seconds);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %d criteria passed\n", index);
    else
        std::printf("acceptance: %d of %d criteria FAILED\n", failures, index);
    return failures == 0 ? 0 : 1;
}
