#include "ebessel/stem.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

inline int signed_bin(int i, int n) { return i < n / 2 ? i : i - n; }

void validate_spec(const ProbeSpec& spec) {
    if (!(spec.convergence_rad > 0.0))
        throw DomainError("probe convergence must be > 0");
    if (spec.kind == ProbeKind::BesselRing) {
        if (!(spec.ring_fractional_width > 0.0 &&
              spec.ring_fractional_width < 1.0))
            throw DomainError("ring fractional width must lie in (0, 1)");
        if (spec.cs_m != 0.0 || spec.defocus_m != 0.0)
            throw DomainError("aberrations apply to aperture-limited probes only");
    }
}

}  // namespace

Field2D build_probe(const ProbeSpec& spec, const ElectronParams& params,
                    const GridGeometry& grid) {
    validate_spec(spec);
    validate(grid);

    const double k = params.wavenumber_per_m;
    const double k_center = k * spec.convergence_rad;
    double k_outer = k_center;
    double k_inner = 0.0;
    if (spec.kind == ProbeKind::BesselRing) {
        k_outer = k_center * (1.0 + 0.5 * spec.ring_fractional_width);
        k_inner = k_center * (1.0 - 0.5 * spec.ring_fractional_width);
    }
    const double q_limit =
        (std::min(grid.nx, grid.ny) / 2 - 1) *
        std::min(grid.freq_pitch_x(), grid.freq_pitch_y());
    if (k_outer > q_limit)
        throw SamplingError("probe aperture exceeds the grid's wavenumber range");

    const double dqx = grid.freq_pitch_x();
    const double dqy = grid.freq_pitch_y();
    const double lam = params.wavelength_m;

    Field2D probe;
    probe.grid = grid;
    probe.wavelength_m = lam;
    probe.z_m = 0.0;
    probe.values.assign(grid.pixel_count(), cd(0.0, 0.0));

    for_each_index(grid.ny, [&](int iy) {
        const double qy = signed_bin(iy, grid.ny) * dqy;
        const size_t row = static_cast<size_t>(iy) * grid.nx;
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double qx = signed_bin(ix, grid.nx) * dqx;
            const double q = std::hypot(qx, qy);
            if (q > k_outer || q < k_inner) continue;
            double phase = 0.0;
            if (spec.n != 0 && q > 0.0) phase += spec.n * std::atan2(qy, qx);
            if (spec.kind == ProbeKind::ApertureLimited) {
                // Axial aberration phase in spatial-frequency (cycles/m) form.
                const double nu2 = q * q / (kTwoPi * kTwoPi);
                const double chi = kPi * lam * spec.defocus_m * nu2 +
                                   0.5 * kPi * spec.cs_m * lam * lam * lam *
                                       nu2 * nu2;
                phase -= chi;
            }
            // Alternating sign centers the inverse transform on the grid.
            const double s = ((ix + iy) % 2 == 0) ? 1.0 : -1.0;
            probe.values[row + ix] = std::polar(s, phase);
        }
    });

    fft2_inplace(probe.values.data(), grid.nx, grid.ny, true);

    const double power = total_power(probe);
    if (!(power > 0.0)) throw DomainError("probe aperture contains no pixels");
    const double scale = 1.0 / std::sqrt(power);
    for_each_index(grid.ny, [&](int iy) {
        const size_t row = static_cast<size_t>(iy) * grid.nx;
        for (int ix = 0; ix < grid.nx; ++ix) probe.values[row + ix] *= scale;
    });
    return probe;
}

TransferCurve adf_transfer(const Field2D& probe) {
    validate(probe.grid);
    const int nx = probe.grid.nx;
    const int ny = probe.grid.ny;
    const double pitch2 = probe.grid.pitch_m * probe.grid.pitch_m;

    std::vector<cd> intensity(probe.grid.pixel_count());
    for_each_index(ny, [&](int iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix)
            intensity[row + ix] = cd(std::norm(probe.values[row + ix]), 0.0);
    });
    fft2_inplace(intensity.data(), nx, ny, false);

    // Independent route: circular autocorrelation of the far-field amplitude,
    // evaluated by direct summation at a handful of lags.
    {
        std::vector<cd> amp(probe.values);
        fft2_inplace(amp.data(), nx, ny, false);
        const std::pair<int, int> lags[] = {{0, 0},      {1, 0},     {0, 1},
                                            {2, 3},      {nx / 8, 0}, {0, ny / 8},
                                            {nx / 4, ny / 4}};
        const double ref = std::abs(intensity[0]) + 1e-300;
        for (const auto& [lx, ly] : lags) {
            cd acc(0.0, 0.0);
            for (int iy = 0; iy < ny; ++iy) {
                const size_t row = static_cast<size_t>(iy) * nx;
                const size_t srow =
                    static_cast<size_t>((iy - ly + ny) % ny) * nx;
                for (int ix = 0; ix < nx; ++ix)
                    acc += amp[row + ix] *
                           std::conj(amp[srow + (ix - lx + nx) % nx]);
            }
            acc /= static_cast<double>(nx) * ny;
            const size_t idx =
                static_cast<size_t>(ly) * nx + static_cast<size_t>(lx);
            if (std::abs(acc - intensity[idx]) > 1e-9 * ref)
                throw AnalysisError(
                    "transfer-function routes disagree beyond tolerance");
        }
    }

    const double dqx = probe.grid.freq_pitch_x();
    const double dqy = probe.grid.freq_pitch_y();
    const int nbins = std::min(nx, ny) / 2 + 1;
    std::vector<double> sums(static_cast<size_t>(nbins), 0.0);
    std::vector<long> counts(static_cast<size_t>(nbins), 0);
    const double dq = std::min(dqx, dqy);
    for (int iy = 0; iy < ny; ++iy) {
        const double qy = signed_bin(iy, ny) * dqy;
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double qx = signed_bin(ix, nx) * dqx;
            const int b = static_cast<int>(std::lround(std::hypot(qx, qy) / dq));
            if (b >= nbins) continue;
            sums[static_cast<size_t>(b)] += std::abs(intensity[row + ix]) * pitch2;
            ++counts[static_cast<size_t>(b)];
        }
    }

    TransferCurve curve;
    curve.samples.resize(static_cast<size_t>(nbins));
    for (int b = 0; b < nbins; ++b) {
        curve.samples[static_cast<size_t>(b)].k_per_m = b * dq / kTwoPi;
        curve.samples[static_cast<size_t>(b)].h =
            counts[static_cast<size_t>(b)] > 0
                ? sums[static_cast<size_t>(b)] / counts[static_cast<size_t>(b)]
                : 0.0;
    }
    curve.normalization_k = dq / kTwoPi;
    return curve;
}

std::vector<TransferCurve> compare_probes(const std::vector<ProbeSpec>& specs,
                                          const ElectronParams& params,
                                          const GridGeometry& grid) {
    if (specs.size() < 2)
        throw DomainError("probe comparison needs at least two specs");
    std::vector<TransferCurve> curves;
    curves.reserve(specs.size());
    for (const ProbeSpec& spec : specs)
        curves.push_back(adf_transfer(build_probe(spec, params, grid)));

    const double ref = curves.front().samples.at(1).h;
    for (TransferCurve& curve : curves) {
        const double own = curve.samples.at(1).h;
        if (!(own > 0.0))
            throw AnalysisError("curve vanishes at the normalization bin");
        const double scale = ref / own;
        for (TransferSample& s : curve.samples) s.h *= scale;
    }
    return curves;
}

std::vector<double> find_crossings(const TransferCurve& a,
                                   const TransferCurve& b) {
    const size_t n = std::min(a.samples.size(), b.samples.size());
    if (n < 2) throw AnalysisError("curves too short to intersect");
    std::vector<double> ks;
    double prev = a.samples[0].h - b.samples[0].h;
    for (size_t i = 1; i < n; ++i) {
        if (std::abs(a.samples[i].k_per_m - b.samples[i].k_per_m) >
            1e-9 * (a.samples[i].k_per_m + 1e-300))
            throw AnalysisError("curves sampled on different frequency axes");
        const double cur = a.samples[i].h - b.samples[i].h;
        if ((prev < 0.0) != (cur < 0.0) && prev != cur) {
            const double t = prev / (prev - cur);
            ks.push_back(a.samples[i - 1].k_per_m +
                         t * (a.samples[i].k_per_m - a.samples[i - 1].k_per_m));
        }
        prev = cur;
    }
    return ks;
}

}  // namespace ebessel
