#include "ebessel/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "ebessel/besselfn.hpp"
#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/parallel.hpp"

namespace ebessel {

namespace {

using cd = std::complex<double>;

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule by Newton iteration on the Legendre recurrence.
GaussRule legendre_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& rule8() {
    static const GaussRule r = legendre_rule(8);
    return r;
}
const GaussRule& rule16() {
    static const GaussRule r = legendre_rule(16);
    return r;
}

cd ipow(int p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

struct PanelSum {
    cd value;
    double error;
};

PanelSum integrate_panels(double upper, int n_panels, int nu, double b, double chirp,
                          double bessel_rate) {
    const GaussRule& fine = rule16();
    const GaussRule& coarse = rule8();
    const double h = upper / n_panels;
    cd sum16{0.0, 0.0}, sum8{0.0, 0.0};
    for (int p = 0; p < n_panels; ++p) {
        const double a = p * h;
        const double half = 0.5 * h;
        const double mid = a + half;
        cd s16{0.0, 0.0};
        for (size_t i = 0; i < fine.nodes.size(); ++i) {
            const double r = mid + half * fine.nodes[i];
            const double phase = b * r - chirp * r * r;
            s16 += fine.weights[i] * r * bessel_j(nu, bessel_rate * r) *
                   std::polar(1.0, phase);
        }
        cd s8{0.0, 0.0};
        for (size_t i = 0; i < coarse.nodes.size(); ++i) {
            const double r = mid + half * coarse.nodes[i];
            const double phase = b * r - chirp * r * r;
            s8 += coarse.weights[i] * r * bessel_j(nu, bessel_rate * r) *
                  std::polar(1.0, phase);
        }
        sum16 += half * s16;
        sum8 += half * s8;
    }
    return {sum16, std::abs(sum16 - sum8)};
}

}  // namespace

std::vector<cd> quadrature_oracle(const HologramSpec& spec, const ElectronParams& params,
                                  int m, double z_m, const std::vector<double>& rho_m) {
    if (!(z_m > 0.0)) throw DomainError("quadrature oracle requires z > 0");
    const double k = params.wavenumber_per_m;
    const double lambda = params.wavelength_m;
    const double R = spec.aperture_radius_m;
    if (!(R > 0.0)) throw DomainError("aperture radius must be positive");

    const int nu = m * spec.n;
    const double b = m * spec.k_rho_per_m;
    const double chirp = k / (2.0 * z_m);  // coefficient of rho'^2

    std::vector<cd> out(rho_m.size());
    std::vector<int> failed(rho_m.size(), 0);
    for_each_index(static_cast<int>(rho_m.size()), [&](int si) {
        const double rho = rho_m[static_cast<size_t>(si)];
        const double bessel_rate = k * rho / z_m;
        // Fastest local phase rate over the integration range, rad/m.
        const double chirp_rate = std::max(std::abs(b), std::abs(b - k * R / z_m));
        const double rate = std::max(chirp_rate + bessel_rate, 1.0 / R);
        const double max_width = kPi / (2.0 * rate);
        int n_panels = std::max(4, static_cast<int>(std::ceil(R / max_width)));
        if (n_panels > 2000000) {
            failed[static_cast<size_t>(si)] = 1;
            return;
        }

        const double scale = 0.5 * R * R;  // magnitude of the trivial integrand
        PanelSum result{};
        bool converged = false;
        for (int attempt = 0; attempt < 4; ++attempt) {
            result = integrate_panels(R, n_panels, nu, b, chirp, bessel_rate);
            if (result.error <= 1e-6 * (std::abs(result.value) + 1e-9 * scale)) {
                converged = true;
                break;
            }
            n_panels *= 2;
        }
        if (!converged) {
            failed[static_cast<size_t>(si)] = 1;
            return;
        }

        const cd prefactor = -kTwoPi * ipow(nu + 1) / (lambda * z_m) *
                             std::polar(1.0, k * (z_m - rho * rho / (2.0 * z_m)));
        out[static_cast<size_t>(si)] = prefactor * result.value;
    });

    for (size_t i = 0; i < failed.size(); ++i)
        if (failed[i])
            throw OracleError("radial quadrature did not converge at rho = " +
                              std::to_string(rho_m[i]) + " m");
    return out;
}

}  // namespace ebessel
