// Times the OpenMP kernel paths against the serial reference paths and
// verifies that both produce bitwise-identical output.  Wall times are
// best-of-N (default 3, override with a single integer argument).

#include <algorithm>
#include <chrono>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "ebessel/electron.hpp"
#include "ebessel/fft.hpp"
#include "ebessel/field.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/parallel.hpp"
#include "ebessel/propagation.hpp"
#include "ebessel/vortex.hpp"

using namespace ebessel;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best,
                        std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

std::vector<std::complex<double>> random_block(int n_px, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::complex<double>> data(
        static_cast<size_t>(n_px) * static_cast<size_t>(n_px));
    for (auto& v : data) v = {uni(rng), uni(rng)};
    return data;
}

struct Row {
    std::string name;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

template <class Make, class Run>
Row measure(const std::string& name, int reps, Make make, Run run) {
    Row row;
    row.name = name;

    set_exec_mode(ExecMode::Serial);
    auto serial_out = make();
    run(serial_out);  // warm-up + reference result
    row.serial_s = best_of(reps, [&] {
        auto work = make();
        run(work);
        serial_out = std::move(work);
    });

    set_exec_mode(ExecMode::Parallel);
    auto parallel_out = make();
    run(parallel_out);
    row.parallel_s = best_of(reps, [&] {
        auto work = make();
        run(work);
        parallel_out = std::move(work);
    });

    row.identical =
        serial_out.size() == parallel_out.size() &&
        std::memcmp(serial_out.data(), parallel_out.data(),
                    serial_out.size() * sizeof(serial_out[0])) == 0;
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    const ElectronParams params = derive_params(200.0);

    HologramSpec spec;
    spec.n = 2;
    spec.k_rho_per_m = params.wavenumber_per_m * 6e-6;
    spec.grating_pitch_m = 100e-9;
    spec.aperture_radius_m = 10e-6;
    spec.profile = Profile::Sinusoidal;
    spec.phase_depth_rad = 1.0;
    spec.grid = GridGeometry{2048, 2048, 12.5e-9};

    Field2D gauss;
    gauss.grid = GridGeometry{1024, 1024, 25e-9};
    gauss.wavelength_m = params.wavelength_m;
    gauss.values.resize(gauss.grid.pixel_count());
    for (int iy = 0; iy < 1024; ++iy) {
        const double y = gauss.grid.coord_y(iy);
        for (int ix = 0; ix < 1024; ++ix) {
            const double x = gauss.grid.coord_x(ix);
            gauss.values[static_cast<size_t>(iy) * 1024 + ix] =
                std::exp(-(x * x + y * y) / (4e-6 * 4e-6));
        }
    }

    Field2D vortex_field;
    vortex_field.grid = GridGeometry{1024, 1024, 25e-9};
    vortex_field.wavelength_m = params.wavelength_m;
    vortex_field.values.resize(vortex_field.grid.pixel_count());
    for (int iy = 0; iy < 1024; ++iy) {
        for (int ix = 0; ix < 1024; ++ix) {
            const double dx = ix - 512.0;
            const double dy = iy - 512.0;
            vortex_field.values[static_cast<size_t>(iy) * 1024 + ix] =
                std::polar(std::hypot(dx, dy) / 724.0, std::atan2(dy, dx));
        }
    }

    std::vector<Row> rows;
    for (int n_px : {1024, 2048}) {
        const auto block = random_block(n_px, 12345u + static_cast<uint32_t>(n_px));
        rows.push_back(measure(
            "fft2 " + std::to_string(n_px) + "x" + std::to_string(n_px), reps,
            [&] { return block; },
            [&](std::vector<std::complex<double>>& d) {
                fft2_inplace(d.data(), n_px, n_px, false);
            }));
    }
    rows.push_back(measure(
        "hologram transmittance 2048x2048", reps,
        [&] { return std::vector<char>(1, 0); },
        [&](std::vector<char>&) { (void)build_transmittance(spec, 1.0); }));
    {
        // build_transmittance output equality needs its own run capture
        set_exec_mode(ExecMode::Serial);
        const TransmittanceMap a = build_transmittance(spec, 1.0);
        set_exec_mode(ExecMode::Parallel);
        const TransmittanceMap b = build_transmittance(spec, 1.0);
        rows.back().identical =
            a.values.size() == b.values.size() &&
            std::memcmp(a.values.data(), b.values.data(),
                        a.values.size() * sizeof(a.values[0])) == 0;
    }
    rows.push_back(measure(
        "fresnel step 1024x1024", reps, [&] { return gauss.values; },
        [&](std::vector<std::complex<double>>& vals) {
            Field2D f = gauss;
            f.values = std::move(vals);
            Field2D out = propagate_fresnel(f, 1e-4);
            vals = std::move(out.values);
        }));
    {
        Row row;
        row.name = "winding scan 1024x1024";
        set_exec_mode(ExecMode::Serial);
        const VortexMap a = winding_numbers(vortex_field, 5, 1e-3);
        row.serial_s = best_of(
            reps, [&] { (void)winding_numbers(vortex_field, 5, 1e-3); });
        set_exec_mode(ExecMode::Parallel);
        const VortexMap b = winding_numbers(vortex_field, 5, 1e-3);
        row.parallel_s = best_of(
            reps, [&] { (void)winding_numbers(vortex_field, 5, 1e-3); });
        row.identical = a.vortices.size() == b.vortices.size();
        for (size_t i = 0; row.identical && i < a.vortices.size(); ++i)
            row.identical = a.vortices[i].x_px == b.vortices[i].x_px &&
                            a.vortices[i].y_px == b.vortices[i].y_px &&
                            a.vortices[i].charge == b.vortices[i].charge;
        rows.push_back(row);
    }

    std::printf("%-34s %12s %12s %9s %9s\n", "kernel", "serial [s]",
                "parallel [s]", "speedup", "bitwise");
    bool all_identical = true;
    for (const Row& row : rows) {
        std::printf("%-34s %12.4f %12.4f %8.2fx %9s\n", row.name.c_str(),
                    row.serial_s, row.parallel_s,
                    row.serial_s / row.parallel_s,
                    row.identical ? "equal" : "DIFFER");
        all_identical = all_identical && row.identical;
    }
    std::printf("workers: %d\n", worker_count());
    if (!all_identical) {
        std::printf("error: serial and parallel outputs differ\n");
        return 1;
    }
    return 0;
}
