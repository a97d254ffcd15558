#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ebessel/analysis.hpp"
#include "ebessel/config.hpp"
#include "ebessel/errors.hpp"
#include "ebessel/field.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/io.hpp"
#include "ebessel/parallel.hpp"
#include "ebessel/propagation.hpp"
#include "ebessel/stem.hpp"
#include "ebessel/vortex.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ebessel::ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ebessel::RunConfig load_config(const std::string& path) {
    ebessel::RunConfig cfg = ebessel::parse_config(read_file(path));
    std::filesystem::create_directories(cfg.output_dir);
    ebessel::write_text_atomic(join(cfg.output_dir, "config_echo.json"),
                               cfg.echo_text);
    return cfg;
}

// The transmittance the config describes: designed mask, optionally with the
// configured perturbation applied.
ebessel::TransmittanceMap config_transmittance(const ebessel::RunConfig& cfg) {
    ebessel::TransmittanceMap map =
        ebessel::build_transmittance(cfg.hologram, cfg.amplitude);
    if (cfg.perturbation)
        map = ebessel::perturb_hologram(map, *cfg.perturbation);
    return map;
}

ebessel::Field2D transmittance_as_field(const ebessel::TransmittanceMap& map,
                                        const ebessel::ElectronParams& params) {
    ebessel::Field2D field;
    field.grid = map.grid;
    field.values = map.values;
    field.wavelength_m = params.wavelength_m;
    field.z_m = 0.0;
    return field;
}

void run_synth(const std::string& config_path, bool emit_fib) {
    const ebessel::RunConfig cfg = load_config(config_path);
    const ebessel::ThicknessMap thickness = ebessel::thickness_from_phase(
        cfg.hologram, cfg.params, cfg.inner_potential_v, cfg.base_thickness_m);
    const ebessel::TransmittanceMap map = config_transmittance(cfg);
    const ebessel::Field2D field = transmittance_as_field(map, cfg.params);

    ebessel::export_field(field, join(cfg.output_dir, "transmittance.efld"));
    ebessel::export_image(field, ebessel::ImageMode::PhaseHue,
                          join(cfg.output_dir, "hologram_phase.ppm"));
    ebessel::export_image(field, ebessel::ImageMode::Intensity16,
                          join(cfg.output_dir, "hologram_intensity.pgm"));
    ebessel::export_image(
        ebessel::RealGrid{thickness.grid, thickness.values_m},
        join(cfg.output_dir, "thickness.pgm"));
    if (emit_fib)
        ebessel::export_fib_pattern(thickness, cfg.fib_dwell_per_nm_us,
                                    join(cfg.output_dir, "fib_pattern.txt"),
                                    cfg.fib_repetitions);
    std::cout << "synth: outputs in " << cfg.output_dir << "\n";
}

void run_propagate(const std::string& config_path,
                   const std::vector<double>& z_list) {
    if (z_list.empty())
        throw ebessel::ConfigError("propagate requires at least one --z value");
    const ebessel::RunConfig cfg = load_config(config_path);
    const ebessel::TransmittanceMap map = config_transmittance(cfg);
    const bool incoherent =
        cfg.source.tilt_sigma_rad > 0.0 && cfg.source.n_samples > 1;

    std::ostringstream index_csv;
    index_csv << "index,z[m]\n";
    for (size_t i = 0; i < z_list.size(); ++i) {
        std::ostringstream tag;
        tag << "z" << i;
        index_csv << i << "," << z_list[i] << "\n";
        if (incoherent) {
            const ebessel::RealGrid intensity = ebessel::incoherent_average(
                map, cfg.params, cfg.source, cfg.hologram.aperture_radius_m,
                z_list[i]);
            ebessel::export_image(
                intensity,
                join(cfg.output_dir, "intensity_" + tag.str() + ".pgm"));
        } else {
            const ebessel::Field2D exit_wave = ebessel::illuminate(
                map, cfg.params, cfg.source, cfg.hologram.aperture_radius_m);
            const ebessel::Field2D out =
                ebessel::propagate_fresnel(exit_wave, z_list[i]);
            ebessel::export_field(
                out, join(cfg.output_dir, "field_" + tag.str() + ".efld"));
            ebessel::export_image(
                out, ebessel::ImageMode::Intensity16,
                join(cfg.output_dir, "intensity_" + tag.str() + ".pgm"));
        }
    }
    ebessel::write_text_atomic(join(cfg.output_dir, "propagate_index.csv"),
                               index_csv.str());
    std::cout << "propagate: " << z_list.size() << " plane(s) in "
              << cfg.output_dir << "\n";
}

void run_farfield(const std::string& config_path) {
    const ebessel::RunConfig cfg = load_config(config_path);
    const ebessel::TransmittanceMap map = config_transmittance(cfg);
    const ebessel::Field2D exit_wave = ebessel::illuminate(
        map, cfg.params, cfg.source, cfg.hologram.aperture_radius_m);
    const ebessel::Field2D far = ebessel::propagate_farfield(exit_wave);
    ebessel::export_field(far, join(cfg.output_dir, "farfield.efld"));
    ebessel::export_image(far, ebessel::ImageMode::Intensity16,
                          join(cfg.output_dir, "farfield_intensity.pgm"));
    const ebessel::OrderSpectrum spectrum =
        ebessel::measure_order_spectrum(far, cfg.hologram, -3, 3);
    ebessel::write_order_spectrum_csv(spectrum,
                                      join(cfg.output_dir, "orders.csv"));
    if (spectrum.overlap)
        std::cerr << "warning: order windows overlap (k_rho >= k_x/2)\n";
    std::cout << "farfield: orders.csv in " << cfg.output_dir << "\n";
}

void run_efficiency(const std::string& config_path) {
    const ebessel::RunConfig cfg = load_config(config_path);
    if (!cfg.efficiency_t0_m)
        throw ebessel::ConfigError(
            "efficiency-sweep requires an \"efficiency\" config section");
    const auto points = ebessel::efficiency_vs_thickness(
        cfg.hologram, cfg.params, cfg.inner_potential_v,
        cfg.efficiency_t0_m->samples());
    ebessel::write_efficiency_csv(points,
                                  join(cfg.output_dir, "efficiency.csv"));
    std::cout << "efficiency-sweep: " << points.size() << " point(s) in "
              << cfg.output_dir << "\n";
}

void run_onaxis(const std::string& config_path) {
    const ebessel::RunConfig cfg = load_config(config_path);
    if (!cfg.onaxis_z_m)
        throw ebessel::ConfigError(
            "onaxis requires an \"onaxis\" config section");
    const auto curve = ebessel::onaxis_curve(cfg.hologram, cfg.params,
                                             cfg.onaxis_z_m->samples());
    std::vector<double> z, intensity;
    for (const auto& [zi, ii] : curve) {
        z.push_back(zi);
        intensity.push_back(ii);
    }
    ebessel::write_onaxis_csv(z, intensity, join(cfg.output_dir, "onaxis.csv"));
    std::cout << "onaxis: " << curve.size() << " sample(s) in "
              << cfg.output_dir << "\n";
}

void run_vortices(const std::string& field_path, const std::string& out_dir,
                  int loop_size, double floor) {
    const ebessel::Field2D field = ebessel::import_field(field_path);
    const ebessel::VortexMap map =
        ebessel::winding_numbers(field, loop_size, floor);
    std::filesystem::create_directories(out_dir);
    ebessel::write_vortex_csv(map, join(out_dir, "vortices.csv"));
    ebessel::export_image(field, ebessel::ImageMode::PhaseHue,
                          join(out_dir, "phase.ppm"));
    std::cout << "vortices: " << map.vortices.size() << " found, "
              << map.skipped_loops << " loop(s) skipped\n";
}

void run_focal_scan(const std::string& config_path) {
    const ebessel::RunConfig cfg = load_config(config_path);
    if (!cfg.focal_scan_z_m)
        throw ebessel::ConfigError(
            "focal-scan requires a \"focal_scan\" config section");
    const ebessel::FocalScanResult result = ebessel::focal_scan(
        cfg.hologram, cfg.params, cfg.source, cfg.focal_scan_z_m->samples(),
        cfg.focal_scan_m_max);
    ebessel::write_focal_scan_csv(result,
                                  join(cfg.output_dir, "focal_scan.csv"));
    for (size_t i = 0; i < result.orders.size(); ++i)
        std::cout << "order " << result.orders[i] << ": focus at z = "
                  << result.focal_z_m[i] << " m\n";
}

void run_transfer(const std::string& config_path) {
    const ebessel::RunConfig cfg = load_config(config_path);
    if (!cfg.transfer)
        throw ebessel::ConfigError(
            "transfer requires a \"transfer\" config section");
    const std::vector<ebessel::TransferCurve> curves = ebessel::compare_probes(
        cfg.transfer->probes, cfg.params, cfg.transfer->grid);
    for (size_t i = 0; i < curves.size(); ++i)
        ebessel::write_transfer_csv(
            curves[i],
            join(cfg.output_dir, "transfer_" + std::to_string(i) + ".csv"));
    ebessel::export_curve_plot(curves, 800, 500,
                               join(cfg.output_dir, "transfer_compare.pgm"));
    for (size_t i = 1; i < curves.size(); ++i) {
        const std::vector<double> ks =
            ebessel::find_crossings(curves[0], curves[i]);
        std::cout << "crossings 0 vs " << i << ":";
        if (ks.empty()) std::cout << " none";
        for (double k : ks) std::cout << " " << k;
        std::cout << " [cycles/m]\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("EBESSEL_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) ebessel::set_worker_count(n);
    }

    CLI::App app{"Electron Bessel-beam hologram designer and analyzer"};
    app.require_subcommand(1);

    std::string config_path, field_path, vortex_out = ".";
    std::vector<double> z_list;
    int loop_size = 5;
    double amplitude_floor = 1e-3;
    bool emit_fib = false;

    CLI::App* synth = app.add_subcommand(
        "synth", "Hologram thickness and transmittance maps");
    synth->add_option("config", config_path, "run configuration (JSON)")
        ->required();
    synth->add_flag("--fib", emit_fib, "also emit the milling pattern file");

    CLI::App* propagate =
        app.add_subcommand("propagate", "Near-field propagation to given z");
    propagate->add_option("config", config_path, "run configuration (JSON)")
        ->required();
    propagate->add_option("--z", z_list, "propagation distance(s) in meters")
        ->required()
        ->expected(-1);

    CLI::App* farfield = app.add_subcommand(
        "farfield", "Far-field intensity and diffraction-order fractions");
    farfield->add_option("config", config_path, "run configuration (JSON)")
        ->required();

    CLI::App* efficiency = app.add_subcommand(
        "efficiency-sweep", "Exit efficiency versus modulation thickness");
    efficiency->add_option("config", config_path, "run configuration (JSON)")
        ->required();

    CLI::App* onaxis = app.add_subcommand(
        "onaxis", "On-axis intensity of the first order versus z");
    onaxis->add_option("config", config_path, "run configuration (JSON)")
        ->required();

    CLI::App* vortices = app.add_subcommand(
        "vortices", "Phase singularities of a stored field");
    vortices->add_option("field", field_path, "field dump (.efld)")
        ->required();
    vortices->add_option("--out", vortex_out, "output directory");
    vortices->add_option("--loop", loop_size, "winding loop size (odd, px)");
    vortices->add_option("--floor", amplitude_floor,
                         "relative amplitude floor");

    CLI::App* focal = app.add_subcommand(
        "focal-scan", "Per-order beam size versus z under convergence");
    focal->add_option("config", config_path, "run configuration (JSON)")
        ->required();

    CLI::App* transfer = app.add_subcommand(
        "transfer", "STEM ADF transfer-curve comparison");
    transfer->add_option("config", config_path, "run configuration (JSON)")
        ->required();

    CLI::App* version = app.add_subcommand("version", "Print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) run_synth(config_path, emit_fib);
        else if (*propagate) run_propagate(config_path, z_list);
        else if (*farfield) run_farfield(config_path);
        else if (*efficiency) run_efficiency(config_path);
        else if (*onaxis) run_onaxis(config_path);
        else if (*vortices)
            run_vortices(field_path, vortex_out, loop_size, amplitude_floor);
        else if (*focal) run_focal_scan(config_path);
        else if (*transfer) run_transfer(config_path);
        else if (*version) std::cout << "ebessel " << kVersion << "\n";
    } catch (const ebessel::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ebessel::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ebessel::PropagationRangeError& e) {
        std::cerr << "error: " << e.what()
                  << " (largest safe step: " << e.max_safe_dz_m << " m)\n";
        return 2;
    } catch (const ebessel::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
