#include "ebessel/config.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"

namespace ebessel {

namespace {

using nlohmann::json;

struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& path, const std::string& what) {
        errors.push_back(path + ": " + what);
    }
    bool clean() const { return errors.empty(); }
};

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed, Collector& c) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) c.add(prefix + it.key(), "unknown key");
    }
}

const json* child_object(const json& parent, const char* key,
                         bool required, const std::string& prefix,
                         Collector& c) {
    if (!parent.contains(key)) {
        if (required) c.add(prefix + key, "missing required section");
        return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
        c.add(prefix + key, "must be an object");
        return nullptr;
    }
    return &v;
}

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

double need_num(const json& obj, const char* key, const std::string& prefix,
                Collector& c) {
    if (!obj.contains(key)) {
        c.add(prefix + key, "missing required key");
        return kMissing;
    }
    if (!obj.at(key).is_number()) {
        c.add(prefix + key, "must be a number");
        return kMissing;
    }
    return obj.at(key).get<double>();
}

double num_or(const json& obj, const char* key, double fallback,
              const std::string& prefix, Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) {
        c.add(prefix + key, "must be a number");
        return fallback;
    }
    return obj.at(key).get<double>();
}

long long int_or(const json& obj, const char* key, long long fallback,
                 const std::string& prefix, Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer()) {
        c.add(prefix + key, "must be an integer");
        return fallback;
    }
    return obj.at(key).get<long long>();
}

std::string str_or(const json& obj, const char* key,
                   const std::string& fallback, const std::string& prefix,
                   Collector& c) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) {
        c.add(prefix + key, "must be a string");
        return fallback;
    }
    return obj.at(key).get<std::string>();
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

std::vector<double> RangeSpec::samples() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count));
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Collector c;
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, "",
               {"electron", "hologram", "source", "material", "illumination",
                "perturbation", "output", "efficiency", "onaxis", "focal_scan",
                "vortices", "fib", "transfer"},
               c);

    RunConfig cfg;
    json resolved;

    double energy_kev = kMissing;
    if (const json* e = child_object(root, "electron", true, "", c)) {
        check_keys(*e, "electron.", {"energy_kev"}, c);
        energy_kev = need_num(*e, "energy_kev", "electron.", c);
        if (!std::isnan(energy_kev) && !positive(energy_kev))
            c.add("electron.energy_kev", "must be > 0");
    }
    resolved["electron"]["energy_kev"] = energy_kev;
    if (positive(energy_kev)) cfg.params = derive_params(energy_kev);

    double alpha_urad = kMissing, k_rho_per_um = kMissing;
    if (const json* h = child_object(root, "hologram", true, "", c)) {
        const std::string p = "hologram.";
        check_keys(*h, p,
                   {"n", "grating_pitch_nm", "aperture_radius_um",
                    "alpha_urad", "k_rho_per_um", "profile",
                    "phase_depth_rad", "grid_pixels", "grid_pitch_nm"},
                   c);
        cfg.hologram.n = static_cast<int>(int_or(*h, "n", 0, p, c));
        const double pitch_nm = need_num(*h, "grating_pitch_nm", p, c);
        const double radius_um = need_num(*h, "aperture_radius_um", p, c);
        if (!std::isnan(pitch_nm) && !positive(pitch_nm))
            c.add(p + "grating_pitch_nm", "must be > 0");
        if (!std::isnan(radius_um) && !positive(radius_um))
            c.add(p + "aperture_radius_um", "must be > 0");
        cfg.hologram.grating_pitch_m = pitch_nm * 1e-9;
        cfg.hologram.aperture_radius_m = radius_um * 1e-6;

        const bool has_alpha = h->contains("alpha_urad");
        const bool has_krho = h->contains("k_rho_per_um");
        if (has_alpha == has_krho) {
            c.add(p + "alpha_urad",
                  "exactly one of alpha_urad / k_rho_per_um is required");
        } else if (has_alpha) {
            alpha_urad = need_num(*h, "alpha_urad", p, c);
            if (!std::isnan(alpha_urad) && !positive(alpha_urad))
                c.add(p + "alpha_urad", "must be > 0");
            cfg.hologram.k_rho_per_m =
                cfg.params.wavenumber_per_m * alpha_urad * 1e-6;
        } else {
            k_rho_per_um = need_num(*h, "k_rho_per_um", p, c);
            if (!std::isnan(k_rho_per_um) && !positive(k_rho_per_um))
                c.add(p + "k_rho_per_um", "must be > 0");
            cfg.hologram.k_rho_per_m = k_rho_per_um * 1e6;
        }

        const std::string profile = str_or(*h, "profile", "blazed", p, c);
        if (profile == "blazed") {
            cfg.hologram.profile = Profile::Blazed;
        } else if (profile == "sinusoidal") {
            cfg.hologram.profile = Profile::Sinusoidal;
        } else {
            c.add(p + "profile", "must be \"blazed\" or \"sinusoidal\"");
        }
        cfg.hologram.phase_depth_rad =
            num_or(*h, "phase_depth_rad", kTwoPi, p, c);
        if (!positive(cfg.hologram.phase_depth_rad))
            c.add(p + "phase_depth_rad", "must be > 0");

        const long long pixels = int_or(*h, "grid_pixels", 0, p, c);
        if (!h->contains("grid_pixels"))
            c.add(p + "grid_pixels", "missing required key");
        const double grid_pitch_nm = need_num(*h, "grid_pitch_nm", p, c);
        if (!std::isnan(grid_pitch_nm) && !positive(grid_pitch_nm))
            c.add(p + "grid_pitch_nm", "must be > 0");
        cfg.hologram.grid =
            GridGeometry{static_cast<int>(pixels), static_cast<int>(pixels),
                         grid_pitch_nm * 1e-9};

        resolved["hologram"]["n"] = cfg.hologram.n;
        resolved["hologram"]["grating_pitch_nm"] = pitch_nm;
        resolved["hologram"]["aperture_radius_um"] = radius_um;
        if (has_alpha && !has_krho)
            resolved["hologram"]["alpha_urad"] = alpha_urad;
        if (has_krho && !has_alpha)
            resolved["hologram"]["k_rho_per_um"] = k_rho_per_um;
        resolved["hologram"]["profile"] = profile;
        resolved["hologram"]["phase_depth_rad"] = cfg.hologram.phase_depth_rad;
        resolved["hologram"]["grid_pixels"] = pixels;
        resolved["hologram"]["grid_pitch_nm"] = grid_pitch_nm;
    }

    {
        const json empty = json::object();
        const json* s = child_object(root, "source", false, "", c);
        if (!s) s = &empty;
        const std::string p = "source.";
        check_keys(*s, p, {"tilt_sigma_urad", "n_samples", "convergence_urad"},
                   c);
        const double sigma_urad = num_or(*s, "tilt_sigma_urad", 0.0, p, c);
        const long long n_samples = int_or(*s, "n_samples", 1, p, c);
        const double conv_urad = num_or(*s, "convergence_urad", 0.0, p, c);
        if (!non_negative(sigma_urad))
            c.add(p + "tilt_sigma_urad", "must be >= 0");
        if (n_samples < 1) c.add(p + "n_samples", "must be >= 1");
        if (!non_negative(conv_urad))
            c.add(p + "convergence_urad", "must be >= 0");
        if (sigma_urad > 0.0 && n_samples > 1) {
            const long long r = std::llround(std::sqrt(double(n_samples)));
            if (r * r != n_samples)
                c.add(p + "n_samples",
                      "must be a perfect square (tensor tilt grid)");
        }
        cfg.source.tilt_sigma_rad = sigma_urad * 1e-6;
        cfg.source.n_samples = static_cast<int>(n_samples);
        cfg.source.convergence_rad = conv_urad * 1e-6;
        resolved["source"]["tilt_sigma_urad"] = sigma_urad;
        resolved["source"]["n_samples"] = n_samples;
        resolved["source"]["convergence_urad"] = conv_urad;
    }

    {
        const json empty = json::object();
        const json* m = child_object(root, "material", false, "", c);
        if (!m) m = &empty;
        const std::string p = "material.";
        check_keys(*m, p, {"inner_potential_v", "base_thickness_nm"}, c);
        cfg.inner_potential_v = num_or(*m, "inner_potential_v", 17.0, p, c);
        const double base_nm = num_or(*m, "base_thickness_nm", 150.0, p, c);
        if (!positive(cfg.inner_potential_v))
            c.add(p + "inner_potential_v", "must be > 0");
        if (!positive(base_nm)) c.add(p + "base_thickness_nm", "must be > 0");
        cfg.base_thickness_m = base_nm * 1e-9;
        resolved["material"]["inner_potential_v"] = cfg.inner_potential_v;
        resolved["material"]["base_thickness_nm"] = base_nm;
    }

    {
        const json empty = json::object();
        const json* i = child_object(root, "illumination", false, "", c);
        if (!i) i = &empty;
        check_keys(*i, "illumination.", {"amplitude"}, c);
        cfg.amplitude = num_or(*i, "amplitude", 1.0, "illumination.", c);
        if (!positive(cfg.amplitude))
            c.add("illumination.amplitude", "must be > 0");
        resolved["illumination"]["amplitude"] = cfg.amplitude;
    }

    if (const json* pt = child_object(root, "perturbation", false, "", c)) {
        const std::string p = "perturbation.";
        check_keys(*pt, p, {"kind", "magnitude_rad", "corr_length_nm", "seed"},
                   c);
        Perturbation pert;
        const std::string kind = str_or(*pt, "kind", "phase_ripple", p, c);
        if (kind == "phase_ripple") {
            pert.kind = PerturbationKind::PhaseRipple;
        } else if (kind == "fringe_jitter") {
            pert.kind = PerturbationKind::FringeJitter;
        } else {
            c.add(p + "kind", "must be \"phase_ripple\" or \"fringe_jitter\"");
        }
        pert.magnitude_rad = need_num(*pt, "magnitude_rad", p, c);
        const double corr_nm = need_num(*pt, "corr_length_nm", p, c);
        if (!std::isnan(pert.magnitude_rad) && !non_negative(pert.magnitude_rad))
            c.add(p + "magnitude_rad", "must be >= 0");
        if (!std::isnan(corr_nm) && !positive(corr_nm))
            c.add(p + "corr_length_nm", "must be > 0");
        pert.corr_length_m = corr_nm * 1e-9;
        const long long seed = int_or(*pt, "seed", 1, p, c);
        if (seed < 0 || seed > 0xffffffffLL)
            c.add(p + "seed", "must fit an unsigned 32-bit integer");
        pert.seed = static_cast<uint32_t>(seed);
        cfg.perturbation = pert;
        resolved["perturbation"]["kind"] = kind;
        resolved["perturbation"]["magnitude_rad"] = pert.magnitude_rad;
        resolved["perturbation"]["corr_length_nm"] = corr_nm;
        resolved["perturbation"]["seed"] = seed;
    }

    {
        const json empty = json::object();
        const json* o = child_object(root, "output", false, "", c);
        if (!o) o = &empty;
        check_keys(*o, "output.", {"directory"}, c);
        cfg.output_dir = str_or(*o, "directory", ".", "output.", c);
        if (cfg.output_dir.empty())
            c.add("output.directory", "must not be empty");
        resolved["output"]["directory"] = cfg.output_dir;
    }

    if (const json* e = child_object(root, "efficiency", false, "", c)) {
        const std::string p = "efficiency.";
        check_keys(*e, p, {"t0_min_nm", "t0_max_nm", "count"}, c);
        const double lo_nm = num_or(*e, "t0_min_nm", 0.0, p, c);
        const double hi_nm = need_num(*e, "t0_max_nm", p, c);
        const int count = static_cast<int>(int_or(*e, "count", 41, p, c));
        if (!non_negative(lo_nm)) c.add(p + "t0_min_nm", "must be >= 0");
        if (!std::isfinite(hi_nm) || hi_nm < lo_nm)
            c.add(p + "t0_max_nm", "must be >= t0_min_nm");
        if (count < 1) c.add(p + "count", "must be >= 1");
        cfg.efficiency_t0_m = RangeSpec{lo_nm * 1e-9, hi_nm * 1e-9, count};
        resolved["efficiency"]["t0_min_nm"] = lo_nm;
        resolved["efficiency"]["t0_max_nm"] = hi_nm;
        resolved["efficiency"]["count"] = count;
    }
    if (const json* o = child_object(root, "onaxis", false, "", c)) {
        const std::string p = "onaxis.";
        check_keys(*o, p, {"z_min_m", "z_max_m", "count"}, c);
        const double lo = need_num(*o, "z_min_m", p, c);
        const double hi = need_num(*o, "z_max_m", p, c);
        const int count = static_cast<int>(int_or(*o, "count", 20, p, c));
        if (!positive(lo)) c.add(p + "z_min_m", "must be > 0");
        if (!std::isfinite(hi) || hi < lo)
            c.add(p + "z_max_m", "must be >= z_min_m");
        if (count < 1) c.add(p + "count", "must be >= 1");
        cfg.onaxis_z_m = RangeSpec{lo, hi, count};
        resolved["onaxis"]["z_min_m"] = lo;
        resolved["onaxis"]["z_max_m"] = hi;
        resolved["onaxis"]["count"] = count;
    }
    if (const json* f = child_object(root, "focal_scan", false, "", c)) {
        const std::string p = "focal_scan.";
        check_keys(*f, p, {"z_min_m", "z_max_m", "count", "m_max"}, c);
        RangeSpec range;
        range.lo = need_num(*f, "z_min_m", p, c);
        range.hi = need_num(*f, "z_max_m", p, c);
        range.count = static_cast<int>(int_or(*f, "count", 21, p, c));
        if (!positive(range.lo)) c.add(p + "z_min_m", "must be > 0");
        if (!std::isfinite(range.hi) || range.hi < range.lo)
            c.add(p + "z_max_m", "must be >= z_min_m");
        if (range.count < 1) c.add(p + "count", "must be >= 1");
        cfg.focal_scan_z_m = range;
        cfg.focal_scan_m_max =
            static_cast<int>(int_or(*f, "m_max", 1, p, c));
        if (cfg.focal_scan_m_max < 1) c.add(p + "m_max", "must be >= 1");
        resolved["focal_scan"]["z_min_m"] = range.lo;
        resolved["focal_scan"]["z_max_m"] = range.hi;
        resolved["focal_scan"]["count"] = range.count;
        resolved["focal_scan"]["m_max"] = cfg.focal_scan_m_max;
    }

    {
        const json empty = json::object();
        const json* v = child_object(root, "vortices", false, "", c);
        if (!v) v = &empty;
        const std::string p = "vortices.";
        check_keys(*v, p, {"loop_size_px", "amplitude_floor"}, c);
        cfg.vortex_loop_px =
            static_cast<int>(int_or(*v, "loop_size_px", 5, p, c));
        cfg.vortex_amplitude_floor =
            num_or(*v, "amplitude_floor", 1e-3, p, c);
        if (cfg.vortex_loop_px < 3 || cfg.vortex_loop_px % 2 == 0)
            c.add(p + "loop_size_px", "must be an odd integer >= 3");
        if (!(cfg.vortex_amplitude_floor >= 0.0 &&
              cfg.vortex_amplitude_floor <= 1.0))
            c.add(p + "amplitude_floor", "must lie in [0, 1]");
        resolved["vortices"]["loop_size_px"] = cfg.vortex_loop_px;
        resolved["vortices"]["amplitude_floor"] = cfg.vortex_amplitude_floor;
    }

    {
        const json empty = json::object();
        const json* f = child_object(root, "fib", false, "", c);
        if (!f) f = &empty;
        const std::string p = "fib.";
        check_keys(*f, p, {"dwell_per_nm_us", "repetitions"}, c);
        cfg.fib_dwell_per_nm_us = num_or(*f, "dwell_per_nm_us", 1.0, p, c);
        cfg.fib_repetitions =
            static_cast<int>(int_or(*f, "repetitions", 1, p, c));
        if (!positive(cfg.fib_dwell_per_nm_us))
            c.add(p + "dwell_per_nm_us", "must be > 0");
        if (cfg.fib_repetitions < 1) c.add(p + "repetitions", "must be >= 1");
        resolved["fib"]["dwell_per_nm_us"] = cfg.fib_dwell_per_nm_us;
        resolved["fib"]["repetitions"] = cfg.fib_repetitions;
    }

    if (const json* t = child_object(root, "transfer", false, "", c)) {
        const std::string p = "transfer.";
        check_keys(*t, p, {"probes", "grid_pixels", "grid_pitch_nm"}, c);
        TransferConfig tc;
        const long long pixels = int_or(*t, "grid_pixels", 0, p, c);
        if (!t->contains("grid_pixels"))
            c.add(p + "grid_pixels", "missing required key");
        const double pitch_nm = need_num(*t, "grid_pitch_nm", p, c);
        if (!std::isnan(pitch_nm) && !positive(pitch_nm))
            c.add(p + "grid_pitch_nm", "must be > 0");
        tc.grid = GridGeometry{static_cast<int>(pixels),
                               static_cast<int>(pixels), pitch_nm * 1e-9};
        resolved["transfer"]["grid_pixels"] = pixels;
        resolved["transfer"]["grid_pitch_nm"] = pitch_nm;

        if (!t->contains("probes") || !t->at("probes").is_array() ||
            t->at("probes").size() < 2) {
            c.add(p + "probes", "must be an array of at least two probes");
        } else {
            const json& probes = t->at("probes");
            for (size_t i = 0; i < probes.size(); ++i) {
                const std::string pp =
                    p + "probes[" + std::to_string(i) + "].";
                if (!probes[i].is_object()) {
                    c.add(pp, "must be an object");
                    continue;
                }
                check_keys(probes[i], pp,
                           {"kind", "convergence_mrad", "ring_fractional_width",
                            "cs_mm", "defocus_nm", "n"},
                           c);
                ProbeSpec ps;
                const std::string kind =
                    str_or(probes[i], "kind", "", pp, c);
                if (kind == "bessel_ring") {
                    ps.kind = ProbeKind::BesselRing;
                } else if (kind == "aperture_limited") {
                    ps.kind = ProbeKind::ApertureLimited;
                } else {
                    c.add(pp + "kind",
                          "must be \"bessel_ring\" or \"aperture_limited\"");
                }
                const double conv_mrad =
                    need_num(probes[i], "convergence_mrad", pp, c);
                if (!std::isnan(conv_mrad) && !positive(conv_mrad))
                    c.add(pp + "convergence_mrad", "must be > 0");
                ps.convergence_rad = conv_mrad * 1e-3;
                ps.ring_fractional_width =
                    num_or(probes[i], "ring_fractional_width", 0.0, pp, c);
                const double cs_mm = num_or(probes[i], "cs_mm", 0.0, pp, c);
                const double defocus_nm =
                    num_or(probes[i], "defocus_nm", 0.0, pp, c);
                ps.cs_m = cs_mm * 1e-3;
                ps.defocus_m = defocus_nm * 1e-9;
                ps.n = static_cast<int>(int_or(probes[i], "n", 0, pp, c));
                if (ps.kind == ProbeKind::BesselRing) {
                    if (!(ps.ring_fractional_width > 0.0 &&
                          ps.ring_fractional_width < 1.0))
                        c.add(pp + "ring_fractional_width",
                              "must lie in (0, 1) for bessel_ring");
                    if (ps.cs_m != 0.0 || ps.defocus_m != 0.0)
                        c.add(pp + "cs_mm",
                              "aberrations apply to aperture_limited only");
                }
                tc.probes.push_back(ps);

                json rp;
                rp["kind"] = kind;
                rp["convergence_mrad"] = conv_mrad;
                if (ps.kind == ProbeKind::BesselRing)
                    rp["ring_fractional_width"] = ps.ring_fractional_width;
                rp["cs_mm"] = cs_mm;
                rp["defocus_nm"] = defocus_nm;
                rp["n"] = ps.n;
                resolved["transfer"]["probes"].push_back(rp);
            }
        }
        cfg.transfer = tc;
    }

    // Structural checks across fields only when the raw values parsed clean.
    if (c.clean()) {
        try {
            validate(cfg.hologram);
        } catch (const Error& e) {
            c.add("hologram", e.what());
        }
        if (cfg.transfer) {
            try {
                validate(cfg.transfer->grid);
            } catch (const Error& e) {
                c.add("transfer", e.what());
            }
            if (c.clean()) {
                const GridGeometry& g = cfg.transfer->grid;
                const double q_limit = (g.nx / 2 - 1) * g.freq_pitch_x();
                for (size_t i = 0; i < cfg.transfer->probes.size(); ++i) {
                    const ProbeSpec& ps = cfg.transfer->probes[i];
                    double k_outer =
                        cfg.params.wavenumber_per_m * ps.convergence_rad;
                    if (ps.kind == ProbeKind::BesselRing)
                        k_outer *= 1.0 + 0.5 * ps.ring_fractional_width;
                    if (k_outer > q_limit)
                        c.add("transfer.probes[" + std::to_string(i) + "]",
                              "aperture exceeds the grid's wavenumber range");
                }
            }
        }
    }

    if (!c.clean()) {
        std::string msg = "configuration invalid:";
        for (const std::string& e : c.errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }

    cfg.echo_text = resolved.dump(2) + "\n";
    return cfg;
}

}  // namespace ebessel
