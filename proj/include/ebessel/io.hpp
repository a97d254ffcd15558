#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ebessel/analysis.hpp"
#include "ebessel/field.hpp"
#include "ebessel/grid.hpp"
#include "ebessel/hologram.hpp"
#include "ebessel/stem.hpp"
#include "ebessel/vortex.hpp"

namespace ebessel {

enum class ImageMode { Intensity16, PhaseHue };

// Binary field dump. Layout: magic "EFLD", version u16, nx u32, ny u32,
// pitch_m f64, wavelength_m f64, z_m f64, then nx*ny little-endian
// (re f64, im f64) pairs row-major. Round trips are bit-exact.
void export_field(const Field2D& field, const std::string& path);
Field2D import_field(const std::string& path);

// intensity16: 16-bit binary graymap, linear max -> 65535.
// phase_hue: binary pixmap, hue = phase/2pi, brightness = amplitude/max.
void export_image(const Field2D& field, ImageMode mode,
                  const std::string& path);
void export_image(const RealGrid& grid, const std::string& path);

// Milling pattern: line 1 "REPEAT <N>", then "x y dwell_us" per pixel with
// nonzero removal depth, row-major. dwell = depth_nm * dwell_per_nm_us / N.
void export_fib_pattern(const ThicknessMap& map, double dwell_per_nm_us,
                        const std::string& path, int repetitions = 1);

void write_order_spectrum_csv(const OrderSpectrum& spectrum,
                              const std::string& path);
void write_efficiency_csv(const std::vector<std::pair<double, double>>& points,
                          const std::string& path);
void write_onaxis_csv(const std::vector<double>& z_m,
                      const std::vector<double>& intensity,
                      const std::string& path);
void write_focal_scan_csv(const FocalScanResult& result,
                          const std::string& path);
void write_vortex_csv(const VortexMap& map, const std::string& path);
void write_transfer_csv(const TransferCurve& curve, const std::string& path);

// Simple line plot of several curves sharing one frequency axis, rendered as
// an 8-bit graymap with one gray level per curve.
void export_curve_plot(const std::vector<TransferCurve>& curves, int width,
                       int height, const std::string& path);

// Writes text to a temporary sibling and renames it into place.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace ebessel
