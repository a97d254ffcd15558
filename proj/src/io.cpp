#include "ebessel/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "ebessel/constants.hpp"
#include "ebessel/errors.hpp"

namespace ebessel {

namespace {

constexpr uint16_t kFieldFormatVersion = 1;

template <typename T>
void append_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(const std::string& data, size_t offset) {
    if (offset + sizeof(T) > data.size())
        throw FormatError("field file truncated");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, data.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void write_binary_atomic(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open for writing: " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw FormatError("rename failed: " + path + ": " + ec.message());
}

std::string read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw FormatError("read failed: " + path);
    return buf.str();
}

void hsv_to_rgb(double h, double v, unsigned char* rgb) {
    h -= std::floor(h);
    v = std::clamp(v, 0.0, 1.0);
    const double hs = h * 6.0;
    const int sector = std::min(5, static_cast<int>(hs));
    const double f = hs - sector;
    const double p = 0.0, q = v * (1.0 - f), t = v * f;
    double r = 0.0, g = 0.0, b = 0.0;
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    rgb[0] = static_cast<unsigned char>(std::lround(r * 255.0));
    rgb[1] = static_cast<unsigned char>(std::lround(g * 255.0));
    rgb[2] = static_cast<unsigned char>(std::lround(b * 255.0));
}

void write_pgm16(const std::string& path, int nx, int ny,
                 const std::vector<double>& values) {
    double vmax = 0.0;
    for (double v : values)
        if (std::isfinite(v) && v > vmax) vmax = v;
    std::string bytes;
    bytes.reserve(static_cast<size_t>(nx) * ny * 2 + 32);
    bytes += "P5\n" + std::to_string(nx) + " " + std::to_string(ny) +
             "\n65535\n";
    for (int iy = ny - 1; iy >= 0; --iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double v = values[row + ix];
            long level = 0;
            if (vmax > 0.0 && std::isfinite(v) && v > 0.0)
                level = std::lround(v / vmax * 65535.0);
            level = std::clamp(level, 0L, 65535L);
            bytes.push_back(static_cast<char>((level >> 8) & 0xff));
            bytes.push_back(static_cast<char>(level & 0xff));
        }
    }
    write_binary_atomic(path, bytes);
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

void export_field(const Field2D& field, const std::string& path) {
    std::string bytes;
    bytes.reserve(38 + field.values.size() * 16);
    bytes += "EFLD";
    append_le<uint16_t>(bytes, kFieldFormatVersion);
    append_le<uint32_t>(bytes, static_cast<uint32_t>(field.grid.nx));
    append_le<uint32_t>(bytes, static_cast<uint32_t>(field.grid.ny));
    append_le<double>(bytes, field.grid.pitch_m);
    append_le<double>(bytes, field.wavelength_m);
    append_le<double>(bytes, field.z_m);
    for (const std::complex<double>& v : field.values) {
        append_le<double>(bytes, v.real());
        append_le<double>(bytes, v.imag());
    }
    write_binary_atomic(path, bytes);
}

Field2D import_field(const std::string& path) {
    const std::string data = read_binary(path);
    if (data.size() < 38 || data.compare(0, 4, "EFLD") != 0)
        throw FormatError("not a field file: " + path);
    const auto version = read_le<uint16_t>(data, 4);
    if (version != kFieldFormatVersion)
        throw FormatError("unsupported field format version " +
                          std::to_string(version));
    Field2D field;
    field.grid.nx = static_cast<int>(read_le<uint32_t>(data, 6));
    field.grid.ny = static_cast<int>(read_le<uint32_t>(data, 10));
    field.grid.pitch_m = read_le<double>(data, 14);
    field.wavelength_m = read_le<double>(data, 22);
    field.z_m = read_le<double>(data, 30);
    if (field.grid.nx <= 0 || field.grid.ny <= 0 ||
        field.grid.nx > (1 << 20) || field.grid.ny > (1 << 20))
        throw FormatError("implausible field dimensions");
    const size_t count =
        static_cast<size_t>(field.grid.nx) * static_cast<size_t>(field.grid.ny);
    if (data.size() != 38 + count * 16)
        throw FormatError("field file truncated");
    field.values.resize(count);
    size_t offset = 38;
    for (size_t i = 0; i < count; ++i, offset += 16)
        field.values[i] = {read_le<double>(data, offset),
                           read_le<double>(data, offset + 8)};
    return field;
}

void export_image(const Field2D& field, ImageMode mode,
                  const std::string& path) {
    const int nx = field.grid.nx, ny = field.grid.ny;
    if (mode == ImageMode::Intensity16) {
        std::vector<double> intensity(field.values.size());
        for (size_t i = 0; i < field.values.size(); ++i)
            intensity[i] = std::norm(field.values[i]);
        write_pgm16(path, nx, ny, intensity);
        return;
    }
    double amax = 0.0;
    for (const auto& v : field.values) amax = std::max(amax, std::abs(v));
    std::string bytes;
    bytes.reserve(static_cast<size_t>(nx) * ny * 3 + 32);
    bytes += "P6\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
    unsigned char rgb[3];
    for (int iy = ny - 1; iy >= 0; --iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const std::complex<double>& v = field.values[row + ix];
            const double hue = std::arg(v) / kTwoPi;
            const double value = amax > 0.0 ? std::abs(v) / amax : 0.0;
            hsv_to_rgb(hue, value, rgb);
            bytes.append(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    write_binary_atomic(path, bytes);
}

void export_image(const RealGrid& grid, const std::string& path) {
    write_pgm16(path, grid.grid.nx, grid.grid.ny, grid.values);
}

void export_fib_pattern(const ThicknessMap& map, double dwell_per_nm_us,
                        const std::string& path, int repetitions) {
    if (!(dwell_per_nm_us > 0.0))
        throw DomainError("dwell calibration must be > 0");
    if (repetitions < 1) throw DomainError("repetitions must be >= 1");
    std::ostringstream out;
    out << "REPEAT " << repetitions << "\n";
    out.precision(17);
    const int nx = map.grid.nx, ny = map.grid.ny;
    for (int iy = 0; iy < ny; ++iy) {
        const size_t row = static_cast<size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double depth_m = map.base_thickness_m - map.values_m[row + ix];
            if (depth_m < 0.0)
                throw DomainError("negative milling depth at pixel (" +
                                  std::to_string(ix) + ", " +
                                  std::to_string(iy) + ")");
            if (depth_m == 0.0) continue;
            const double dwell_us =
                depth_m * 1e9 * dwell_per_nm_us / repetitions;
            out << ix << " " << iy << " " << dwell_us << "\n";
        }
    }
    write_text_atomic(path, out.str());
}

void write_order_spectrum_csv(const OrderSpectrum& spectrum,
                              const std::string& path) {
    std::ostringstream out;
    out << "order,center_k[rad/m],fraction[1]\n";
    for (const OrderEntry& e : spectrum.orders)
        out << e.m << "," << format_double(e.center_k_per_m) << ","
            << format_double(e.intensity_fraction) << "\n";
    write_text_atomic(path, out.str());
}

void write_efficiency_csv(const std::vector<std::pair<double, double>>& points,
                          const std::string& path) {
    std::ostringstream out;
    out << "t0[m],efficiency[1]\n";
    for (const auto& [t0, eta] : points)
        out << format_double(t0) << "," << format_double(eta) << "\n";
    write_text_atomic(path, out.str());
}

void write_onaxis_csv(const std::vector<double>& z_m,
                      const std::vector<double>& intensity,
                      const std::string& path) {
    if (z_m.size() != intensity.size())
        throw DomainError("z and intensity lists differ in length");
    std::ostringstream out;
    out << "z[m],intensity[1/m^2]\n";
    for (size_t i = 0; i < z_m.size(); ++i)
        out << format_double(z_m[i]) << "," << format_double(intensity[i])
            << "\n";
    write_text_atomic(path, out.str());
}

void write_focal_scan_csv(const FocalScanResult& result,
                          const std::string& path) {
    std::ostringstream out;
    out << "z[m]";
    for (int m : result.orders) out << ",rms_radius_m" << m << "[m]";
    out << "\n";
    for (size_t j = 0; j < result.z_m.size(); ++j) {
        out << format_double(result.z_m[j]);
        for (size_t i = 0; i < result.orders.size(); ++i)
            out << "," << format_double(result.rms_radius_m[i][j]);
        out << "\n";
    }
    write_text_atomic(path, out.str());
}

void write_vortex_csv(const VortexMap& map, const std::string& path) {
    std::ostringstream out;
    out << "x[px],y[px],charge[1]\n";
    for (const Vortex& v : map.vortices)
        out << format_double(v.x_px) << "," << format_double(v.y_px) << ","
            << v.charge << "\n";
    write_text_atomic(path, out.str());
}

void write_transfer_csv(const TransferCurve& curve, const std::string& path) {
    std::ostringstream out;
    out << "k[cycles/m],H[1]\n";
    for (const TransferSample& s : curve.samples)
        out << format_double(s.k_per_m) << "," << format_double(s.h) << "\n";
    write_text_atomic(path, out.str());
}

void export_curve_plot(const std::vector<TransferCurve>& curves, int width,
                       int height, const std::string& path) {
    if (width < 16 || height < 16) throw DomainError("plot size too small");
    double kmax = 0.0, hmax = 0.0;
    for (const TransferCurve& c : curves)
        for (const TransferSample& s : c.samples) {
            kmax = std::max(kmax, s.k_per_m);
            hmax = std::max(hmax, s.h);
        }
    if (kmax <= 0.0 || hmax <= 0.0)
        throw DomainError("nothing to plot");

    std::vector<unsigned char> pixels(
        static_cast<size_t>(width) * height, 255);
    auto draw = [&](int x, int y, unsigned char level) {
        if (x < 0 || x >= width || y < 0 || y >= height) return;
        pixels[static_cast<size_t>(y) * width + x] =
            std::min(pixels[static_cast<size_t>(y) * width + x], level);
    };
    for (size_t c = 0; c < curves.size(); ++c) {
        const unsigned char level =
            static_cast<unsigned char>((c * 80) % 240);
        int px = -1, py = -1;
        for (const TransferSample& s : curves[c].samples) {
            const int x =
                static_cast<int>(std::lround(s.k_per_m / kmax * (width - 1)));
            const int y = height - 1 -
                          static_cast<int>(std::lround(
                              std::clamp(s.h / hmax, 0.0, 1.0) * (height - 1)));
            if (px >= 0) {
                const int steps = std::max(std::abs(x - px), std::abs(y - py));
                for (int t = 0; t <= steps; ++t) {
                    const double f = steps > 0 ? double(t) / steps : 0.0;
                    draw(px + static_cast<int>(std::lround(f * (x - px))),
                         py + static_cast<int>(std::lround(f * (y - py))),
                         level);
                }
            } else {
                draw(x, y, level);
            }
            px = x;
            py = y;
        }
    }
    std::string bytes = "P5\n" + std::to_string(width) + " " +
                        std::to_string(height) + "\n255\n";
    bytes.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    write_binary_atomic(path, bytes);
}

void write_text_atomic(const std::string& path, const std::string& text) {
    write_binary_atomic(path, text);
}

}  // namespace ebessel
