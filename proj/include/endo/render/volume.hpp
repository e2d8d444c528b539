#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "endo/core/error.hpp"

namespace endo {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n <= 0) throw ParamError("cannot normalize zero vector");
        return *this / n;
    }
};

/// Scalar volume on a regular grid. Values are stored as int16 in
/// Hounsfield-like units; world coordinates are millimeters with voxel
/// (0,0,0) centered at `origin`. Sampling outside the bounding box reads
/// the background scalar (air by default).
class CtVolume {
public:
    static constexpr std::int16_t kDefaultBackground = -1024;

    CtVolume() = default;
    CtVolume(std::array<int, 3> dims, std::array<double, 3> spacing,
             Vec3 origin = {}, std::int16_t fill = kDefaultBackground)
        : dims_(dims), spacing_(spacing), origin_(origin),
          values_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill) {
        if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2)
            throw ParamError("volume dims must all be >= 2");
        if (spacing[0] <= 0 || spacing[1] <= 0 || spacing[2] <= 0)
            throw ParamError("volume spacing must be positive");
    }

    const std::array<int, 3>& dims() const { return dims_; }
    const std::array<double, 3>& spacing() const { return spacing_; }
    const Vec3& origin() const { return origin_; }
    std::int16_t background() const { return background_; }
    void set_background(std::int16_t b) { background_ = b; }

    std::int16_t& at(int x, int y, int z) {
        return values_[index(x, y, z)];
    }
    std::int16_t at(int x, int y, int z) const {
        return values_[index(x, y, z)];
    }
    const std::vector<std::int16_t>& values() const { return values_; }
    std::vector<std::int16_t>& values() { return values_; }

    /// World-space bounding box spanning the outer voxel faces.
    Vec3 box_min() const {
        return origin_ - Vec3{spacing_[0] * 0.5, spacing_[1] * 0.5, spacing_[2] * 0.5};
    }
    Vec3 box_max() const {
        return Vec3{origin_.x + spacing_[0] * (dims_[0] - 0.5),
                    origin_.y + spacing_[1] * (dims_[1] - 0.5),
                    origin_.z + spacing_[2] * (dims_[2] - 0.5)};
    }
    Vec3 center() const { return (box_min() + box_max()) * 0.5; }

    bool contains(const Vec3& p) const {
        Vec3 lo = box_min(), hi = box_max();
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }

    /// Trilinear sample at a world-space point. Outside the box the
    /// background scalar is returned; voxels referenced past the grid edge
    /// during interpolation also read as background.
    double sample(const Vec3& p) const {
        if (!contains(p)) return background_;
        double gx = (p.x - origin_.x) / spacing_[0];
        double gy = (p.y - origin_.y) / spacing_[1];
        double gz = (p.z - origin_.z) / spacing_[2];
        int x0 = static_cast<int>(std::floor(gx));
        int y0 = static_cast<int>(std::floor(gy));
        int z0 = static_cast<int>(std::floor(gz));
        double fx = gx - x0, fy = gy - y0, fz = gz - z0;

        auto fetch = [&](int x, int y, int z) -> double {
            if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] ||
                z >= dims_[2])
                return background_;
            return values_[index(x, y, z)];
        };
        double c00 = fetch(x0, y0, z0) * (1 - fx) + fetch(x0 + 1, y0, z0) * fx;
        double c10 = fetch(x0, y0 + 1, z0) * (1 - fx) + fetch(x0 + 1, y0 + 1, z0) * fx;
        double c01 = fetch(x0, y0, z0 + 1) * (1 - fx) + fetch(x0 + 1, y0, z0 + 1) * fx;
        double c11 = fetch(x0, y0 + 1, z0 + 1) * (1 - fx) +
                     fetch(x0 + 1, y0 + 1, z0 + 1) * fx;
        double c0 = c00 * (1 - fy) + c10 * fy;
        double c1 = c01 * (1 - fy) + c11 * fy;
        return c0 * (1 - fz) + c1 * fz;
    }

    /// Central-difference gradient of the scalar field in world units.
    Vec3 gradient(const Vec3& p) const {
        Vec3 g;
        g.x = (sample({p.x + spacing_[0], p.y, p.z}) -
               sample({p.x - spacing_[0], p.y, p.z})) / (2 * spacing_[0]);
        g.y = (sample({p.x, p.y + spacing_[1], p.z}) -
               sample({p.x, p.y - spacing_[1], p.z})) / (2 * spacing_[1]);
        g.z = (sample({p.x, p.y, p.z + spacing_[2]}) -
               sample({p.x, p.y, p.z - spacing_[2]})) / (2 * spacing_[2]);
        return g;
    }

private:
    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
    }

    std::array<int, 3> dims_{0, 0, 0};
    std::array<double, 3> spacing_{1, 1, 1};
    Vec3 origin_;
    std::int16_t background_ = kDefaultBackground;
    std::vector<std::int16_t> values_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Volume file format: a text header with `dims`, `spacing`, `origin`,
/// `dtype` and `data` lines next to a little-endian int16 raw file,
/// x-fastest then y then z.
inline void write_volume(const CtVolume& vol, const std::string& header_path) {
    namespace fs = std::filesystem;
    fs::path hp(header_path);
    std::string raw_name = hp.stem().string() + ".raw";

    std::ofstream hdr(header_path, std::ios::binary);
    if (!hdr) throw IoError("cannot write volume header: " + header_path);
    const auto& d = vol.dims();
    const auto& s = vol.spacing();
    hdr << "dims = " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n'
        << "spacing = " << detail::format_double(s[0]) << ' '
        << detail::format_double(s[1]) << ' ' << detail::format_double(s[2]) << '\n'
        << "origin = " << detail::format_double(vol.origin().x) << ' '
        << detail::format_double(vol.origin().y) << ' '
        << detail::format_double(vol.origin().z) << '\n'
        << "dtype = int16\n"
        << "data = " << raw_name << '\n';
    if (!hdr) throw IoError("volume header write failed: " + header_path);
    hdr.close();

    fs::path raw_path = hp.parent_path() / raw_name;
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw IoError("cannot write volume data: " + raw_path.string());
    // int16 little-endian; written bytewise so the format is host-independent.
    std::vector<char> bytes(vol.values().size() * 2);
    for (std::size_t i = 0; i < vol.values().size(); ++i) {
        auto u = static_cast<std::uint16_t>(vol.values()[i]);
        bytes[2 * i] = static_cast<char>(u & 0xff);
        bytes[2 * i + 1] = static_cast<char>(u >> 8);
    }
    raw.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!raw) throw IoError("volume data write failed: " + raw_path.string());
}

inline CtVolume load_volume(const std::string& header_path) {
    namespace fs = std::filesystem;
    std::ifstream hdr(header_path, std::ios::binary);
    if (!hdr) throw IoError("cannot read volume header: " + header_path);

    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{0, 0, 0};
    Vec3 origin;
    std::string dtype, data_name;
    bool have_dims = false, have_spacing = false, have_origin = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(hdr, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("malformed volume header line " +
                              std::to_string(lineno) + ": " + header_path);
        auto trim = [](std::string v) {
            auto b = v.find_first_not_of(" \t");
            auto e = v.find_last_not_of(" \t");
            return b == std::string::npos ? std::string()
                                          : v.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::istringstream vs(val);
        if (key == "dims") {
            if (!(vs >> dims[0] >> dims[1] >> dims[2]))
                throw FormatError("malformed dims line: " + header_path);
            have_dims = true;
        } else if (key == "spacing") {
            if (!(vs >> spacing[0] >> spacing[1] >> spacing[2]))
                throw FormatError("malformed spacing line: " + header_path);
            have_spacing = true;
        } else if (key == "origin") {
            if (!(vs >> origin.x >> origin.y >> origin.z))
                throw FormatError("malformed origin line: " + header_path);
            have_origin = true;
        } else if (key == "dtype") {
            dtype = val;
        } else if (key == "data") {
            data_name = val;
        } else {
            throw FormatError("unknown volume header key '" + key +
                              "': " + header_path);
        }
    }
    if (!have_dims || !have_spacing || !have_origin || dtype.empty() ||
        data_name.empty())
        throw FormatError("incomplete volume header: " + header_path);
    if (dtype != "int16")
        throw FormatError("unsupported element type '" + dtype +
                          "' (only int16): " + header_path);

    CtVolume vol(dims, spacing, origin);
    fs::path raw_path = fs::path(header_path).parent_path() / data_name;
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw IoError("cannot read volume data: " + raw_path.string());
    raw.seekg(0, std::ios::end);
    auto file_size = static_cast<std::size_t>(raw.tellg());
    raw.seekg(0, std::ios::beg);
    std::size_t expected = vol.values().size() * 2;
    if (file_size != expected)
        throw FormatError("volume data size mismatch: expected " +
                          std::to_string(expected) + " bytes, found " +
                          std::to_string(file_size) + ": " + raw_path.string());
    std::vector<char> bytes(expected);
    raw.read(bytes.data(), static_cast<std::streamsize>(expected));
    if (!raw) throw IoError("volume data read failed: " + raw_path.string());
    for (std::size_t i = 0; i < vol.values().size(); ++i) {
        auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
        auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
        vol.values()[i] = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(lo) | (static_cast<std::uint16_t>(hi) << 8));
    }
    return vol;
}

} // namespace endo
