#include "tomo/core.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace tomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_positive(int v, const char* name) {
    if (v < 1)
        throw std::invalid_argument(std::string(name) + " must be >= 1, got " +
                                    std::to_string(v));
}

} // namespace

Geometry::Geometry(std::vector<double> angles, int n_det, int vol_size,
                   double det_spacing)
    : angles_(std::move(angles)),
      n_det_(n_det),
      vol_size_(vol_size),
      det_spacing_(det_spacing) {
    check_positive(n_det_, "n_det");
    check_positive(vol_size_, "vol_size");
    if (angles_.empty())
        throw std::invalid_argument("geometry needs at least one angle");
    if (n_det_ < vol_size_)
        throw std::invalid_argument("n_det must be >= vol_size");
    if (!(det_spacing_ > 0.0) || !std::isfinite(det_spacing_))
        throw std::invalid_argument("det_spacing must be positive and finite");
    double prev = -1.0;
    for (double a : angles_) {
        if (!std::isfinite(a) || a < 0.0 || a >= kPi)
            throw std::invalid_argument("angles must lie in [0, pi)");
        if (a <= prev)
            throw std::invalid_argument("angles must be strictly increasing");
        prev = a;
    }
}

Geometry make_geometry(int n_angles, int n_det, int vol_size) {
    check_positive(n_angles, "n_angles");
    std::vector<double> angles(static_cast<size_t>(n_angles));
    for (int i = 0; i < n_angles; ++i)
        angles[static_cast<size_t>(i)] = i * kPi / n_angles;
    return Geometry(std::move(angles), n_det, vol_size);
}

Sinogram::Sinogram(Geometry g)
    : geom(std::move(g)),
      values(static_cast<size_t>(geom.n_angles()) * geom.n_det(), 0.0) {}

Sinogram::Sinogram(Geometry g, std::vector<double> vals)
    : geom(std::move(g)), values(std::move(vals)) {
    if (values.size() != static_cast<size_t>(geom.n_angles()) * geom.n_det())
        throw std::invalid_argument("sinogram values do not match geometry shape");
}

ImageGrid::ImageGrid(int n_) : n(n_), values(static_cast<size_t>(n_) * n_, 0.0) {
    check_positive(n, "n");
}

ImageGrid::ImageGrid(int n_, std::vector<double> vals)
    : n(n_), values(std::move(vals)) {
    check_positive(n, "n");
    if (values.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("image values do not match n*n");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_f32_payload(const fs::path& path, const std::vector<double>& values) {
    std::vector<unsigned char> bytes;
    bytes.reserve(values.size() * 4);
    for (double v : values) {
        const auto u = std::bit_cast<uint32_t>(static_cast<float>(v));
        bytes.push_back(static_cast<unsigned char>(u & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 8) & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 16) & 0xff));
        bytes.push_back(static_cast<unsigned char>((u >> 24) & 0xff));
    }
    // temp-then-rename so partially written files are never observed
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open for writing: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw io_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<double> read_f32_payload(const fs::path& path, size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open for reading: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() != expected * 4)
        throw format_error(path.string() + ": sidecar shape implies " +
                           std::to_string(expected * 4) + " bytes, file has " +
                           std::to_string(bytes.size()));
    std::vector<double> values(expected);
    for (size_t i = 0; i < expected; ++i) {
        uint32_t u = static_cast<uint32_t>(bytes[4 * i]) |
                     (static_cast<uint32_t>(bytes[4 * i + 1]) << 8) |
                     (static_cast<uint32_t>(bytes[4 * i + 2]) << 16) |
                     (static_cast<uint32_t>(bytes[4 * i + 3]) << 24);
        const float f = std::bit_cast<float>(u);
        if (std::isnan(f))
            throw format_error(path.string() + ": NaN at element " + std::to_string(i));
        values[i] = static_cast<double>(f);
    }
    return values;
}

void write_sidecar(const fs::path& path, const json& j) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw io_error("cannot open for writing: " + tmp.string());
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

json read_sidecar(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open for reading: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw format_error(path.string() + ": " + e.what());
    }
    return j;
}

double parse_double_field(const json& j, const fs::path& origin) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw format_error(origin.string() + ": bad decimal string '" + s + "'");
        return v;
    }
    if (j.is_number())
        return j.get<double>();
    throw format_error(origin.string() + ": expected a number or decimal string");
}

} // namespace

void write_raster(const std::filesystem::path& base, const ImageGrid& img) {
    json side;
    side["kind"] = "image";
    side["rows"] = img.n;
    side["cols"] = img.n;
    write_f32_payload(fs::path(base) += ".f32", img.values);
    write_sidecar(fs::path(base) += ".json", side);
}

void write_raster(const std::filesystem::path& base, const Sinogram& sino) {
    json side;
    side["kind"] = "sinogram";
    side["rows"] = sino.geom.n_angles();
    side["cols"] = sino.geom.n_det();
    side["vol_size"] = sino.geom.vol_size();
    side["det_spacing"] = format_double(sino.geom.det_spacing());
    json angles = json::array();
    for (double a : sino.geom.angles())
        angles.push_back(format_double(a));
    side["angles"] = std::move(angles);
    write_f32_payload(fs::path(base) += ".f32", sino.values);
    write_sidecar(fs::path(base) += ".json", side);
}

Raster read_raster(const std::filesystem::path& base) {
    const fs::path data_path = fs::path(base) += ".f32";
    const fs::path side_path = fs::path(base) += ".json";
    const json side = read_sidecar(side_path);
    try {
        const std::string kind = side.at("kind").get<std::string>();
        const int rows = side.at("rows").get<int>();
        const int cols = side.at("cols").get<int>();
        if (rows < 1 || cols < 1)
            throw format_error(side_path.string() + ": non-positive shape");
        auto values =
            read_f32_payload(data_path, static_cast<size_t>(rows) * cols);
        if (kind == "image") {
            if (rows != cols)
                throw format_error(side_path.string() + ": image must be square");
            return ImageGrid(rows, std::move(values));
        }
        if (kind == "sinogram") {
            const auto& ang = side.at("angles");
            if (!ang.is_array() || static_cast<int>(ang.size()) != rows)
                throw format_error(side_path.string() +
                                   ": angles must match row count");
            std::vector<double> angles;
            angles.reserve(ang.size());
            for (const auto& a : ang)
                angles.push_back(parse_double_field(a, side_path));
            const int vol = side.value("vol_size", cols);
            const double spacing =
                side.contains("det_spacing")
                    ? parse_double_field(side.at("det_spacing"), side_path)
                    : 1.0;
            Geometry g(std::move(angles), cols, vol, spacing);
            return Sinogram(std::move(g), std::move(values));
        }
        throw format_error(side_path.string() + ": unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw format_error(side_path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw format_error(side_path.string() + ": " + e.what());
    }
}

ImageGrid read_image(const std::filesystem::path& base) {
    Raster r = read_raster(base);
    if (auto* img = std::get_if<ImageGrid>(&r))
        return std::move(*img);
    throw format_error(base.string() + ": expected an image raster");
}

Sinogram read_sinogram(const std::filesystem::path& base) {
    Raster r = read_raster(base);
    if (auto* sino = std::get_if<Sinogram>(&r))
        return std::move(*sino);
    throw format_error(base.string() + ": expected a sinogram raster");
}

} // namespace tomo
