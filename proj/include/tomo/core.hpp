#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "tomo/errors.hpp"

namespace tomo {

/**
 * Parallel-beam acquisition description shared by every operator.
 *
 * Conventions, fixed once for all kernels:
 *  - detector pixel k has its center at t_k = (k - (n_det-1)/2) * det_spacing,
 *    i.e. the detector is centered on the rotation axis;
 *  - image pixel (i,j) has its center at x = (j - (n-1)/2) * det_spacing,
 *    y = ((n-1)/2 - i) * det_spacing (row 0 is the top of the image);
 *  - image pixel size equals det_spacing.
 *
 * Immutable after construction; safe to share across threads.
 */
class Geometry {
public:
    Geometry(std::vector<double> angles, int n_det, int vol_size,
             double det_spacing = 1.0);

    int n_angles() const { return static_cast<int>(angles_.size()); }
    int n_det() const { return n_det_; }
    int vol_size() const { return vol_size_; }
    double det_spacing() const { return det_spacing_; }
    const std::vector<double>& angles() const { return angles_; }

    // Center of detector pixel k.
    double det_center(int k) const {
        return (k - 0.5 * (n_det_ - 1)) * det_spacing_;
    }

    bool operator==(const Geometry&) const = default;

private:
    std::vector<double> angles_;
    int n_det_;
    int vol_size_;
    double det_spacing_;
};

// Uniform angle set theta_i = i*pi/n_angles, i = 0..n_angles-1.
Geometry make_geometry(int n_angles, int n_det, int vol_size);

/// Projection data, one row per angle, n_angles x n_det row-major.
struct Sinogram {
    explicit Sinogram(Geometry g);
    Sinogram(Geometry g, std::vector<double> values);

    Geometry geom;
    std::vector<double> values;

    double& at(int a, int k) { return values[static_cast<size_t>(a) * geom.n_det() + k]; }
    double at(int a, int k) const { return values[static_cast<size_t>(a) * geom.n_det() + k]; }
    const double* row(int a) const { return values.data() + static_cast<size_t>(a) * geom.n_det(); }
    double* row(int a) { return values.data() + static_cast<size_t>(a) * geom.n_det(); }
};

/// Square reconstruction raster, n x n row-major.
struct ImageGrid {
    explicit ImageGrid(int n);
    ImageGrid(int n, std::vector<double> values);

    int n;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
};

using Raster = std::variant<ImageGrid, Sinogram>;

// Raster file I/O. `base` is the path without extension; writes/reads
// <base>.f32 (raw little-endian binary32, row-major) plus a <base>.json
// sidecar carrying kind/rows/cols and, for sinograms, the full geometry with
// angles as 17-significant-digit decimal strings. Values pass through
// binary32, so read(write(x)) == x whenever x holds binary32-representable
// values (in particular anything previously read from disk).
void write_raster(const std::filesystem::path& base, const ImageGrid& img);
void write_raster(const std::filesystem::path& base, const Sinogram& sino);
Raster read_raster(const std::filesystem::path& base);

// Convenience accessors that throw format_error on kind mismatch.
ImageGrid read_image(const std::filesystem::path& base);
Sinogram read_sinogram(const std::filesystem::path& base);

// 17-significant-digit decimal form; round-trips doubles exactly.
std::string format_double(double v);

} // namespace tomo
