#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tomo/core.hpp"

namespace tomo {

// Foam phantom configuration, in units of the cylinder half-width. Sphere
// radii are drawn uniformly in [r_min, r_max].
struct FoamSpec {
    int n_spheres = 1000;
    double cylinder_radius = 0.95;
    double r_min = 0.005;
    double r_max = 0.08;
    double z_extent = 0.5;
    uint64_t seed = 0;

    void validate() const;
};

struct Sphere {
    double cx, cy, cz, r;
};

// Cylinder of unit density with non-overlapping spherical voids. Every
// sphere lies strictly inside the cylinder and the axial extent.
struct FoamPhantom {
    FoamSpec spec;
    std::vector<Sphere> spheres;
};

struct Circle {
    double cx, cy, r;
};

// Planar cut: unit-density disc minus the circles cut by the slicing plane.
struct Slice2D {
    double disc_radius = 0.0;
    std::vector<Circle> holes;
};

// Seeded rejection sampling; deterministic given spec.seed. Throws
// packing_error after 1e7 failed attempts.
FoamPhantom generate_foam(const FoamSpec& spec);

// |z| must be < z_extent. Spheres tangent to the plane produce no hole.
Slice2D slice_phantom(const FoamPhantom& foam, double z);

// Analytic line integrals: each detector value is the mean over
// `supersampling` sub-rays placed at offsets (j+0.5)/n - 0.5 within the
// pixel; each sub-ray integral is the disc chord minus the hole chords.
// The slice's unit half-width maps onto half the reconstruction grid.
Sinogram analytic_sinogram(const Slice2D& slice, const Geometry& g,
                           int supersampling);

// Ground-truth raster: per-pixel area fraction of material, estimated by
// subpixel x subpixel midpoint sampling over [-1,1]^2.
ImageGrid rasterize_slice(const Slice2D& slice, int n, int subpixel);

// All zeros except a unit center pixel; n must be odd.
ImageGrid single_pixel_phantom(int n);

// Beer-Lambert Poisson noise: counts k ~ Poisson(flux * exp(-p)), clamped to
// >= 1, output -ln(k/flux). Per-pixel RNG streams keyed by (seed, row, col);
// results do not depend on evaluation order.
Sinogram add_poisson_noise(const Sinogram& p, double flux, uint64_t seed);

// Sets floor(fraction * n_pixels) distinct, uniformly chosen pixels to
// amplitude_factor * max(p).
Sinogram add_zingers(const Sinogram& p, double fraction, double amplitude_factor,
                     uint64_t seed);

void write_phantom(const std::filesystem::path& path, const FoamPhantom& foam);
FoamPhantom read_phantom(const std::filesystem::path& path);

} // namespace tomo
