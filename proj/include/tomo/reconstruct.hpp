#pragma once

#include "tomo/core.hpp"
#include "tomo/filters.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

struct ReconConventions {
    // Force the zero-frequency filter component to zero during filtering.
    // This mirrors the DC convention of Fourier-domain packages and is the
    // default for FourierGrid only.
    bool zero_dc = false;
    // Oversampling factor of the Cartesian Fourier grid (FourierGrid only).
    int grid_pad = 2;

    static ReconConventions defaults(KernelKind kind) {
        ReconConventions c;
        c.zero_dc = (kind == KernelKind::FourierGrid);
        return c;
    }
};

/**
 * A black-box reconstruction implementation: filtered sinogram in, image
 * out, no internal ramp. Real-space kinds delegate to backproject(); the
 * FourierGrid kind re-grids the per-row spectra onto a Cartesian Fourier
 * grid (bilinear splat, no density weights -- the |w| factor is supplied by
 * the external filter), inverse-transforms and crops. All kinds zero pixels
 * outside the scanned field of view (farther from the axis than the
 * detector half-width).
 *
 * Stateless after construction; reconstruct() is a deterministic pure
 * function and instances may be shared across threads.
 */
class Reconstructor {
public:
    Reconstructor(KernelKind kind, Geometry geometry,
                  ReconConventions conventions);
    Reconstructor(KernelKind kind, Geometry geometry)
        : Reconstructor(kind, std::move(geometry),
                        ReconConventions::defaults(kind)) {}

    KernelKind kind() const { return kind_; }
    const Geometry& geometry() const { return geometry_; }
    const ReconConventions& conventions() const { return conventions_; }

    ImageGrid reconstruct(const Sinogram& q_filtered) const;

private:
    ImageGrid grid_reconstruct(const Sinogram& q, double gain) const;
    void apply_fov_mask(ImageGrid& img) const;

    KernelKind kind_;
    Geometry geometry_;
    ReconConventions conventions_;
    double fourier_gain_ = 1.0; // calibrated so a ramp-filtered disc has unit gain
};

// r = reconstruct(apply_filter(p, h)), with the implementation's DC
// convention applied to h.
ImageGrid fbp(const Reconstructor& rec, const Sinogram& p, const FilterSpec& h);

// Simultaneous iterative reconstruction:
//   x_{k+1} = x_k + C W^T R (p - W x_k),
// W the strip forward projector, R/C the inverse row/column sums (zero sums
// get zero weight). x_0 = 0.
ImageGrid sirt(const Sinogram& p, const Geometry& g, int iterations);

} // namespace tomo
