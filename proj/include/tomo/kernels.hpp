#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "tomo/core.hpp"

namespace tomo {

/// The five reconstruction implementations. Each real-space kind maps to one
/// backprojection routine; FourierGrid is handled by the Reconstructor.
enum class KernelKind { Strip, Line, Joseph, PixelDriven, FourierGrid };

KernelKind kernel_from_name(std::string_view name);
std::string kernel_name(KernelKind kind);

namespace kernels {

// Per-angle constants for the ray/pixel weight functions. All kernel math is
// done in units of det_spacing, where pixels are unit squares and detector
// bins have unit pitch; callers scale lengths back by det_spacing.
struct AngleTrig {
    double c, s;     // cos, sin (signed)
    double hi, lo;   // (|c|+|s|)/2, ||c|-|s||/2: projection half-widths
    double inv_g;    // 1/(|c||s|), 0 when degenerate
    double cmaj;     // max(|c|,|s|)
    double inv_cmaj;

    explicit AngleTrig(double theta) {
        c = std::cos(theta);
        s = std::sin(theta);
        const double ac = std::fabs(c), as = std::fabs(s);
        hi = 0.5 * (ac + as);
        lo = 0.5 * std::fabs(ac - as);
        cmaj = std::max(ac, as);
        inv_cmaj = 1.0 / cmaj;
        const double g = ac * as;
        inv_g = g > 1e-9 ? 1.0 / g : 0.0;
    }

    bool axis_aligned() const { return inv_g == 0.0; }
};

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

// Area of the unit square (centered at the origin) on the side
// {x*c + y*s <= d} of a line with normal (c,s). Piecewise quadratic in d;
// written with clamps so the hot loops stay branch-free.
inline double slab_cdf(const AngleTrig& t, double d) {
    if (t.axis_aligned())
        return std::clamp(0.5 + d * t.inv_cmaj, 0.0, 1.0);
    const double ph = pos(d + t.hi), mh = pos(d - t.hi);
    const double pl = pos(d + t.lo), ml = pos(d - t.lo);
    const double p0 = pos(d);
    const double th = 0.5 * (ph * ph - 2.0 * p0 * p0 + mh * mh);
    const double tl = 0.5 * (pl * pl - 2.0 * p0 * p0 + ml * ml);
    return (th - tl) * t.inv_g;
}

// Strip kernel: area of (unit pixel) ∩ (unit-width strip centered at offset d
// from the pixel's projected center), which is also the transpose weight.
inline double strip_weight(const AngleTrig& t, double d) {
    return slab_cdf(t, d + 0.5) - slab_cdf(t, d - 0.5);
}

// Line kernel: length of the intersection of the pixel with the zero-width
// ray at offset d.
inline double line_weight(const AngleTrig& t, double d) {
    const double ad = std::fabs(d);
    if (t.axis_aligned())
        return ad < 0.5 ? 1.0 : 0.0;
    return (pos(t.hi - ad) - pos(t.lo - ad)) * t.inv_g;
}

// Joseph kernel transpose: linear interpolation along the major axis gives a
// triangular footprint of half-width cmaj and path weight 1/cmaj.
inline double joseph_weight(const AngleTrig& t, double d) {
    return pos(t.cmaj - std::fabs(d)) * t.inv_cmaj * t.inv_cmaj;
}

// support half-width of the footprint on the detector axis
inline double support(KernelKind kind, const AngleTrig& t) {
    switch (kind) {
    case KernelKind::Strip: return t.hi + 0.5;
    case KernelKind::Line: return t.hi;
    case KernelKind::Joseph: return t.cmaj;
    default: return 0.0;
    }
}

inline double weight(KernelKind kind, const AngleTrig& t, double d) {
    switch (kind) {
    case KernelKind::Strip: return strip_weight(t, d);
    case KernelKind::Line: return line_weight(t, d);
    case KernelKind::Joseph: return joseph_weight(t, d);
    default: return 0.0;
    }
}

} // namespace kernels

// Fixed forward projector: exact area-weighted strip integrals (detector
// value = sum over pixels of overlap area times pixel value / det_spacing).
// Linear in x. OpenMP-parallel over detector bins; accumulation order per bin
// is fixed, so results are bit-identical for any thread count.
Sinogram forward_project(const ImageGrid& x, const Geometry& g);

// Backprojection r = scale * sum_angles of kernel-weighted sinogram samples,
// with scale = pi/n_angles (angular quadrature weight). FourierGrid is not a
// real-space kernel and is rejected here.
ImageGrid backproject(KernelKind kind, const Sinogram& q);

// Unweighted adjoints used by iterative methods (no pi/n_angles factor).
ImageGrid strip_adjoint(const Sinogram& q);

// Serial reference implementations with independently structured loops
// (scatter-form forward, plain pixel loops); kept for testing and for the
// kernel benchmark. Agree with the parallel versions to roundoff.
Sinogram forward_project_serial(const ImageGrid& x, const Geometry& g);
ImageGrid backproject_serial(KernelKind kind, const Sinogram& q);

} // namespace tomo
