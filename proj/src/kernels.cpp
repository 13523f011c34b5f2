#include "tomo/kernels.hpp"

#include <vector>

namespace tomo {

using kernels::AngleTrig;

KernelKind kernel_from_name(std::string_view name) {
    if (name == "strip") return KernelKind::Strip;
    if (name == "line") return KernelKind::Line;
    if (name == "joseph") return KernelKind::Joseph;
    if (name == "pixel") return KernelKind::PixelDriven;
    if (name == "fouriergrid") return KernelKind::FourierGrid;
    throw std::invalid_argument("unknown kernel name: " + std::string(name));
}

std::string kernel_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::Strip: return "strip";
    case KernelKind::Line: return "line";
    case KernelKind::Joseph: return "joseph";
    case KernelKind::PixelDriven: return "pixel";
    case KernelKind::FourierGrid: return "fouriergrid";
    }
    return "?";
}

namespace {

std::vector<AngleTrig> make_trig(const Geometry& g) {
    std::vector<AngleTrig> trig;
    trig.reserve(static_cast<size_t>(g.n_angles()));
    for (double a : g.angles())
        trig.emplace_back(a);
    return trig;
}

// One detector bin of the strip forward projection: gather over the image
// rows (or columns, whichever axis the rays cross more steeply) that the
// widened strip intersects. Works in det_spacing units.
double strip_forward_bin(const ImageGrid& x, const AngleTrig& t, double tk,
                         double mid) {
    const int n = x.n;
    const double halfw = t.hi + 0.5;
    double acc = 0.0;
    if (std::fabs(t.c) >= std::fabs(t.s)) {
        const double inv_c = 1.0 / t.c;
        for (int i = 0; i < n; ++i) {
            const double y = mid - i;
            const double base = tk - y * t.s; // want x*c in [base-halfw, base+halfw]
            double j0f = (base - halfw) * inv_c + mid;
            double j1f = (base + halfw) * inv_c + mid;
            if (j0f > j1f) std::swap(j0f, j1f);
            const int j0 = std::max(0, static_cast<int>(std::ceil(j0f)));
            const int j1 = std::min(n - 1, static_cast<int>(std::floor(j1f)));
            const double* row = &x.values[static_cast<size_t>(i) * n];
            for (int j = j0; j <= j1; ++j) {
                const double d = (j - mid) * t.c + y * t.s - tk;
                acc += kernels::strip_weight(t, d) * row[j];
            }
        }
    } else {
        const double inv_s = 1.0 / t.s;
        for (int j = 0; j < n; ++j) {
            const double xc = j - mid;
            const double base = tk - xc * t.c;
            double i0f = mid - (base + halfw) * inv_s;
            double i1f = mid - (base - halfw) * inv_s;
            if (i0f > i1f) std::swap(i0f, i1f);
            const int i0 = std::max(0, static_cast<int>(std::ceil(i0f)));
            const int i1 = std::min(n - 1, static_cast<int>(std::floor(i1f)));
            for (int i = i0; i <= i1; ++i) {
                const double d = xc * t.c + (mid - i) * t.s - tk;
                acc += kernels::strip_weight(t, d) * x.values[static_cast<size_t>(i) * n + j];
            }
        }
    }
    return acc;
}

void backproject_pixel_driven(const Sinogram& q, const std::vector<AngleTrig>& trig,
                              ImageGrid& out, double scale) {
    const Geometry& g = q.geom;
    const int n = out.n;
    const int nd = g.n_det();
    const int na = g.n_angles();
    const double mid = 0.5 * (n - 1);
    const double t0 = -0.5 * (nd - 1);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double y = mid - i;
        for (int j = 0; j < n; ++j) {
            const double xc = j - mid;
            double acc = 0.0;
            for (int a = 0; a < na; ++a) {
                const double u = xc * trig[a].c + y * trig[a].s - t0;
                const double fk = std::floor(u);
                const int k = static_cast<int>(fk);
                const double frac = u - fk;
                double v = 0.0;
                if (k >= 0 && k < nd)
                    v += (1.0 - frac) * q.at(a, k);
                if (k + 1 >= 0 && k + 1 < nd)
                    v += frac * q.at(a, k + 1);
                acc += v;
            }
            out.at(i, j) = acc * scale;
        }
    }
}

// Shared real-space backprojection core: per-pixel gather, deterministic
// accumulation order (angles ascending, bins ascending).
void backproject_weighted(KernelKind kind, const Sinogram& q,
                          const std::vector<AngleTrig>& trig, ImageGrid& out,
                          double scale) {
    const Geometry& g = q.geom;
    const int n = out.n;
    const int nd = g.n_det();
    const int na = g.n_angles();
    const double mid = 0.5 * (n - 1);
    const double t0 = -0.5 * (nd - 1);
    const double spacing = g.det_spacing();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double y = mid - i;
        for (int j = 0; j < n; ++j) {
            const double xc = j - mid;
            double acc = 0.0;
            for (int a = 0; a < na; ++a) {
                const AngleTrig& t = trig[a];
                const double s0 = xc * t.c + y * t.s;
                const double halfw = kernels::support(kind, t);
                const int k0 = std::max(0, static_cast<int>(std::ceil(s0 - halfw - t0)));
                const int k1 = std::min(nd - 1, static_cast<int>(std::floor(s0 + halfw - t0)));
                const double* row = q.row(a);
                for (int k = k0; k <= k1; ++k)
                    acc += kernels::weight(kind, t, t0 + k - s0) * row[k];
            }
            out.at(i, j) = acc * scale * spacing;
        }
    }
}

} // namespace

Sinogram forward_project(const ImageGrid& x, const Geometry& g) {
    if (x.n != g.vol_size())
        throw std::invalid_argument("forward_project: image size does not match geometry");
    const auto trig = make_trig(g);
    const int na = g.n_angles();
    const int nd = g.n_det();
    const double mid = 0.5 * (x.n - 1);
    const double t0 = -0.5 * (nd - 1);
    Sinogram out(g);
#pragma omp parallel for schedule(static) collapse(2)
    for (int a = 0; a < na; ++a) {
        for (int k = 0; k < nd; ++k) {
            out.at(a, k) =
                strip_forward_bin(x, trig[a], t0 + k, mid) * g.det_spacing();
        }
    }
    return out;
}

ImageGrid backproject(KernelKind kind, const Sinogram& q) {
    if (kind == KernelKind::FourierGrid)
        throw std::invalid_argument("backproject: FourierGrid is not a real-space kernel");
    const Geometry& g = q.geom;
    const auto trig = make_trig(g);
    ImageGrid out(g.vol_size());
    const double scale = 3.14159265358979323846 / g.n_angles();
    if (kind == KernelKind::PixelDriven)
        backproject_pixel_driven(q, trig, out, scale);
    else
        backproject_weighted(kind, q, trig, out, scale);
    return out;
}

ImageGrid strip_adjoint(const Sinogram& q) {
    const auto trig = make_trig(q.geom);
    ImageGrid out(q.geom.vol_size());
    backproject_weighted(KernelKind::Strip, q, trig, out, 1.0);
    return out;
}

} // namespace tomo
