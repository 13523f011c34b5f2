#include "tomo/kernels.hpp"

#include <vector>

// Plain serial versions with independently structured loops. The forward
// projector scatters each pixel into the bins it overlaps instead of
// gathering per bin; backprojection walks the full detector row per pixel
// with no window precomputation. These exist as a reference for the
// OpenMP kernels and as the baseline in the kernel benchmark.

namespace tomo {

using kernels::AngleTrig;

Sinogram forward_project_serial(const ImageGrid& x, const Geometry& g) {
    if (x.n != g.vol_size())
        throw std::invalid_argument("forward_project: image size does not match geometry");
    const int n = x.n;
    const int nd = g.n_det();
    const double mid = 0.5 * (n - 1);
    const double t0 = -0.5 * (nd - 1);
    Sinogram out(g);
    for (int a = 0; a < g.n_angles(); ++a) {
        const AngleTrig t(g.angles()[static_cast<size_t>(a)]);
        for (int i = 0; i < n; ++i) {
            const double y = mid - i;
            for (int j = 0; j < n; ++j) {
                const double v = x.at(i, j);
                if (v == 0.0)
                    continue;
                const double s0 = (j - mid) * t.c + y * t.s;
                for (int k = 0; k < nd; ++k) {
                    const double d = t0 + k - s0;
                    if (std::fabs(d) >= t.hi + 0.5)
                        continue;
                    out.at(a, k) += kernels::strip_weight(t, d) * v;
                }
            }
        }
    }
    for (double& v : out.values)
        v *= g.det_spacing();
    return out;
}

ImageGrid backproject_serial(KernelKind kind, const Sinogram& q) {
    if (kind == KernelKind::FourierGrid)
        throw std::invalid_argument("backproject: FourierGrid is not a real-space kernel");
    const Geometry& g = q.geom;
    const int n = g.vol_size();
    const int nd = g.n_det();
    const double mid = 0.5 * (n - 1);
    const double t0 = -0.5 * (nd - 1);
    const double scale = 3.14159265358979323846 / g.n_angles();
    ImageGrid out(n);
    for (int a = 0; a < g.n_angles(); ++a) {
        const AngleTrig t(g.angles()[static_cast<size_t>(a)]);
        for (int i = 0; i < n; ++i) {
            const double y = mid - i;
            for (int j = 0; j < n; ++j) {
                const double s0 = (j - mid) * t.c + y * t.s;
                double acc = 0.0;
                if (kind == KernelKind::PixelDriven) {
                    const double u = s0 - t0;
                    const int k = static_cast<int>(std::floor(u));
                    const double frac = u - std::floor(u);
                    if (k >= 0 && k < nd)
                        acc += (1.0 - frac) * q.at(a, k);
                    if (k + 1 >= 0 && k + 1 < nd)
                        acc += frac * q.at(a, k + 1);
                    out.at(i, j) += acc * scale;
                } else {
                    for (int k = 0; k < nd; ++k)
                        acc += kernels::weight(kind, t, t0 + k - s0) * q.at(a, k);
                    out.at(i, j) += acc * scale * g.det_spacing();
                }
            }
        }
    }
    return out;
}

} // namespace tomo
