#include "tomo/reconstruct.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "fft.hpp"

namespace tomo {

namespace {

constexpr double kPi = 3.14159265358979323846;

int next_pow2(int n) {
    int p = 1;
    while (p < n)
        p *= 2;
    return p;
}

// binary disc used to calibrate the FourierGrid gain; edge softened by
// 4x4 subpixel sampling
ImageGrid calibration_disc(int n) {
    ImageGrid img(n);
    const double mid = 0.5 * (n - 1);
    const double radius = std::max(1.0, 0.25 * n);
    const int sub = 4;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int inside = 0;
            for (int si = 0; si < sub; ++si) {
                for (int sj = 0; sj < sub; ++sj) {
                    const double y = mid - (i + (si + 0.5) / sub - 0.5);
                    const double x = (j + (sj + 0.5) / sub - 0.5) - mid;
                    if (x * x + y * y <= radius * radius)
                        ++inside;
                }
            }
            img.at(i, j) = static_cast<double>(inside) / (sub * sub);
        }
    }
    return img;
}

} // namespace

Reconstructor::Reconstructor(KernelKind kind, Geometry geometry,
                             ReconConventions conventions)
    : kind_(kind), geometry_(std::move(geometry)), conventions_(conventions) {
    if (conventions_.grid_pad != 1 && conventions_.grid_pad != 2)
        throw std::invalid_argument("grid_pad must be 1 or 2");
    if (kind_ == KernelKind::FourierGrid) {
        // Calibrate the overall gain once per geometry: reconstruct a
        // ramp-filtered disc and normalize its interior mean to 1.
        const ImageGrid disc = calibration_disc(geometry_.vol_size());
        const Sinogram p = forward_project(disc, geometry_);
        const FilterSpec ramp = standard_filter("ram-lak", geometry_.n_det());
        const Sinogram q = apply_filter(p, ramp);
        const ImageGrid raw = grid_reconstruct(q, 1.0);
        const int n = raw.n;
        const double mid = 0.5 * (n - 1);
        const double rin = 0.7 * std::max(1.0, 0.25 * n);
        double sum = 0.0;
        long count = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double y = mid - i, x = j - mid;
                if (x * x + y * y <= rin * rin) {
                    sum += raw.at(i, j);
                    ++count;
                }
            }
        }
        if (count == 0 || !(std::fabs(sum) > 1e-300))
            throw numerical_error("FourierGrid calibration failed");
        fourier_gain_ = count / sum;
    }
}

ImageGrid Reconstructor::grid_reconstruct(const Sinogram& q, double gain) const {
    const Geometry& g = geometry_;
    const int nd = g.n_det();
    const int na = g.n_angles();
    const int n = g.vol_size();
    const int G = conventions_.grid_pad * next_pow2(nd);
    const int half = G / 2;

    // per-row spectra, re-phased so t=0 sits at the detector center
    std::vector<std::complex<double>> spectra(static_cast<size_t>(na) * (half + 1));
    const double t_off = 0.5 * (nd - 1);
#pragma omp parallel
    {
        std::vector<double> buf(static_cast<size_t>(G));
        std::vector<std::complex<double>> spec(static_cast<size_t>(half + 1));
#pragma omp for schedule(static)
        for (int a = 0; a < na; ++a) {
            std::fill(buf.begin(), buf.end(), 0.0);
            const double* src = q.row(a);
            std::copy(src, src + nd, buf.begin());
            fft::rfft(static_cast<size_t>(G), buf.data(), spec.data());
            for (int m = 0; m <= half; ++m) {
                const double phase = 2.0 * kPi * m * t_off / G;
                spectra[static_cast<size_t>(a) * (half + 1) + m] =
                    spec[static_cast<size_t>(m)] *
                    std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
    }

    // bilinear splat of the polar samples onto the Cartesian frequency grid;
    // serial: the splat is a tiny fraction of the work and stays deterministic
    std::vector<std::complex<double>> grid(static_cast<size_t>(G) * G, 0.0);
    auto wrap = [G](int f) { return (f % G + G) % G; };
    for (int a = 0; a < na; ++a) {
        const double c = std::cos(g.angles()[static_cast<size_t>(a)]);
        const double s = std::sin(g.angles()[static_cast<size_t>(a)]);
        const std::complex<double>* row = &spectra[static_cast<size_t>(a) * (half + 1)];
        for (int m = -(half - 1); m <= half - 1; ++m) {
            const std::complex<double> v =
                m >= 0 ? row[m] : std::conj(row[-m]);
            const double fx = m * c;
            const double fy = m * s;
            const double flx = std::floor(fx), fly = std::floor(fy);
            const int ix = static_cast<int>(flx), iy = static_cast<int>(fly);
            const double wx = fx - flx, wy = fy - fly;
            const int x0 = wrap(ix), x1 = wrap(ix + 1);
            const int y0 = wrap(iy), y1 = wrap(iy + 1);
            grid[static_cast<size_t>(y0) * G + x0] += (1.0 - wx) * (1.0 - wy) * v;
            grid[static_cast<size_t>(y0) * G + x1] += wx * (1.0 - wy) * v;
            grid[static_cast<size_t>(y1) * G + x0] += (1.0 - wx) * wy * v;
            grid[static_cast<size_t>(y1) * G + x1] += wx * wy * v;
        }
    }

    // shift to pixel-center coordinates, inverse transform, crop
    const double ox = 0.5 * (n - 1);
    for (int fy = 0; fy < G; ++fy) {
        const int my = fy <= half ? fy : fy - G;
        for (int fx = 0; fx < G; ++fx) {
            const int mx = fx <= half ? fx : fx - G;
            const double phase = 2.0 * kPi * (my - mx) * ox / G;
            grid[static_cast<size_t>(fy) * G + fx] *=
                std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    fft::cfft2_backward(static_cast<size_t>(G), grid.data());

    ImageGrid out(n);
    const double scale = gain / (static_cast<double>(G) * G);
    for (int i = 0; i < n; ++i) {
        const int a = ((G - i) % G + G) % G; // y axis runs against row index
        for (int j = 0; j < n; ++j)
            out.at(i, j) = grid[static_cast<size_t>(a) * G + j % G].real() * scale;
    }
    return out;
}

ImageGrid Reconstructor::reconstruct(const Sinogram& q_filtered) const {
    if (!(q_filtered.geom == geometry_))
        throw std::invalid_argument("reconstruct: sinogram geometry mismatch");
    ImageGrid out = kind_ == KernelKind::FourierGrid
                        ? grid_reconstruct(q_filtered, fourier_gain_)
                        : backproject(kind_, q_filtered);
    apply_fov_mask(out);
    return out;
}

// Pixels farther from the rotation axis than the detector half-width leave
// the detector at some angles and are never fully sampled; reconstructions
// zero them, as common packages do.
void Reconstructor::apply_fov_mask(ImageGrid& img) const {
    const int n = img.n;
    const double mid = 0.5 * (n - 1);
    const double radius = 0.5 * geometry_.n_det();
    const double r2 = radius * radius;
    for (int i = 0; i < n; ++i) {
        const double y = mid - i;
        for (int j = 0; j < n; ++j) {
            const double x = j - mid;
            if (x * x + y * y > r2)
                img.at(i, j) = 0.0;
        }
    }
}

ImageGrid fbp(const Reconstructor& rec, const Sinogram& p, const FilterSpec& h) {
    if (h.n_det() != rec.geometry().n_det())
        throw std::invalid_argument("fbp: filter length does not match geometry");
    if (rec.conventions().zero_dc && !h.zero_dc())
        return rec.reconstruct(apply_filter(p, h.with_zero_dc(true)));
    return rec.reconstruct(apply_filter(p, h));
}

ImageGrid sirt(const Sinogram& p, const Geometry& g, int iterations) {
    if (iterations < 1)
        throw std::invalid_argument("sirt: iterations must be >= 1");
    if (!(p.geom == g))
        throw std::invalid_argument("sirt: sinogram geometry mismatch");

    const ImageGrid ones_img(g.vol_size(),
                             std::vector<double>(static_cast<size_t>(g.vol_size()) * g.vol_size(), 1.0));
    const Sinogram row_sums = forward_project(ones_img, g);
    const Sinogram ones_sino(g, std::vector<double>(p.values.size(), 1.0));
    const ImageGrid col_sums = strip_adjoint(ones_sino);

    std::vector<double> inv_row(row_sums.values.size());
    for (size_t i = 0; i < inv_row.size(); ++i)
        inv_row[i] = row_sums.values[i] > 1e-12 ? 1.0 / row_sums.values[i] : 0.0;
    std::vector<double> inv_col(col_sums.values.size());
    for (size_t i = 0; i < inv_col.size(); ++i)
        inv_col[i] = col_sums.values[i] > 1e-12 ? 1.0 / col_sums.values[i] : 0.0;

    ImageGrid x(g.vol_size());
    for (int it = 0; it < iterations; ++it) {
        Sinogram residual = forward_project(x, g);
        for (size_t i = 0; i < residual.values.size(); ++i)
            residual.values[i] = (p.values[i] - residual.values[i]) * inv_row[i];
        const ImageGrid update = strip_adjoint(residual);
        for (size_t i = 0; i < x.values.size(); ++i)
            x.values[i] += inv_col[i] * update.values[i];
    }
    return x;
}

} // namespace tomo
