#include "tomo/phantoms.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "tomo/rng.hpp"

namespace tomo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr long kMaxPackingAttempts = 10'000'000;
} // namespace

void FoamSpec::validate() const {
    if (n_spheres < 0)
        throw std::invalid_argument("n_spheres must be >= 0");
    if (!(cylinder_radius > 0.0) || cylinder_radius > 1.0)
        throw std::invalid_argument("cylinder_radius must be in (0,1]");
    if (!(r_min > 0.0) || r_min > r_max || !(r_max < cylinder_radius))
        throw std::invalid_argument("need 0 < r_min <= r_max < cylinder_radius");
    if (!(z_extent > 0.0))
        throw std::invalid_argument("z_extent must be positive");
}

FoamPhantom generate_foam(const FoamSpec& spec) {
    spec.validate();
    FoamPhantom foam;
    foam.spec = spec;
    foam.spheres.reserve(static_cast<size_t>(spec.n_spheres));
    rng::Stream rnd = rng::seed_stream(spec.seed);
    long attempts = 0;
    while (static_cast<int>(foam.spheres.size()) < spec.n_spheres) {
        if (++attempts > kMaxPackingAttempts)
            throw packing_error("foam packing exceeded " +
                                std::to_string(kMaxPackingAttempts) + " attempts");
        const double r = spec.r_min + (spec.r_max - spec.r_min) * rnd.next_unit();
        const double rho_max = spec.cylinder_radius - r;
        const double z_max = spec.z_extent - r;
        if (rho_max <= 0.0 || z_max <= 0.0)
            continue;
        const double phi = 2.0 * kPi * rnd.next_unit();
        const double rho = rho_max * std::sqrt(rnd.next_unit());
        const double cx = rho * std::cos(phi);
        const double cy = rho * std::sin(phi);
        const double cz = z_max * (2.0 * rnd.next_unit() - 1.0);
        bool ok = true;
        for (const Sphere& s : foam.spheres) {
            const double dx = s.cx - cx, dy = s.cy - cy, dz = s.cz - cz;
            const double min_d = s.r + r;
            if (dx * dx + dy * dy + dz * dz < min_d * min_d) {
                ok = false;
                break;
            }
        }
        if (ok)
            foam.spheres.push_back({cx, cy, cz, r});
    }
    return foam;
}

Slice2D slice_phantom(const FoamPhantom& foam, double z) {
    if (!(std::fabs(z) < foam.spec.z_extent))
        throw std::out_of_range("slice z outside the cylinder");
    Slice2D slice;
    slice.disc_radius = foam.spec.cylinder_radius;
    for (const Sphere& s : foam.spheres) {
        const double dz = z - s.cz;
        if (std::fabs(dz) < s.r) {
            slice.holes.push_back({s.cx, s.cy, std::sqrt(s.r * s.r - dz * dz)});
        }
    }
    return slice;
}

namespace {

// chord length of line l_{theta,t} through a circle
inline double chord(double t, double c, double s, double cx, double cy, double r) {
    const double d = cx * c + cy * s - t;
    const double h = r * r - d * d;
    return h > 0.0 ? 2.0 * std::sqrt(h) : 0.0;
}

} // namespace

Sinogram analytic_sinogram(const Slice2D& slice, const Geometry& g,
                           int supersampling) {
    if (supersampling < 1)
        throw std::invalid_argument("supersampling must be >= 1");
    // phantom units -> length units: unit half-width = half the image
    const double scale = 0.5 * g.vol_size() * g.det_spacing();
    const double disc_r = slice.disc_radius * scale;
    std::vector<Circle> holes(slice.holes);
    for (Circle& h : holes) {
        h.cx *= scale;
        h.cy *= scale;
        h.r *= scale;
    }
    Sinogram out(g);
    const int na = g.n_angles();
    const int nd = g.n_det();
#pragma omp parallel for schedule(static)
    for (int a = 0; a < na; ++a) {
        const double c = std::cos(g.angles()[static_cast<size_t>(a)]);
        const double s = std::sin(g.angles()[static_cast<size_t>(a)]);
        for (int k = 0; k < nd; ++k) {
            const double tk = g.det_center(k);
            double acc = 0.0;
            for (int j = 0; j < supersampling; ++j) {
                const double t =
                    tk + ((j + 0.5) / supersampling - 0.5) * g.det_spacing();
                double v = chord(t, c, s, 0.0, 0.0, disc_r);
                for (const Circle& h : holes)
                    v -= chord(t, c, s, h.cx, h.cy, h.r);
                acc += v;
            }
            out.at(a, k) = acc / supersampling;
        }
    }
    return out;
}

ImageGrid rasterize_slice(const Slice2D& slice, int n, int subpixel) {
    if (n < 1 || subpixel < 1)
        throw std::invalid_argument("rasterize_slice: n and subpixel must be >= 1");
    ImageGrid img(n);
    const double px = 2.0 / n; // pixel width in phantom units
    const double r2 = slice.disc_radius * slice.disc_radius;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int inside = 0;
            for (int si = 0; si < subpixel; ++si) {
                for (int sj = 0; sj < subpixel; ++sj) {
                    const double x = -1.0 + (j + (sj + 0.5) / subpixel) * px;
                    const double y = 1.0 - (i + (si + 0.5) / subpixel) * px;
                    if (x * x + y * y > r2)
                        continue;
                    bool material = true;
                    for (const Circle& h : slice.holes) {
                        const double dx = x - h.cx, dy = y - h.cy;
                        if (dx * dx + dy * dy < h.r * h.r) {
                            material = false;
                            break;
                        }
                    }
                    inside += material ? 1 : 0;
                }
            }
            img.at(i, j) =
                static_cast<double>(inside) / (static_cast<double>(subpixel) * subpixel);
        }
    }
    return img;
}

ImageGrid single_pixel_phantom(int n) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("single_pixel_phantom: n must be odd");
    ImageGrid img(n);
    img.at((n - 1) / 2, (n - 1) / 2) = 1.0;
    return img;
}

Sinogram add_poisson_noise(const Sinogram& p, double flux, uint64_t seed) {
    if (!(flux > 0.0))
        throw std::invalid_argument("flux must be positive");
    for (double v : p.values)
        if (v < 0.0)
            throw std::invalid_argument("add_poisson_noise: sinogram must be nonnegative");
    Sinogram out(p.geom);
    const int na = p.geom.n_angles();
    const int nd = p.geom.n_det();
    const double log_flux = std::log(flux);
#pragma omp parallel for schedule(static) collapse(2)
    for (int a = 0; a < na; ++a) {
        for (int k = 0; k < nd; ++k) {
            rng::Stream s = rng::pixel_stream(seed, static_cast<uint64_t>(a),
                                              static_cast<uint64_t>(k));
            const double lambda = flux * std::exp(-p.at(a, k));
            uint64_t count = rng::poisson(s, lambda);
            if (count < 1)
                count = 1;
            out.at(a, k) = log_flux - std::log(static_cast<double>(count));
        }
    }
    return out;
}

Sinogram add_zingers(const Sinogram& p, double fraction, double amplitude_factor,
                     uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("zinger fraction must be in [0,1]");
    if (!(amplitude_factor > 1.0))
        throw std::invalid_argument("zinger amplitude_factor must be > 1");
    Sinogram out = p;
    const size_t n_pix = p.values.size();
    const size_t n_hit = static_cast<size_t>(fraction * static_cast<double>(n_pix));
    if (n_hit == 0)
        return out;
    const double peak =
        amplitude_factor * *std::max_element(p.values.begin(), p.values.end());
    // partial Fisher-Yates: the first n_hit slots end up a uniform sample
    std::vector<uint32_t> idx(n_pix);
    std::iota(idx.begin(), idx.end(), 0u);
    rng::Stream rnd = rng::seed_stream(seed);
    for (size_t i = 0; i < n_hit; ++i) {
        const size_t j = i + static_cast<size_t>(rnd.next_u64() % (n_pix - i));
        std::swap(idx[i], idx[j]);
        out.values[idx[i]] = peak;
    }
    return out;
}

void write_phantom(const std::filesystem::path& path, const FoamPhantom& foam) {
    nlohmann::json j;
    j["spec"] = {{"n_spheres", foam.spec.n_spheres},
                 {"cylinder_radius", format_double(foam.spec.cylinder_radius)},
                 {"r_min", format_double(foam.spec.r_min)},
                 {"r_max", format_double(foam.spec.r_max)},
                 {"z_extent", format_double(foam.spec.z_extent)},
                 {"seed", foam.spec.seed}};
    nlohmann::json spheres = nlohmann::json::array();
    for (const Sphere& s : foam.spheres)
        spheres.push_back({{"cx", format_double(s.cx)},
                           {"cy", format_double(s.cy)},
                           {"cz", format_double(s.cz)},
                           {"r", format_double(s.r)}});
    j["spheres"] = std::move(spheres);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw io_error("cannot open for writing: " + tmp.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

FoamPhantom read_phantom(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open for reading: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        FoamPhantom foam;
        const auto& spec = j.at("spec");
        foam.spec.n_spheres = spec.at("n_spheres").get<int>();
        foam.spec.cylinder_radius = std::stod(spec.at("cylinder_radius").get<std::string>());
        foam.spec.r_min = std::stod(spec.at("r_min").get<std::string>());
        foam.spec.r_max = std::stod(spec.at("r_max").get<std::string>());
        foam.spec.z_extent = std::stod(spec.at("z_extent").get<std::string>());
        foam.spec.seed = spec.at("seed").get<uint64_t>();
        for (const auto& s : j.at("spheres"))
            foam.spheres.push_back({std::stod(s.at("cx").get<std::string>()),
                                    std::stod(s.at("cy").get<std::string>()),
                                    std::stod(s.at("cz").get<std::string>()),
                                    std::stod(s.at("r").get<std::string>())});
        return foam;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

} // namespace tomo
