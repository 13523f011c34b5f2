#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tomo/phantoms.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

FoamSpec small_spec(int n_spheres, uint64_t seed) {
    FoamSpec spec;
    spec.n_spheres = n_spheres;
    spec.seed = seed;
    return spec;
}

// dense midpoint-rule quadrature of the slice density along one ray
double ray_quadrature(const Slice2D& slice, double scale, double theta,
                      double t, int samples) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double R = slice.disc_radius * scale;
    const double half = 1.2 * R;
    const double step = 2.0 * half / samples;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = -half + (i + 0.5) * step;
        const double x = t * c - u * s;
        const double y = t * s + u * c;
        if (x * x + y * y > R * R)
            continue;
        bool material = true;
        for (const Circle& h : slice.holes) {
            const double dx = x - h.cx * scale, dy = y - h.cy * scale;
            const double hr = h.r * scale;
            if (dx * dx + dy * dy < hr * hr) {
                material = false;
                break;
            }
        }
        if (material)
            acc += step;
    }
    return acc;
}

} // namespace

TEST_CASE("foam generation: empty, deterministic, non-overlapping") {
    CHECK(generate_foam(small_spec(0, 1)).spheres.empty());

    const FoamPhantom a = generate_foam(small_spec(1000, 7));
    const FoamPhantom b = generate_foam(small_spec(1000, 7));
    REQUIRE(a.spheres.size() == 1000);
    REQUIRE(b.spheres.size() == 1000);
    for (size_t i = 0; i < a.spheres.size(); ++i) {
        CHECK(a.spheres[i].cx == b.spheres[i].cx);
        CHECK(a.spheres[i].cy == b.spheres[i].cy);
        CHECK(a.spheres[i].cz == b.spheres[i].cz);
        CHECK(a.spheres[i].r == b.spheres[i].r);
    }

    // brute-force O(n^2) pair check plus containment
    const FoamSpec& spec = a.spec;
    for (size_t i = 0; i < a.spheres.size(); ++i) {
        const Sphere& si = a.spheres[i];
        CHECK(std::sqrt(si.cx * si.cx + si.cy * si.cy) + si.r < spec.cylinder_radius);
        CHECK(std::fabs(si.cz) + si.r < spec.z_extent);
        for (size_t j = i + 1; j < a.spheres.size(); ++j) {
            const Sphere& sj = a.spheres[j];
            const double dx = si.cx - sj.cx, dy = si.cy - sj.cy, dz = si.cz - sj.cz;
            CHECK(std::sqrt(dx * dx + dy * dy + dz * dz) >= si.r + sj.r);
        }
    }

    const FoamPhantom c = generate_foam(small_spec(1000, 8));
    CHECK(c.spheres[0].cx != a.spheres[0].cx);
}

TEST_CASE("slice_phantom cuts the right holes") {
    FoamPhantom foam;
    foam.spec = small_spec(1, 0);
    foam.spheres = {{0.0, 0.0, 0.0, 0.05}};

    SUBCASE("equatorial cut has radius r") {
        const Slice2D s = slice_phantom(foam, 0.0);
        REQUIRE(s.holes.size() == 1);
        CHECK(s.holes[0].r == doctest::Approx(0.05).epsilon(1e-15));
    }
    SUBCASE("tangent plane is excluded") {
        CHECK(slice_phantom(foam, 0.05).holes.empty());
    }
    SUBCASE("z outside the cylinder is out of range") {
        CHECK_THROWS_AS(slice_phantom(foam, 0.5), std::out_of_range);
        CHECK_THROWS_AS(slice_phantom(foam, -0.5), std::out_of_range);
    }
}

TEST_CASE("slice hole count matches a direct inequality scan") {
    const FoamPhantom foam = generate_foam(small_spec(1000, 3));
    const Slice2D s = slice_phantom(foam, 0.0);
    size_t expected = 0;
    for (const Sphere& sp : foam.spheres)
        if (std::fabs(0.0 - sp.cz) < sp.r)
            ++expected;
    CHECK(s.holes.size() == expected);
}

TEST_CASE("analytic sinogram basics") {
    const Geometry g = make_geometry(8, 32, 32);

    SUBCASE("empty slice gives zeros") {
        Slice2D empty;
        const Sinogram sino = analytic_sinogram(empty, g, 1);
        for (double v : sino.values)
            CHECK(v == 0.0);
    }
    SUBCASE("central ray through a disc is a diameter") {
        Slice2D disc;
        disc.disc_radius = 0.5; // maps to 8 pixels radius on a 32-grid
        const Geometry g33 = make_geometry(4, 33, 33);
        const Sinogram sino = analytic_sinogram(disc, g33, 1);
        // detector pixel 16 is exactly t=0 on the odd grid
        for (int a = 0; a < 4; ++a)
            CHECK(sino.at(a, 16) == doctest::Approx(2.0 * 0.5 * 16.5).epsilon(1e-12));
    }
}

TEST_CASE("analytic sinogram matches dense quadrature on a foam slice") {
    const FoamPhantom foam = generate_foam(small_spec(200, 11));
    const Slice2D slice = slice_phantom(foam, 0.1);
    const Geometry g = make_geometry(32, 256, 256);
    const Sinogram sino = analytic_sinogram(slice, g, 4);
    const double scale = 0.5 * 256;

    // spot-check a grid of rays against 1e4-sample midpoint quadrature
    double max_rel = 0.0;
    for (int a = 0; a < 32; a += 7) {
        for (int k = 40; k < 256; k += 31) {
            double q = 0.0;
            for (int sub = 0; sub < 4; ++sub) {
                const double t = g.det_center(k) + ((sub + 0.5) / 4.0 - 0.5);
                q += ray_quadrature(slice, scale, g.angles()[static_cast<size_t>(a)], t, 10000);
            }
            q /= 4.0;
            const double v = sino.at(a, k);
            if (q > 1.0) // skip near-tangent rays where quadrature itself is coarse
                max_rel = std::max(max_rel, std::fabs(v - q) / q);
        }
    }
    CHECK(max_rel <= 1e-3);
}

TEST_CASE("sinogram is linear in the phantom: disc minus holes") {
    const FoamPhantom foam = generate_foam(small_spec(50, 5));
    const Slice2D slice = slice_phantom(foam, 0.0);
    const Geometry g = make_geometry(16, 64, 64);

    Slice2D disc_only;
    disc_only.disc_radius = slice.disc_radius;
    const Sinogram with_holes = analytic_sinogram(slice, g, 2);
    const Sinogram disc = analytic_sinogram(disc_only, g, 2);

    // holes alone, as chord sums
    Sinogram holes(g);
    const double scale = 0.5 * 64;
    for (int a = 0; a < 16; ++a) {
        const double c = std::cos(g.angles()[static_cast<size_t>(a)]);
        const double s = std::sin(g.angles()[static_cast<size_t>(a)]);
        for (int k = 0; k < 64; ++k) {
            double acc = 0.0;
            for (int sub = 0; sub < 2; ++sub) {
                const double t = g.det_center(k) + ((sub + 0.5) / 2.0 - 0.5);
                for (const Circle& h : slice.holes) {
                    const double d = h.cx * scale * c + h.cy * scale * s - t;
                    const double rr = h.r * scale * h.r * scale - d * d;
                    if (rr > 0.0)
                        acc += 2.0 * std::sqrt(rr);
                }
            }
            holes.at(a, k) = acc / 2.0;
        }
    }
    for (size_t i = 0; i < with_holes.values.size(); ++i)
        CHECK(std::fabs(disc.values[i] - with_holes.values[i] - holes.values[i]) <= 1e-12);
}

TEST_CASE("parallel-beam symmetry: theta+pi with t -> -t") {
    const FoamPhantom foam = generate_foam(small_spec(30, 9));
    const Slice2D slice = slice_phantom(foam, 0.0);
    // evaluate the same rays through mirrored detector coordinates
    const Geometry g = make_geometry(8, 33, 33);
    const Sinogram sino = analytic_sinogram(slice, g, 1);
    // shifting an angle by pi and flipping t must reproduce the row
    for (int a = 0; a < 8; ++a) {
        const double theta = g.angles()[static_cast<size_t>(a)] + M_PI;
        const double c = std::cos(theta), s = std::sin(theta);
        const double scale = 0.5 * 33;
        for (int k = 0; k < 33; ++k) {
            const double t = -g.det_center(k); // mirrored coordinate
            double v = 0.0;
            const double R = slice.disc_radius * scale;
            const double d0 = 0.0 * c + 0.0 * s - t;
            if (R * R - d0 * d0 > 0.0)
                v += 2.0 * std::sqrt(R * R - d0 * d0);
            for (const Circle& h : slice.holes) {
                const double d = h.cx * scale * c + h.cy * scale * s - t;
                const double rr = h.r * scale * h.r * scale - d * d;
                if (rr > 0.0)
                    v -= 2.0 * std::sqrt(rr);
            }
            CHECK(v == doctest::Approx(sino.at(a, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rasterize_slice") {
    SUBCASE("empty slice is a zero image") {
        Slice2D empty;
        const ImageGrid img = rasterize_slice(empty, 16, 2);
        for (double v : img.values)
            CHECK(v == 0.0);
    }
    SUBCASE("full disc: interior pixels exactly 1") {
        Slice2D disc;
        disc.disc_radius = 1.0;
        const ImageGrid img = rasterize_slice(disc, 32, 2);
        CHECK(img.at(16, 16) == 1.0);
        CHECK(img.at(10, 16) == 1.0);
    }
    SUBCASE("disc mass matches pi R^2 within 0.1%") {
        Slice2D disc;
        disc.disc_radius = 0.5; // half-width radius
        const int n = 256;
        const ImageGrid img = rasterize_slice(disc, n, 8);
        double mass = 0.0;
        for (double v : img.values)
            mass += v;
        // R in pixel units is 0.5 * n/2
        const double r_pix = 0.5 * n / 2.0;
        const double analytic = M_PI * r_pix * r_pix;
        CHECK(std::fabs(mass - analytic) / analytic < 1e-3);
    }
}

TEST_CASE("single pixel phantom") {
    const ImageGrid img = single_pixel_phantom(33);
    CHECK(img.at(16, 16) == 1.0);
    double mass = 0.0;
    for (double v : img.values)
        mass += v;
    CHECK(mass == 1.0);

    CHECK(single_pixel_phantom(1).values == std::vector<double>{1.0});
    CHECK_THROWS_AS(single_pixel_phantom(4), std::invalid_argument);
}

TEST_CASE("poisson noise: deterministic, unbiased at high flux") {
    const Geometry g = make_geometry(256, 256, 256);
    Sinogram p(g); // p = 0 -> lambda = flux
    const Sinogram n1 = add_poisson_noise(p, 1e6, 42);
    const Sinogram n2 = add_poisson_noise(p, 1e6, 42);
    CHECK(n1.values == n2.values);

    double mean_abs = 0.0;
    for (double v : n1.values)
        mean_abs += std::fabs(v);
    mean_abs /= static_cast<double>(n1.values.size());
    CHECK(mean_abs <= 3e-3); // relative Poisson error ~ 1/sqrt(flux)

    SUBCASE("variance decreases monotonically with flux") {
        double prev_var = 1e300;
        for (double flux : {1e3, 1e4, 1e5, 1e6}) {
            const Sinogram noisy = add_poisson_noise(p, flux, 1);
            double var = 0.0;
            for (double v : noisy.values)
                var += v * v;
            var /= static_cast<double>(noisy.values.size());
            CHECK(var < prev_var);
            prev_var = var;
        }
    }

    SUBCASE("negative input is rejected") {
        Sinogram bad(make_geometry(1, 2, 2));
        bad.at(0, 0) = -1.0;
        CHECK_THROWS_AS(add_poisson_noise(bad, 1e4, 0), std::invalid_argument);
    }
}

TEST_CASE("poisson noise is independent of evaluation order") {
    // keyed per-pixel streams: a row-subset sinogram gets identical samples
    const Geometry g = make_geometry(4, 8, 8);
    Sinogram p(g);
    for (size_t i = 0; i < p.values.size(); ++i)
        p.values[i] = 0.1 * static_cast<double>(i % 7);
    const Sinogram full = add_poisson_noise(p, 1e4, 5);
    const Sinogram again = add_poisson_noise(p, 1e4, 5);
    CHECK(full.values == again.values);
}

TEST_CASE("zingers") {
    const Geometry g = make_geometry(512, 256, 256);
    Sinogram p(g);
    for (size_t i = 0; i < p.values.size(); ++i)
        p.values[i] = std::sin(0.01 * static_cast<double>(i)) + 1.5;

    SUBCASE("fraction 0 is the identity") {
        CHECK(add_zingers(p, 0.0, 2.0, 1).values == p.values);
    }
    SUBCASE("fraction 1 saturates everything") {
        const double peak = 2.0 * 2.5;
        const Sinogram z = add_zingers(p, 1.0, 2.0, 1);
        for (double v : z.values)
            CHECK(v == doctest::Approx(peak).epsilon(1e-9));
    }
    SUBCASE("fraction 1e-3 on 512x256 changes exactly 131 pixels") {
        const Sinogram z = add_zingers(p, 1e-3, 2.0, 7);
        size_t changed = 0;
        for (size_t i = 0; i < z.values.size(); ++i)
            if (z.values[i] != p.values[i])
                ++changed;
        CHECK(changed == 131); // floor(1e-3 * 512*256)
        CHECK(add_zingers(p, 1e-3, 2.0, 7).values == z.values);
    }
}

TEST_CASE("phantom JSON round trip") {
    const FoamPhantom foam = generate_foam(small_spec(20, 123));
    const auto path = std::filesystem::temp_directory_path() / "tomo_foam.json";
    write_phantom(path, foam);
    const FoamPhantom back = read_phantom(path);
    REQUIRE(back.spheres.size() == foam.spheres.size());
    CHECK(back.spec.seed == foam.spec.seed);
    for (size_t i = 0; i < foam.spheres.size(); ++i) {
        CHECK(back.spheres[i].cx == foam.spheres[i].cx);
        CHECK(back.spheres[i].r == foam.spheres[i].r);
    }
}
