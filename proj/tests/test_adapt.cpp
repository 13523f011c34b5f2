#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tomo/adapt.hpp"
#include "tomo/phantoms.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

Sinogram random_sinogram(const Geometry& g, uint64_t seed) {
    Sinogram s(g);
    rng::Stream rnd = rng::seed_stream(seed);
    for (double& v : s.values)
        v = rnd.next_unit();
    return s;
}

double residual_norm(const FilterSystem& F, const std::vector<double>& c,
                     const std::vector<double>& b) {
    double acc = 0.0;
    for (int i = 0; i < F.n_rows; ++i) {
        double fi = 0.0;
        for (int j = 0; j < F.n_cols; ++j)
            fi += F.col(j)[i] * c[static_cast<size_t>(j)];
        const double d = b[static_cast<size_t>(i)] - fi;
        acc += d * d;
    }
    return std::sqrt(acc);
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v)
        acc += x * x;
    return std::sqrt(acc);
}

// independent dense oracle: assemble the normal equations and solve them by
// Gaussian elimination with partial pivoting
std::vector<double> normal_equations_solve(const FilterSystem& F,
                                           const std::vector<double>& b) {
    const int n = F.n_cols;
    std::vector<std::vector<double>> A(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int i = 0; i < F.n_rows; ++i)
                acc += F.col(r)[i] * F.col(c)[i];
            A[static_cast<size_t>(r)][static_cast<size_t>(c)] = acc;
        }
        double rhs = 0.0;
        for (int i = 0; i < F.n_rows; ++i)
            rhs += F.col(r)[i] * b[static_cast<size_t>(i)];
        A[static_cast<size_t>(r)][static_cast<size_t>(n)] = rhs;
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::fabs(A[static_cast<size_t>(pivot)][static_cast<size_t>(col)]))
                pivot = r;
        std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(pivot)]);
        for (int r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const double f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                             A[static_cast<size_t>(col)][static_cast<size_t>(col)];
            for (int c = col; c <= n; ++c)
                A[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                    f * A[static_cast<size_t>(col)][static_cast<size_t>(c)];
        }
    }
    std::vector<double> x(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r)
        x[static_cast<size_t>(r)] = A[static_cast<size_t>(r)][static_cast<size_t>(n)] /
                                    A[static_cast<size_t>(r)][static_cast<size_t>(r)];
    return x;
}

} // namespace

TEST_CASE("tiny instance: solver matches the normal-equations oracle") {
    const Geometry g = make_geometry(4, 8, 8);
    Slice2D disc;
    disc.disc_radius = 0.8;
    disc.holes.push_back({0.3, 0.0, 0.2});
    const Sinogram p = analytic_sinogram(disc, g, 2);
    const Reconstructor rec(KernelKind::Strip, g);
    const BasisSet basis = expbin_basis(8, 4);

    const FilterSystem F = build_filter_system(p, rec, basis);
    REQUIRE(F.n_cols == 5);
    REQUIRE(F.n_rows == 32);
    const std::vector<double> c = solve_least_squares(F, p.values);
    const std::vector<double> oracle = normal_equations_solve(F, p.values);
    for (size_t i = 0; i < c.size(); ++i)
        CHECK(std::fabs(c[i] - oracle[i]) <=
              1e-8 * std::max(1.0, std::fabs(oracle[i])));
}

TEST_CASE("F columns equal the per-basis pipeline bit-exactly") {
    const Geometry g = make_geometry(4, 8, 8);
    const Sinogram p = random_sinogram(g, 3);
    const Reconstructor rec(KernelKind::Line, g);
    const BasisSet basis = expbin_basis(8, 2);
    const FilterSystem F = build_filter_system(p, rec, basis);
    for (int j = 0; j < F.n_cols; ++j) {
        std::vector<double> coeffs(static_cast<size_t>(basis.n_b()), 0.0);
        coeffs[static_cast<size_t>(j)] = 1.0;
        const FilterSpec b_j = FilterSpec::from_basis(basis, coeffs,
                                                      rec.conventions().zero_dc);
        const Sinogram f = forward_project(rec.reconstruct(apply_filter(p, b_j)), g);
        for (int i = 0; i < F.n_rows; ++i)
            CHECK(F.col(j)[i] == f.values[static_cast<size_t>(i)]);
    }
}

TEST_CASE("zero sinogram yields the zero (minimum-norm) filter") {
    const Geometry g = make_geometry(4, 8, 8);
    const Sinogram zero(g);
    const Reconstructor rec(KernelKind::Strip, g);
    const FilterSpec h = compute_adapted_filter(zero, rec, expbin_basis(8, 4));
    for (double c : h.coeffs())
        CHECK(std::fabs(c) <= 1e-14);
}

TEST_CASE("least-squares optimality against random coefficient vectors") {
    const Geometry g = make_geometry(8, 32, 32);
    const FoamPhantom foam = generate_foam([] {
        FoamSpec s;
        s.n_spheres = 60;
        s.seed = 2;
        return s;
    }());
    const Sinogram p = analytic_sinogram(slice_phantom(foam, 0.0), g, 2);
    const Reconstructor rec(KernelKind::Joseph, g);
    const BasisSet basis = expbin_basis(32, 4);
    const FilterSystem F = build_filter_system(p, rec, basis);
    const std::vector<double> best = solve_least_squares(F, p.values);
    const double best_res = residual_norm(F, best, p.values);
    const double p_norm = norm2(p.values);
    rng::Stream rnd = rng::seed_stream(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(best.size());
        for (double& v : c)
            v = 4.0 * (rnd.next_unit() - 0.5);
        CHECK(best_res <= residual_norm(F, c, p.values) + 1e-8 * p_norm);
    }
}

TEST_CASE("scaling invariance: h*(alpha p) = h*(p)") {
    const Geometry g = make_geometry(6, 16, 16);
    Slice2D disc;
    disc.disc_radius = 0.9;
    disc.holes.push_back({-0.2, 0.3, 0.25});
    const Sinogram p = analytic_sinogram(disc, g, 2);
    Sinogram scaled(g);
    for (size_t i = 0; i < p.values.size(); ++i)
        scaled.values[i] = 3.7 * p.values[i];
    const Reconstructor rec(KernelKind::PixelDriven, g);
    const BasisSet basis = expbin_basis(16, 4);
    const FilterSpec h1 = compute_adapted_filter(p, rec, basis);
    const FilterSpec h2 = compute_adapted_filter(scaled, rec, basis);
    double scale = 0.0;
    for (double c : h1.coeffs())
        scale = std::max(scale, std::fabs(c));
    for (size_t i = 0; i < h1.coeffs().size(); ++i)
        CHECK(std::fabs(h1.coeffs()[i] - h2.coeffs()[i]) <= 1e-8 * scale);
}

TEST_CASE("nested bases: the dense refinement never has a larger residual") {
    const Geometry g = make_geometry(8, 32, 32);
    Slice2D disc;
    disc.disc_radius = 0.8;
    disc.holes.push_back({0.1, -0.2, 0.3});
    const Sinogram p = analytic_sinogram(disc, g, 2);
    const Reconstructor rec(KernelKind::Strip, g);

    const FilterSystem Fa = build_filter_system(p, rec, expbin_basis(32, 4));
    const FilterSystem Fb = build_filter_system(p, rec, dense_basis(32));
    const double res_a = residual_norm(Fa, solve_least_squares(Fa, p.values), p.values);
    const double res_b = residual_norm(Fb, solve_least_squares(Fb, p.values), p.values);
    CHECK(res_b <= res_a + 1e-8 * norm2(p.values));
}

TEST_CASE("ridge shrinks coefficients") {
    const Geometry g = make_geometry(6, 16, 16);
    Slice2D disc;
    disc.disc_radius = 0.8;
    const Sinogram p = analytic_sinogram(disc, g, 2);
    const Reconstructor rec(KernelKind::Strip, g);
    const BasisSet basis = expbin_basis(16, 4);
    const FilterSpec plain = compute_adapted_filter(p, rec, basis, 0.0);
    const FilterSpec ridged = compute_adapted_filter(p, rec, basis, 1e6);
    CHECK(norm2(ridged.coeffs()) < norm2(plain.coeffs()));
}

TEST_CASE("non-finite columns are reported as numerical errors") {
    FilterSystem F;
    F.n_rows = 2;
    F.n_cols = 1;
    F.columns = {1.0, std::nan("")};
    CHECK_THROWS_AS(solve_least_squares(F, {1.0, 2.0}), numerical_error);
}

TEST_CASE("reference mode") {
    const Geometry g = make_geometry(8, 32, 32);
    Slice2D disc;
    disc.disc_radius = 0.85;
    disc.holes.push_back({0.25, 0.15, 0.2});
    const Sinogram p = analytic_sinogram(disc, g, 2);

    SUBCASE("exactly representable reference is reproduced") {
        const Reconstructor rec(KernelKind::Line, g);
        const BasisSet basis = expbin_basis(32, 4);
        // reference produced by a filter inside the basis span
        std::vector<double> coeffs(static_cast<size_t>(basis.n_b()), 0.0);
        coeffs[0] = 0.25;
        coeffs[1] = -0.1;
        coeffs[3] = 0.02;
        const FilterSpec h0 = FilterSpec::from_basis(basis, coeffs);
        const ImageGrid r_ref = fbp(rec, p, h0);
        const FilterSpec h = compute_reference_filter(p, rec, r_ref, basis);
        const ImageGrid r = fbp(rec, p, h);
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < r.values.size(); ++i) {
            const double d = r.values[i] - r_ref.values[i];
            num += d * d;
            den += r_ref.values[i] * r_ref.values[i];
        }
        CHECK(std::sqrt(num / den) <= 1e-6);
    }

    SUBCASE("zero reference gives zero coefficients") {
        const Reconstructor rec(KernelKind::Strip, g);
        const FilterSpec h =
            compute_reference_filter(p, rec, ImageGrid(32), expbin_basis(32, 4));
        for (double c : h.coeffs())
            CHECK(std::fabs(c) <= 1e-14);
    }

    SUBCASE("optimizing line to a strip reference reduces RMSE_r") {
        const Reconstructor strip(KernelKind::Strip, g);
        const Reconstructor line(KernelKind::Line, g);
        const FilterSpec sl = standard_filter("shepp-logan", 32);
        const ImageGrid r_ref = fbp(strip, p, sl);
        const ImageGrid before = fbp(line, p, sl);
        const FilterSpec h = compute_reference_filter(p, line, r_ref, expbin_basis(32, 8));
        const ImageGrid after = fbp(line, p, h);
        double rmse_before = 0.0, rmse_after = 0.0;
        for (size_t i = 0; i < r_ref.values.size(); ++i) {
            rmse_before += (before.values[i] - r_ref.values[i]) * (before.values[i] - r_ref.values[i]);
            rmse_after += (after.values[i] - r_ref.values[i]) * (after.values[i] - r_ref.values[i]);
        }
        CHECK(rmse_after < rmse_before);
    }
}
