#include "tomo/adapt.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace tomo {

namespace {

FilterSpec basis_filter(const BasisSet& basis, int j, bool zero_dc) {
    std::vector<double> coeffs(static_cast<size_t>(basis.n_b()), 0.0);
    coeffs[static_cast<size_t>(j)] = 1.0;
    return FilterSpec::from_basis(basis, std::move(coeffs), zero_dc);
}

FilterSystem build_columns(const Sinogram& p, const Reconstructor& rec,
                           const BasisSet& basis, bool project_forward) {
    if (basis.n_det != p.geom.n_det())
        throw std::invalid_argument("basis does not match sinogram detector size");
    const int n_b = basis.n_b();
    const bool zero_dc = rec.conventions().zero_dc;
    FilterSystem F;
    F.n_cols = n_b;
    F.n_rows = project_forward
                   ? p.geom.n_angles() * p.geom.n_det()
                   : rec.geometry().vol_size() * rec.geometry().vol_size();
    F.columns.assign(static_cast<size_t>(F.n_rows) * n_b, 0.0);

    // Columns are independent black-box evaluations; the kernels' inner
    // OpenMP loops are inactive inside this parallel region, so each column
    // runs single-threaded and lands in its own slot.
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n_b; ++j) {
        const FilterSpec b_j = basis_filter(basis, j, zero_dc);
        const Sinogram q = apply_filter(p, b_j);
        const ImageGrid r = rec.reconstruct(q);
        double* dst = F.col(j);
        if (project_forward) {
            const Sinogram f = forward_project(r, p.geom);
            std::copy(f.values.begin(), f.values.end(), dst);
        } else {
            std::copy(r.values.begin(), r.values.end(), dst);
        }
    }
    return F;
}

void check_finite(const FilterSystem& F) {
    for (int j = 0; j < F.n_cols; ++j) {
        const double* c = F.col(j);
        for (int i = 0; i < F.n_rows; ++i) {
            if (!std::isfinite(c[i]))
                throw numerical_error(
                    "non-finite value in filter system column " + std::to_string(j));
        }
    }
}

} // namespace

FilterSystem build_filter_system(const Sinogram& p, const Reconstructor& rec,
                                 const BasisSet& basis) {
    return build_columns(p, rec, basis, true);
}

FilterSystem build_reconstruction_system(const Sinogram& p,
                                         const Reconstructor& rec,
                                         const BasisSet& basis) {
    return build_columns(p, rec, basis, false);
}

std::vector<double> solve_least_squares(const FilterSystem& F,
                                        const std::vector<double>& b,
                                        double ridge) {
    if (static_cast<int>(b.size()) != F.n_rows)
        throw std::invalid_argument("right-hand side does not match system rows");
    if (ridge < 0.0)
        throw std::invalid_argument("ridge must be nonnegative");
    check_finite(F);

    const int rows = F.n_rows + (ridge > 0.0 ? F.n_cols : 0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, F.n_cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (int j = 0; j < F.n_cols; ++j)
        for (int i = 0; i < F.n_rows; ++i)
            A(i, j) = F.col(j)[i];
    for (int i = 0; i < F.n_rows; ++i)
        rhs(i) = b[static_cast<size_t>(i)];
    if (ridge > 0.0) {
        const double sq = std::sqrt(ridge);
        for (int j = 0; j < F.n_cols; ++j)
            A(F.n_rows + j, j) = sq;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    Eigen::VectorXd c = svd.solve(rhs);
    return std::vector<double>(c.data(), c.data() + c.size());
}

FilterSpec compute_adapted_filter(const Sinogram& p, const Reconstructor& rec,
                                  const BasisSet& basis, double ridge) {
    const FilterSystem F = build_filter_system(p, rec, basis);
    const std::vector<double> c = solve_least_squares(F, p.values, ridge);
    return FilterSpec::from_basis(basis, c, rec.conventions().zero_dc);
}

FilterSpec compute_reference_filter(const Sinogram& p, const Reconstructor& rec,
                                    const ImageGrid& r_ref, const BasisSet& basis) {
    if (r_ref.n != rec.geometry().vol_size())
        throw std::invalid_argument("reference image does not match geometry");
    const FilterSystem F = build_reconstruction_system(p, rec, basis);
    const std::vector<double> c = solve_least_squares(F, r_ref.values, 0.0);
    return FilterSpec::from_basis(basis, c, rec.conventions().zero_dc);
}

double forward_residual(const Sinogram& p, const Reconstructor& rec,
                        const FilterSpec& h) {
    const ImageGrid r = fbp(rec, p, h);
    const Sinogram f = forward_project(r, p.geom);
    double acc = 0.0;
    for (size_t i = 0; i < p.values.size(); ++i) {
        const double d = p.values[i] - f.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace tomo
