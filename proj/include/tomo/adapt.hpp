#pragma once

#include <vector>

#include "tomo/filters.hpp"
#include "tomo/reconstruct.hpp"

namespace tomo {

// Column-major system matrix for the filter least-squares problem. Column j
// is the flattened result of pushing the j-th basis filter through the
// implementation: filter -> reconstruct -> (forward project | identity).
struct FilterSystem {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> columns; // n_rows * n_cols, column-major

    const double* col(int j) const {
        return columns.data() + static_cast<size_t>(j) * n_rows;
    }
    double* col(int j) {
        return columns.data() + static_cast<size_t>(j) * n_rows;
    }
};

// Build F for the sinogram-space objective: f_j = flatten(W r_I(b_j, p)).
// The implementation is touched only through Reconstructor::reconstruct; its
// DC convention is honored when filtering with the basis vectors.
FilterSystem build_filter_system(const Sinogram& p, const Reconstructor& rec,
                                 const BasisSet& basis);

// Same columns without the final forward projection: f_j = flatten(r_I(b_j, p)).
FilterSystem build_reconstruction_system(const Sinogram& p,
                                         const Reconstructor& rec,
                                         const BasisSet& basis);

// Minimum-norm least-squares solve of ||b - F c||_2^2 + ridge*||c||_2^2
// (rank tolerance 1e-10 relative to the largest singular value).
std::vector<double> solve_least_squares(const FilterSystem& F,
                                        const std::vector<double>& b,
                                        double ridge = 0.0);

// Implementation-adapted (minimum-residual) filter:
//   h* = argmin_h ||p - W r_I(h, p)||_2^2 over the basis span.
FilterSpec compute_adapted_filter(const Sinogram& p, const Reconstructor& rec,
                                  const BasisSet& basis, double ridge = 0.0);

// Reference-reconstruction variant: h* = argmin_h ||r_ref - r_I(h, p)||_2^2.
FilterSpec compute_reference_filter(const Sinogram& p, const Reconstructor& rec,
                                    const ImageGrid& r_ref, const BasisSet& basis);

// ||p - W r_I(h, p)||_2, the quantity the adapted filter minimizes.
double forward_residual(const Sinogram& p, const Reconstructor& rec,
                        const FilterSpec& h);

} // namespace tomo
