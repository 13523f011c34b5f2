#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomo/core.hpp"

namespace tomo {

// Piecewise-constant filter parameterization in detector (real) space.
// Bin widths are 1 for the first n_l bins and then double away from the
// detector center; bins tile the one-sided lag offsets 0..n_det/2 exactly
// once, with the last bin truncated at the detector edge. Basis vectors are
// the symmetric bin indicators (value 1 on a bin and its mirror), so every
// representable filter is even.
struct BasisSet {
    struct Bin {
        int start;
        int width;
    };

    int n_det = 0;
    int n_l = 0; // 0 marks the dense (all unit bins) basis
    std::vector<Bin> bins;

    int n_b() const { return static_cast<int>(bins.size()); }
    bool dense() const { return n_l == 0; }
    int max_offset() const { return n_det / 2; }
    // bin index covering lag offset |n|, or -1 beyond the support
    int bin_of(int offset) const;
};

BasisSet expbin_basis(int n_det, int n_l);
BasisSet dense_basis(int n_det);

/**
 * An even-symmetric detector-space filter. Stored as real-space data
 * (expbin coefficients or n_det one-sided taps); the Fourier half-spectrum
 * over the padded grid is derived from the coefficients at construction and
 * is never stored stale. Because the real-space filter is even, the spectrum
 * is real.
 */
class FilterSpec {
public:
    enum class Basis { ExpBin, Dense };

    FilterSpec(int n_det, Basis basis, int n_l, std::vector<double> coeffs,
               bool zero_dc = false);

    static FilterSpec from_basis(const BasisSet& basis, std::vector<double> coeffs,
                                 bool zero_dc = false);

    int n_det() const { return n_det_; }
    Basis basis() const { return basis_; }
    int n_l() const { return n_l_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    bool zero_dc() const { return zero_dc_; }
    FilterSpec with_zero_dc(bool flag) const;

    // one-sided real-space taps h(0..n_det-1)
    std::vector<double> real_taps() const;
    // derived half-spectrum, length padded_length(n_det)/2 + 1
    const std::vector<double>& fourier() const { return fourier_; }

private:
    int n_det_;
    Basis basis_;
    int n_l_;
    std::vector<double> coeffs_;
    bool zero_dc_;
    std::vector<double> fourier_;
};

// frozen padding convention for Fourier-domain filtering
int padded_length(int n_det);

// "ram-lak" (|w|) or "shepp-logan" (|w| * sinc(w/(2*w_Nyquist))) sampled on
// the padded frequency grid and stored through their real-space taps.
FilterSpec standard_filter(std::string_view name, int n_det);

// Per-row Fourier filtering: zero-pad to padded_length(n_det), real FFT,
// multiply by h.fourier (DC forced to zero when h.zero_dc()), inverse FFT,
// crop. Linear in both arguments; the padding makes it a true (aperiodic)
// convolution with the filter taps.
Sinogram apply_filter(const Sinogram& p, const FilterSpec& h);

// The padding-free variant used by some Fourier-domain packages: each row is
// multiplied by the ramp sampled on the unpadded n_det grid (circular
// convolution, band cut at the grid's own Nyquist). Kept as a distinct
// filtering convention; it is one side of the conventions-differ premise.
Sinogram apply_ramp_unpadded(const Sinogram& p);

struct FilterProvenance {
    std::string implementation;
    int n_angles = 0;
    std::optional<uint64_t> seed;
};

void write_filter(const std::filesystem::path& path, const FilterSpec& h,
                  const FilterProvenance& prov = {});
FilterSpec read_filter(const std::filesystem::path& path);

} // namespace tomo
