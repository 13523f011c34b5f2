#include "tomo/filters.hpp"

#include <cmath>
#include <complex>
#include <fstream>

#include <json.hpp>

#include "fft.hpp"

namespace tomo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

int padded_length(int n_det) {
    int p = 1;
    while (p < n_det)
        p *= 2;
    // 2x padding already prevents wrap-around; the extra factor keeps the
    // periodization alias of slowly decaying kernel tails (~1/n^2) below
    // 0.3% so near-DC response stays accurate for objects filling the FOV
    return 16 * p;
}

int BasisSet::bin_of(int offset) const {
    for (int b = 0; b < n_b(); ++b) {
        const Bin& bin = bins[static_cast<size_t>(b)];
        if (offset >= bin.start && offset < bin.start + bin.width)
            return b;
    }
    return -1;
}

BasisSet expbin_basis(int n_det, int n_l) {
    if (n_det < 2)
        throw std::invalid_argument("expbin_basis: n_det must be >= 2");
    if (n_l < 1 || n_l > n_det / 2)
        throw std::invalid_argument("expbin_basis: need 1 <= n_l <= n_det/2");
    BasisSet basis;
    basis.n_det = n_det;
    basis.n_l = n_l;
    const int max_offset = n_det / 2;
    int start = 0;
    int index = 1;
    while (start <= max_offset) {
        int width = index < n_l ? 1 : 1 << (index - n_l);
        width = std::min(width, max_offset - start + 1); // truncate at the edge
        basis.bins.push_back({start, width});
        start += width;
        ++index;
    }
    return basis;
}

BasisSet dense_basis(int n_det) {
    if (n_det < 2)
        throw std::invalid_argument("dense_basis: n_det must be >= 2");
    BasisSet basis;
    basis.n_det = n_det;
    basis.n_l = 0;
    for (int off = 0; off <= n_det / 2; ++off)
        basis.bins.push_back({off, 1});
    return basis;
}

FilterSpec::FilterSpec(int n_det, Basis basis, int n_l,
                       std::vector<double> coeffs, bool zero_dc)
    : n_det_(n_det), basis_(basis), n_l_(n_l), coeffs_(std::move(coeffs)),
      zero_dc_(zero_dc) {
    if (n_det_ < 1)
        throw std::invalid_argument("FilterSpec: n_det must be >= 1");
    if (basis_ == Basis::Dense) {
        if (static_cast<int>(coeffs_.size()) != n_det_)
            throw std::invalid_argument("FilterSpec: dense coeffs must have length n_det");
    } else {
        const BasisSet set = expbin_basis(n_det_, n_l_);
        if (static_cast<int>(coeffs_.size()) != set.n_b())
            throw std::invalid_argument("FilterSpec: expbin coeffs must match bin count");
    }
    for (double c : coeffs_)
        if (!std::isfinite(c))
            throw std::invalid_argument("FilterSpec: coefficients must be finite");

    // derive the half-spectrum from the symmetrized real-space taps
    const int pad = padded_length(n_det_);
    const std::vector<double> taps = real_taps();
    std::vector<double> buf(static_cast<size_t>(pad), 0.0);
    buf[0] = taps[0];
    for (int t = 1; t < static_cast<int>(taps.size()) && t <= pad / 2; ++t) {
        buf[static_cast<size_t>(t)] += taps[static_cast<size_t>(t)];
        buf[static_cast<size_t>(pad - t)] += taps[static_cast<size_t>(t)];
    }
    std::vector<std::complex<double>> spec(static_cast<size_t>(pad / 2 + 1));
    fft::rfft(static_cast<size_t>(pad), buf.data(), spec.data());
    fourier_.resize(spec.size());
    for (size_t k = 0; k < spec.size(); ++k)
        fourier_[k] = spec[k].real(); // imag is zero by symmetry
}

FilterSpec FilterSpec::from_basis(const BasisSet& basis, std::vector<double> coeffs,
                                  bool zero_dc) {
    return FilterSpec(basis.n_det, basis.dense() ? Basis::Dense : Basis::ExpBin,
                      basis.n_l,
                      basis.dense()
                          ? [&] {
                                // dense basis spans lags 0..n_det/2; pad with
                                // zero taps up to the stored length n_det
                                std::vector<double> taps(static_cast<size_t>(basis.n_det), 0.0);
                                for (size_t i = 0; i < coeffs.size() && i < taps.size(); ++i)
                                    taps[i] = coeffs[i];
                                return taps;
                            }()
                          : std::move(coeffs),
                      zero_dc);
}

FilterSpec FilterSpec::with_zero_dc(bool flag) const {
    return FilterSpec(n_det_, basis_, n_l_, coeffs_, flag);
}

std::vector<double> FilterSpec::real_taps() const {
    std::vector<double> taps(static_cast<size_t>(n_det_), 0.0);
    if (basis_ == Basis::Dense) {
        taps = coeffs_;
    } else {
        const BasisSet set = expbin_basis(n_det_, n_l_);
        for (int b = 0; b < set.n_b(); ++b) {
            const auto& bin = set.bins[static_cast<size_t>(b)];
            for (int off = bin.start; off < bin.start + bin.width; ++off)
                if (off < n_det_)
                    taps[static_cast<size_t>(off)] = coeffs_[static_cast<size_t>(b)];
        }
    }
    return taps;
}

FilterSpec standard_filter(std::string_view name, int n_det) {
    if (n_det < 2)
        throw std::invalid_argument("standard_filter: n_det must be >= 2");
    const int pad = padded_length(n_det);
    std::vector<std::complex<double>> spec(static_cast<size_t>(pad / 2 + 1));
    for (int k = 0; k <= pad / 2; ++k) {
        const double w = static_cast<double>(k) / pad; // cycles per sample
        double v;
        if (name == "ram-lak") {
            v = w;
        } else if (name == "shepp-logan") {
            // |w| * sinc(w / (2 * w_N)), w_N = 1/2
            v = k == 0 ? 0.0 : w * std::sin(kPi * w) / (kPi * w);
        } else {
            throw std::invalid_argument("standard_filter: unknown name '" +
                                        std::string(name) + "'");
        }
        spec[static_cast<size_t>(k)] = v;
    }
    std::vector<double> taps(static_cast<size_t>(pad));
    fft::irfft(static_cast<size_t>(pad), spec.data(), taps.data());
    taps.resize(static_cast<size_t>(n_det));
    return FilterSpec(n_det, FilterSpec::Basis::Dense, 0, std::move(taps));
}

Sinogram apply_filter(const Sinogram& p, const FilterSpec& h) {
    const int nd = p.geom.n_det();
    if (h.n_det() != nd)
        throw std::invalid_argument("apply_filter: filter length does not match sinogram");
    const int pad = padded_length(nd);
    const int nh = pad / 2 + 1;
    std::vector<double> spectrum = h.fourier();
    if (h.zero_dc())
        spectrum[0] = 0.0;
    Sinogram out(p.geom);
#pragma omp parallel
    {
        std::vector<double> buf(static_cast<size_t>(pad));
        std::vector<std::complex<double>> spec(static_cast<size_t>(nh));
#pragma omp for schedule(static)
        for (int a = 0; a < p.geom.n_angles(); ++a) {
            std::fill(buf.begin(), buf.end(), 0.0);
            const double* src = p.row(a);
            std::copy(src, src + nd, buf.begin());
            fft::rfft(static_cast<size_t>(pad), buf.data(), spec.data());
            for (int k = 0; k < nh; ++k)
                spec[static_cast<size_t>(k)] *= spectrum[static_cast<size_t>(k)];
            fft::irfft(static_cast<size_t>(pad), spec.data(), buf.data());
            std::copy(buf.begin(), buf.begin() + nd, out.row(a));
        }
    }
    return out;
}

Sinogram apply_ramp_unpadded(const Sinogram& p) {
    const int nd = p.geom.n_det();
    const int nh = nd / 2 + 1;
    Sinogram out(p.geom);
#pragma omp parallel
    {
        std::vector<double> buf(static_cast<size_t>(nd));
        std::vector<std::complex<double>> spec(static_cast<size_t>(nh));
#pragma omp for schedule(static)
        for (int a = 0; a < p.geom.n_angles(); ++a) {
            const double* src = p.row(a);
            std::copy(src, src + nd, buf.begin());
            fft::rfft(static_cast<size_t>(nd), buf.data(), spec.data());
            for (int k = 0; k < nh; ++k)
                spec[static_cast<size_t>(k)] *= static_cast<double>(k) / nd;
            fft::irfft(static_cast<size_t>(nd), spec.data(), buf.data());
            std::copy(buf.begin(), buf.begin() + nd, out.row(a));
        }
    }
    return out;
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double parse_decimal(const json& j, const fs::path& origin) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw format_error(origin.string() + ": bad decimal string '" + s + "'");
        return v;
    }
    if (j.is_number())
        return j.get<double>();
    throw format_error(origin.string() + ": expected number or decimal string");
}

} // namespace

void write_filter(const std::filesystem::path& path, const FilterSpec& h,
                  const FilterProvenance& prov) {
    json j;
    j["n_det"] = h.n_det();
    json basis;
    if (h.basis() == FilterSpec::Basis::ExpBin) {
        basis["type"] = "expbin";
        basis["n_l"] = h.n_l();
    } else {
        basis["type"] = "dense";
    }
    j["basis"] = std::move(basis);
    json coeffs = json::array();
    for (double c : h.coeffs())
        coeffs.push_back(format_double(c));
    j["coeffs"] = std::move(coeffs);
    j["zero_dc"] = h.zero_dc();
    json p;
    p["implementation"] = prov.implementation;
    p["n_angles"] = prov.n_angles;
    if (prov.seed)
        p["seed"] = *prov.seed;
    j["provenance"] = std::move(p);

    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw io_error("cannot open for writing: " + tmp.string());
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

FilterSpec read_filter(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open for reading: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw format_error(path.string() + ": " + e.what());
    }
    try {
        const int n_det = j.at("n_det").get<int>();
        const std::string type = j.at("basis").at("type").get<std::string>();
        std::vector<double> coeffs;
        for (const auto& c : j.at("coeffs"))
            coeffs.push_back(parse_decimal(c, path));
        const bool zero_dc = j.value("zero_dc", false);
        if (type == "expbin") {
            const int n_l = j.at("basis").at("n_l").get<int>();
            return FilterSpec(n_det, FilterSpec::Basis::ExpBin, n_l,
                              std::move(coeffs), zero_dc);
        }
        if (type == "dense")
            return FilterSpec(n_det, FilterSpec::Basis::Dense, 0,
                              std::move(coeffs), zero_dc);
        throw format_error(path.string() + ": unknown basis type '" + type + "'");
    } catch (const json::exception& e) {
        throw format_error(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

} // namespace tomo
