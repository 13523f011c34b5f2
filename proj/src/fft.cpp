#include "fft.hpp"

#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace tomo::fft {

namespace {

enum class Kind { R2C, C2R, C2C_FWD, C2C_BWD, C2C2D_BWD };

std::mutex plan_mutex;
std::map<std::pair<Kind, size_t>, fftw_plan>& plan_cache() {
    static std::map<std::pair<Kind, size_t>, fftw_plan> cache;
    return cache;
}

fftw_plan get_plan(Kind kind, size_t n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(kind, n);
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    const size_t csize = (kind == Kind::C2C2D_BWD) ? n * n : n + 1;
    std::vector<double> rbuf(n);
    std::vector<fftw_complex> cbuf(csize);
    switch (kind) {
    case Kind::R2C:
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf.data(),
                                    cbuf.data(), flags);
        break;
    case Kind::C2R:
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), cbuf.data(),
                                    rbuf.data(), flags);
        break;
    case Kind::C2C_FWD:
        plan = fftw_plan_dft_1d(static_cast<int>(n), cbuf.data(), cbuf.data(),
                                FFTW_FORWARD, flags);
        break;
    case Kind::C2C_BWD:
        plan = fftw_plan_dft_1d(static_cast<int>(n), cbuf.data(), cbuf.data(),
                                FFTW_BACKWARD, flags);
        break;
    case Kind::C2C2D_BWD:
        plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n),
                                cbuf.data(), cbuf.data(), FFTW_BACKWARD, flags);
        break;
    }
    cache.emplace(key, plan);
    return plan;
}

fftw_complex* as_fftw(std::complex<double>* p) {
    return reinterpret_cast<fftw_complex*>(p);
}

} // namespace

void rfft(size_t n, const double* in, std::complex<double>* out) {
    fftw_plan plan = get_plan(Kind::R2C, n);
    fftw_execute_dft_r2c(plan, const_cast<double*>(in), as_fftw(out));
}

void irfft(size_t n, const std::complex<double>* in, double* out) {
    fftw_plan plan = get_plan(Kind::C2R, n);
    // c2r destroys its input; work on a copy
    std::vector<std::complex<double>> tmp(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(plan, as_fftw(tmp.data()), out);
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i)
        out[i] *= scale;
}

void cfft(size_t n, std::complex<double>* data, int sign) {
    fftw_plan plan = get_plan(sign < 0 ? Kind::C2C_FWD : Kind::C2C_BWD, n);
    fftw_execute_dft(plan, as_fftw(data), as_fftw(data));
}

void cfft2_backward(size_t n, std::complex<double>* data) {
    fftw_plan plan = get_plan(Kind::C2C2D_BWD, n);
    fftw_execute_dft(plan, as_fftw(data), as_fftw(data));
}

} // namespace tomo::fft
