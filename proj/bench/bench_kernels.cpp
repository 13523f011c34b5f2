// Timing comparison of the OpenMP projection kernels against the serial
// reference implementations.
//
//   bench_kernels [n] [n_angles] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "tomo/kernels.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_ms(int reps, F&& fn) {
    fn(); // warm-up
    const double t0 = now_ms();
    for (int r = 0; r < reps; ++r)
        fn();
    return (now_ms() - t0) / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 256;
    const int n_angles = argc > 2 ? std::atoi(argv[2]) : 64;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 5;

    const Geometry g = make_geometry(n_angles, n, n);
    ImageGrid x(n);
    Sinogram q(g);
    rng::Stream rnd = rng::seed_stream(1);
    for (double& v : x.values)
        v = rnd.next_unit();
    for (double& v : q.values)
        v = rnd.next_unit();

    std::printf("grid %dx%d, %d angles, %d reps, %d threads\n\n", n, n,
                n_angles, reps, omp_get_max_threads());
    std::printf("%-22s %12s %12s %8s\n", "kernel", "serial(ms)", "openmp(ms)",
                "speedup");

    {
        const double ts = time_ms(reps, [&] { forward_project_serial(x, g); });
        const double tp = time_ms(reps, [&] { forward_project(x, g); });
        std::printf("%-22s %12.2f %12.2f %7.2fx\n", "forward strip", ts, tp,
                    ts / tp);
    }
    for (KernelKind kind : {KernelKind::Strip, KernelKind::Line,
                            KernelKind::Joseph, KernelKind::PixelDriven}) {
        const double ts = time_ms(reps, [&] { backproject_serial(kind, q); });
        const double tp = time_ms(reps, [&] { backproject(kind, q); });
        std::printf("backproject %-10s %12.2f %12.2f %7.2fx\n",
                    kernel_name(kind).c_str(), ts, tp, ts / tp);
    }
    return 0;
}
