// Throughput comparison of the compiled distance kernels on one NN build.
#include "nnlab/kernels.hpp"
#include "nnlab/pointprocess.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    int d = 2;
    std::uint32_t n = 20000;
    int reps = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--dim"))
            d = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--points"))
            n = std::uint32_t(std::atol(argv[i + 1]));
        else if (!std::strcmp(argv[i], "--reps"))
            reps = std::atoi(argv[i + 1]);
    }

    const double side = std::pow(double(n), 1.0 / double(d));
    nnlab::window_spec w{d, side, 2};
    const nnlab::sample s = nnlab::sample_palm(w, {12345, 0, 0});
    const std::uint32_t m = s.n_points;
    std::printf("bench: d=%d points=%u reps=%d\n", d, m, reps);

    // Coordinate-major layout matching the scan kernels.
    std::vector<double> coords(std::size_t(d) * m);
    std::vector<std::uint32_t> orig(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j)
            coords[std::size_t(j) * m + i] = s.point(i)[j];
        orig[i] = i;
    }

    std::size_t n_tables = 0;
    const nnlab::kernels::kernel_table* const* tables =
        nnlab::kernels::compiled_tables(&n_tables);
    for (std::size_t k = 0; k < n_tables; ++k) {
        const auto& kt = *tables[k];
        double best_time = 1e30;
        std::uint64_t sink = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            for (std::uint32_t i = 0; i < m; ++i) {
                double best_d2 = 1e300;
                std::uint32_t best_idx = UINT32_MAX;
                kt.nn_scan(coords.data(), orig.data(), m, 0, m, s.point(i),
                           d, side, i, &best_d2, &best_idx);
                sink += best_idx;
            }
            const double dt = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            if (dt < best_time)
                best_time = dt;
        }
        const double pairs = double(m) * double(m - 1);
        std::printf("%-8s %8.3f ms  %8.1f Mpairs/s  (sink %llu)\n", kt.name,
                    best_time * 1e3, pairs / best_time / 1e6,
                    static_cast<unsigned long long>(sink));
    }
    return 0;
}
