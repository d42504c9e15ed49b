// Scalar reference kernels. These define the semantics; SIMD variants must
// reproduce them bit for bit.
#include "nnlab/kernels.hpp"

#include <cmath>

namespace nnlab::kernels {

namespace {

// Torus squared distance, one slot. Fold order per coordinate: dx = |q - x|,
// dx = min(dx, side - dx) with min(a,b) = a < b ? a : b, acc = fma(dx, dx, acc).
inline double torus_d2(const double* coords, std::size_t n, std::size_t i,
                       const double* q, int d, double side) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
        double dx = std::fabs(q[j] - coords[static_cast<std::size_t>(j) * n + i]);
        double alt = side - dx;
        dx = dx < alt ? dx : alt;
        acc = std::fma(dx, dx, acc);
    }
    return acc;
}

void nn_scan_scalar(const double* coords, const std::uint32_t* orig,
                    std::size_t n, std::size_t begin, std::size_t end,
                    const double* q, int d, double side, std::uint32_t skip,
                    double* best_d2, std::uint32_t* best_idx) {
    double bd = *best_d2;
    std::uint32_t bi = *best_idx;
    for (std::size_t i = begin; i < end; ++i) {
        std::uint32_t oi = orig[i];
        if (oi == skip) continue;
        double d2 = torus_d2(coords, n, i, q, d, side);
        if (d2 < bd || (d2 == bd && oi < bi)) {
            bd = d2;
            bi = oi;
        }
    }
    *best_d2 = bd;
    *best_idx = bi;
}

std::size_t count_equal_scalar(const double* coords, const std::uint32_t* orig,
                               std::size_t n, std::size_t begin,
                               std::size_t end, const double* q, int d,
                               double side, std::uint32_t skip,
                               double target_d2) {
    std::size_t c = 0;
    for (std::size_t i = begin; i < end; ++i) {
        if (orig[i] == skip) continue;
        if (torus_d2(coords, n, i, q, d, side) == target_d2) ++c;
    }
    return c;
}

void u64_scale_scalar(const std::uint64_t* in, double* out, std::size_t n,
                      double scale) {
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t y = in[i] >> 11;
        // Exact 53-bit integer to double via split halves; matches the SIMD
        // magic-number conversion exactly (both sums are exact).
        double hi = static_cast<double>(y >> 32);
        double lo = static_cast<double>(y & 0xffffffffu);
        double v = std::fma(hi, 4294967296.0, lo);
        out[i] = (v * 0x1.0p-53) * scale;
    }
}

} // namespace

const kernel_table scalar_table = {"scalar", nn_scan_scalar,
                                   count_equal_scalar, u64_scale_scalar};

} // namespace nnlab::kernels
