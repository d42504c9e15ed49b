// AVX2 kernel variants. Four slots per iteration; the per-slot operation
// sequence (abs, min-fold, fma) maps 1:1 onto the scalar reference, and lane
// reduction runs in ascending slot order, so results are bit-identical.
#include "nnlab/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace nnlab::kernels {

namespace {

inline double torus_d2_one(const double* coords, std::size_t n, std::size_t i,
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

inline __m256d torus_d2_quad(const double* coords, std::size_t n,
                             std::size_t i, const double* q, int d,
                             double side) {
    const __m256d absmask =
        _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d vside = _mm256_set1_pd(side);
    __m256d acc = _mm256_setzero_pd();
    for (int j = 0; j < d; ++j) {
        __m256d x = _mm256_loadu_pd(&coords[static_cast<std::size_t>(j) * n + i]);
        __m256d dx = _mm256_and_pd(_mm256_sub_pd(_mm256_set1_pd(q[j]), x), absmask);
        __m256d alt = _mm256_sub_pd(vside, dx);
        dx = _mm256_min_pd(alt, dx); // a<b?a:b with src1=alt matches dx<alt?dx:alt
        acc = _mm256_fmadd_pd(dx, dx, acc);
    }
    return acc;
}

void nn_scan_avx2(const double* coords, const std::uint32_t* orig,
                  std::size_t n, std::size_t begin, std::size_t end,
                  const double* q, int d, double side, std::uint32_t skip,
                  double* best_d2, std::uint32_t* best_idx) {
    double bd = *best_d2;
    std::uint32_t bi = *best_idx;
    std::size_t i = begin;
    alignas(32) double lane[4];
    for (; i + 4 <= end; i += 4) {
        _mm256_store_pd(lane, torus_d2_quad(coords, n, i, q, d, side));
        for (int l = 0; l < 4; ++l) {
            std::uint32_t oi = orig[i + static_cast<std::size_t>(l)];
            if (oi == skip) continue;
            double d2 = lane[l];
            if (d2 < bd || (d2 == bd && oi < bi)) {
                bd = d2;
                bi = oi;
            }
        }
    }
    for (; i < end; ++i) {
        std::uint32_t oi = orig[i];
        if (oi == skip) continue;
        double d2 = torus_d2_one(coords, n, i, q, d, side);
        if (d2 < bd || (d2 == bd && oi < bi)) {
            bd = d2;
            bi = oi;
        }
    }
    *best_d2 = bd;
    *best_idx = bi;
}

std::size_t count_equal_avx2(const double* coords, const std::uint32_t* orig,
                             std::size_t n, std::size_t begin, std::size_t end,
                             const double* q, int d, double side,
                             std::uint32_t skip, double target_d2) {
    std::size_t c = 0;
    std::size_t i = begin;
    alignas(32) double lane[4];
    for (; i + 4 <= end; i += 4) {
        _mm256_store_pd(lane, torus_d2_quad(coords, n, i, q, d, side));
        for (int l = 0; l < 4; ++l) {
            if (orig[i + static_cast<std::size_t>(l)] == skip) continue;
            if (lane[l] == target_d2) ++c;
        }
    }
    for (; i < end; ++i) {
        if (orig[i] == skip) continue;
        if (torus_d2_one(coords, n, i, q, d, side) == target_d2) ++c;
    }
    return c;
}

// Exact u64 (< 2^53 after the shift) to double via two 32-bit halves and the
// 2^52 bias trick; fma recombination is exact, matching the scalar cast path.
void u64_scale_avx2(const std::uint64_t* in, double* out, std::size_t n,
                    double scale) {
    const __m256i lomask = _mm256_set1_epi64x(0xffffffffLL);
    const __m256i bias = _mm256_set1_epi64x(0x4330000000000000LL);
    const __m256d bias_d = _mm256_castsi256_pd(bias);
    const __m256d two32 = _mm256_set1_pd(4294967296.0);
    const __m256d scl = _mm256_set1_pd(scale);
    const __m256d p53 = _mm256_set1_pd(0x1.0p-53);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i y = _mm256_srli_epi64(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&in[i])), 11);
        __m256i lo = _mm256_and_si256(y, lomask);
        __m256i hi = _mm256_srli_epi64(y, 32);
        __m256d lod = _mm256_sub_pd(
            _mm256_castsi256_pd(_mm256_or_si256(lo, bias)), bias_d);
        __m256d hid = _mm256_sub_pd(
            _mm256_castsi256_pd(_mm256_or_si256(hi, bias)), bias_d);
        __m256d v = _mm256_fmadd_pd(hid, two32, lod);
        _mm256_storeu_pd(&out[i], _mm256_mul_pd(_mm256_mul_pd(v, p53), scl));
    }
    for (; i < n; ++i) {
        std::uint64_t y = in[i] >> 11;
        double hi = static_cast<double>(y >> 32);
        double lo = static_cast<double>(y & 0xffffffffu);
        double v = std::fma(hi, 4294967296.0, lo);
        out[i] = (v * 0x1.0p-53) * scale;
    }
}

} // namespace

const kernel_table avx2_table = {"avx2", nn_scan_avx2, count_equal_avx2,
                                 u64_scale_avx2};

} // namespace nnlab::kernels
