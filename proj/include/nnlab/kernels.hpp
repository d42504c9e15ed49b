// Hot-loop kernels with scalar reference and SIMD variants selected at runtime.
//
// All variants of one kernel are bit-identical: same operation order per
// element (|q-x| folded by min(dx, side-dx), then fma accumulation), so the
// dispatch choice never changes any result downstream.
#pragma once

#include <cstddef>
#include <cstdint>

namespace nnlab::kernels {

// Best (squared distance, original index) over coords-SoA positions
// [begin, end), skipping original index `skip`. coords is coordinate-major:
// coords[j * n + i] is coordinate j of slot i; orig[i] maps slot -> original
// point index. Tie rule: strictly smaller d2 wins; equal d2 keeps the smaller
// original index. best_d2/best_idx are in-out so spans can be chained.
using nn_scan_fn = void (*)(const double* coords, const std::uint32_t* orig,
                            std::size_t n, std::size_t begin, std::size_t end,
                            const double* q, int d, double side,
                            std::uint32_t skip, double* best_d2,
                            std::uint32_t* best_idx);

// Count of slots in [begin, end) whose torus d2 equals target exactly,
// skipping original index `skip`. Used to report floating-point ties.
using count_equal_fn = std::size_t (*)(const double* coords,
                                       const std::uint32_t* orig,
                                       std::size_t n, std::size_t begin,
                                       std::size_t end, const double* q, int d,
                                       double side, std::uint32_t skip,
                                       double target_d2);

// out[i] = ((in[i] >> 11) as double) * 2^-53 * scale, i.e. uniform in
// [0, scale) from raw 64-bit words. Both factors applied in that order.
using u64_scale_fn = void (*)(const std::uint64_t* in, double* out,
                              std::size_t n, double scale);

struct kernel_table {
    const char* name;
    nn_scan_fn nn_scan;
    count_equal_fn count_equal;
    u64_scale_fn u64_scale;
};

extern const kernel_table scalar_table;
#if defined(NNLAB_HAVE_AVX2_TU)
extern const kernel_table avx2_table;
#endif

// Active table: AVX2 when the CPU supports it, unless NNLAB_KERNELS
// (values "scalar" or "avx2") overrides. Resolved once, thread-safe.
const kernel_table& active();

// All tables compiled into this binary, for equivalence tests and benchmarks.
const kernel_table* const* compiled_tables(std::size_t* count);

} // namespace nnlab::kernels
