// Runtime kernel selection: CPU feature detection with env override.
#include "nnlab/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nnlab::kernels {

namespace {

const kernel_table* tables[] = {
    &scalar_table,
#if defined(NNLAB_HAVE_AVX2_TU)
    &avx2_table,
#endif
};

const kernel_table& resolve() {
    const char* want = std::getenv("NNLAB_KERNELS");
    if (want != nullptr) {
        for (const kernel_table* t : tables) {
            if (std::strcmp(t->name, want) == 0) return *t;
        }
        std::fprintf(stderr,
                     "nnlab: NNLAB_KERNELS=%s not available, using scalar\n",
                     want);
        return scalar_table;
    }
#if defined(NNLAB_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_table;
#endif
    return scalar_table;
}

} // namespace

const kernel_table& active() {
    static const kernel_table& chosen = resolve();
    return chosen;
}

const kernel_table* const* compiled_tables(std::size_t* count) {
    *count = sizeof(tables) / sizeof(tables[0]);
    return tables;
}

} // namespace nnlab::kernels
