// Bit-equivalence of every compiled distance kernel against the scalar
// reference, including crafted ties and duplicate points.
#include <doctest.h>

#include "nnlab/kernels.hpp"
#include "nnlab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace nnlab;

namespace {

struct scan_case {
    int d;
    double side;
    std::vector<double> coords; // coordinate-major
    std::vector<std::uint32_t> orig;
    std::size_t n;
};

scan_case random_case(int d, std::size_t n, double side, std::uint64_t seed) {
    scan_case c;
    c.d = d;
    c.side = side;
    c.n = n;
    c.coords.resize(std::size_t(d) * n);
    c.orig.resize(n);
    rng_stream rng(seed, rng_domain::test, 0);
    for (std::size_t i = 0; i < n; ++i) {
        c.orig[i] = std::uint32_t(i);
        for (int j = 0; j < d; ++j)
            c.coords[std::size_t(j) * n + i] = rng.next_unit() * side;
    }
    return c;
}

} // namespace

TEST_CASE("kernel equivalence on random configurations") {
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);
    REQUIRE(n_tables >= 1);

    std::uint64_t seed = 900;
    for (const int d : {1, 2, 3, 5, 10}) {
        for (const std::size_t n : {std::size_t(2), std::size_t(5),
                                    std::size_t(33), std::size_t(257)}) {
            const scan_case c = random_case(d, n, 8.0, seed++);
            for (std::size_t qi = 0; qi < c.n; ++qi) {
                std::vector<double> q(c.d);
                for (int j = 0; j < c.d; ++j)
                    q[j] = c.coords[std::size_t(j) * c.n + qi];

                double ref_d2 = 1e300;
                std::uint32_t ref_idx = UINT32_MAX;
                kernels::scalar_table.nn_scan(c.coords.data(), c.orig.data(),
                                              c.n, 0, c.n, q.data(), c.d,
                                              c.side, std::uint32_t(qi),
                                              &ref_d2, &ref_idx);
                for (std::size_t t = 0; t < n_tables; ++t) {
                    double d2 = 1e300;
                    std::uint32_t idx = UINT32_MAX;
                    tables[t]->nn_scan(c.coords.data(), c.orig.data(), c.n, 0,
                                       c.n, q.data(), c.d, c.side,
                                       std::uint32_t(qi), &d2, &idx);
                    CHECK(d2 == ref_d2);
                    CHECK(idx == ref_idx);
                }
            }
        }
    }
}

TEST_CASE("tie handling: equal distances resolve to the smaller index in "
          "every kernel") {
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);

    // Four points at the corners of a square around the query plus two
    // exact duplicates: all tie candidates at the same d2.
    const int d = 2;
    const std::size_t n = 6;
    const double side = 100.0;
    // coordinate-major: xs then ys
    const std::vector<double> coords = {
        1.0, 3.0, 1.0, 3.0, 1.0, 1.0, // x
        1.0, 1.0, 3.0, 3.0, 1.0, 3.0, // y
    };
    const std::vector<std::uint32_t> orig = {0, 1, 2, 3, 4, 5};
    const double q[2] = {2.0, 2.0};

    for (std::size_t t = 0; t < n_tables; ++t) {
        double d2 = 1e300;
        std::uint32_t idx = UINT32_MAX;
        tables[t]->nn_scan(coords.data(), orig.data(), n, 0, n, q, d, side,
                           UINT32_MAX, &d2, &idx);
        CHECK(d2 == 2.0);
        CHECK(idx == 0);
        const std::size_t ties = tables[t]->count_equal(
            coords.data(), orig.data(), n, 0, n, q, d, side, UINT32_MAX, d2);
        CHECK(ties == 6);
    }
}

TEST_CASE("tie handling survives slot permutation") {
    // The lexicographic (d2, original index) rule must make the result
    // independent of storage order, which is what the grid relies on.
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);

    const int d = 1;
    const std::size_t n = 4;
    const double side = 10.0;
    const double q[1] = {5.0};
    const std::vector<double> coords_a = {4.0, 6.0, 4.0, 6.0};
    const std::vector<std::uint32_t> orig_a = {0, 1, 2, 3};
    const std::vector<double> coords_b = {6.0, 4.0, 6.0, 4.0};
    const std::vector<std::uint32_t> orig_b = {3, 2, 1, 0};

    for (std::size_t t = 0; t < n_tables; ++t) {
        double d2a = 1e300, d2b = 1e300;
        std::uint32_t ia = UINT32_MAX, ib = UINT32_MAX;
        tables[t]->nn_scan(coords_a.data(), orig_a.data(), n, 0, n, q, d,
                           side, UINT32_MAX, &d2a, &ia);
        tables[t]->nn_scan(coords_b.data(), orig_b.data(), n, 0, n, q, d,
                           side, UINT32_MAX, &d2b, &ib);
        CHECK(d2a == d2b);
        CHECK(ia == 0);
        CHECK(ib == 0);
    }
}

TEST_CASE("wraparound distances match direct evaluation") {
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);

    const int d = 2;
    const std::size_t n = 2;
    const double side = 10.0;
    // Point near one corner, query near the opposite corner: the torus
    // image is much closer than the direct separation.
    const std::vector<double> coords = {0.25, 5.0, 0.5, 5.0};
    const std::vector<std::uint32_t> orig = {0, 1};
    const double q[2] = {9.75, 9.5};

    const double dx = 0.5;  // wrap in x: |9.75 - 0.25| -> 0.5
    const double dy = 1.0;  // wrap in y: |9.5 - 0.5| -> 1.0
    const double want = std::fma(dy, dy, std::fma(dx, dx, 0.0));

    for (std::size_t t = 0; t < n_tables; ++t) {
        double d2 = 1e300;
        std::uint32_t idx = UINT32_MAX;
        tables[t]->nn_scan(coords.data(), orig.data(), n, 0, n, q, d, side,
                           UINT32_MAX, &d2, &idx);
        CHECK(idx == 0);
        CHECK(d2 == want);
    }
}

TEST_CASE("u64_scale is the same bit pattern in every kernel") {
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);

    std::vector<std::uint64_t> in(1027);
    rng_stream rng(17, rng_domain::test, 1);
    rng.fill_u64(in.data(), in.size());
    in[0] = 0;
    in[1] = UINT64_MAX;
    in[2] = 1ull << 11;

    std::vector<double> ref(in.size());
    kernels::scalar_table.u64_scale(in.data(), ref.data(), in.size(), 7.25);
    CHECK(ref[0] == 0.0);
    CHECK(ref[1] < 7.25);          // strictly below scale
    CHECK(ref[1] > 7.25 * 0.9999);
    CHECK(ref[2] == 7.25 * 0x1.0p-53); // smallest nonzero step

    for (std::size_t t = 0; t < n_tables; ++t) {
        std::vector<double> out(in.size());
        tables[t]->u64_scale(in.data(), out.data(), in.size(), 7.25);
        for (std::size_t i = 0; i < in.size(); ++i)
            CHECK(out[i] == ref[i]);
    }
}

TEST_CASE("chained span scans equal one full scan") {
    // The in-out (best_d2, best_idx) contract: scanning [0,k) then [k,n)
    // must land on the same winner as [0,n).
    std::size_t n_tables = 0;
    const kernels::kernel_table* const* tables =
        kernels::compiled_tables(&n_tables);

    const scan_case c = random_case(3, 101, 5.0, 4242);
    const double q[3] = {2.5, 2.5, 2.5};
    for (std::size_t t = 0; t < n_tables; ++t) {
        double full_d2 = 1e300;
        std::uint32_t full_idx = UINT32_MAX;
        tables[t]->nn_scan(c.coords.data(), c.orig.data(), c.n, 0, c.n, q,
                           c.d, c.side, UINT32_MAX, &full_d2, &full_idx);
        for (const std::size_t k : {std::size_t(1), std::size_t(50),
                                    std::size_t(100)}) {
            double d2 = 1e300;
            std::uint32_t idx = UINT32_MAX;
            tables[t]->nn_scan(c.coords.data(), c.orig.data(), c.n, 0, k, q,
                               c.d, c.side, UINT32_MAX, &d2, &idx);
            tables[t]->nn_scan(c.coords.data(), c.orig.data(), c.n, k, c.n,
                               q, c.d, c.side, UINT32_MAX, &d2, &idx);
            CHECK(d2 == full_d2);
            CHECK(idx == full_idx);
        }
    }
}
