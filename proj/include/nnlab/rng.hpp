// Counter-based RNG: Philox4x64-10. A stream is a pure function of
// (base_seed, domain, trial, attempt), so any trial can be regenerated in
// isolation and results cannot depend on worker scheduling.
#pragma once

#include <array>
#include <cstdint>

namespace nnlab {

struct philox_state {
    std::array<std::uint64_t, 2> key;
    std::array<std::uint64_t, 4> ctr;
};

// One 10-round Philox4x64 block. Matches the reference test vectors used in
// tests/test_rng.cpp (cross-generated from an independent implementation).
std::array<std::uint64_t, 4> philox4x64_10(const std::array<std::uint64_t, 2>& key,
                                           const std::array<std::uint64_t, 4>& ctr);

// Logical sub-generators. Keeping domains separate means adding draws to one
// consumer never perturbs another.
enum class rng_domain : std::uint64_t {
    points = 1,     // point-process coordinates and counts
    bounds_mc = 2,  // Monte Carlo helpers in the bounds module
    local = 3,      // infinite-volume local sampler
    test = 4,       // test-only draws
};

class rng_stream {
  public:
    rng_stream(std::uint64_t base_seed, rng_domain domain, std::uint64_t trial,
               std::uint32_t attempt = 0);

    std::uint64_t next_u64();
    // Fills out[0..n) with raw 64-bit words (block-aligned bulk path).
    void fill_u64(std::uint64_t* out, std::size_t n);

    double next_unit();   // [0, 1), 53-bit
    double next_unit_pos(); // (0, 1], for log() safety
    double next_exp();    // standard exponential
    double next_gauss();  // standard normal, Box-Muller pair cached
    // Uniform integer in [0, n), rejection sampled (n >= 1).
    std::uint64_t next_below(std::uint64_t n);
    // Poisson(mean): inversion below 10, transformed rejection (PTRS) above.
    std::uint64_t next_poisson(double mean);
    // Uniform direction on S^{d-1}, written to dir[0..d).
    void next_direction(int d, double* dir);

  private:
    void refill();

    philox_state st_;
    std::array<std::uint64_t, 4> buf_;
    int pos_;
    double gauss_spare_;
    bool have_spare_;
};

} // namespace nnlab
