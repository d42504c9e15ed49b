#include "nnlab/rng.hpp"

#include <cmath>

namespace nnlab {

namespace {

constexpr std::uint64_t PHILOX_M0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t PHILOX_M1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t PHILOX_W0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t PHILOX_W1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b,
                             std::uint64_t* hi) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    *hi = static_cast<std::uint64_t>(p >> 64);
    return static_cast<std::uint64_t>(p);
}

} // namespace

std::array<std::uint64_t, 4> philox4x64_10(
    const std::array<std::uint64_t, 2>& key,
    const std::array<std::uint64_t, 4>& ctr) {
    std::uint64_t k0 = key[0], k1 = key[1];
    std::array<std::uint64_t, 4> x = ctr;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, hi1;
        std::uint64_t lo0 = mulhilo(PHILOX_M0, x[0], &hi0);
        std::uint64_t lo1 = mulhilo(PHILOX_M1, x[2], &hi1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += PHILOX_W0;
        k1 += PHILOX_W1;
    }
    return x;
}

rng_stream::rng_stream(std::uint64_t base_seed, rng_domain domain,
                       std::uint64_t trial, std::uint32_t attempt)
    : pos_(4), gauss_spare_(0.0), have_spare_(false) {
    st_.key = {base_seed, (static_cast<std::uint64_t>(domain) << 56) |
                              ((trial & 0xffffffffffffULL) << 8) |
                              (attempt & 0xffu)};
    st_.ctr = {0, 0, 0, 0};
}

void rng_stream::refill() {
    buf_ = philox4x64_10(st_.key, st_.ctr);
    if (++st_.ctr[0] == 0) ++st_.ctr[1];
    pos_ = 0;
}

std::uint64_t rng_stream::next_u64() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

void rng_stream::fill_u64(std::uint64_t* out, std::size_t n) {
    std::size_t i = 0;
    while (pos_ < 4 && i < n) out[i++] = buf_[pos_++];
    while (n - i >= 4) {
        auto blk = philox4x64_10(st_.key, st_.ctr);
        if (++st_.ctr[0] == 0) ++st_.ctr[1];
        out[i] = blk[0];
        out[i + 1] = blk[1];
        out[i + 2] = blk[2];
        out[i + 3] = blk[3];
        i += 4;
    }
    while (i < n) out[i++] = next_u64();
}

double rng_stream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double rng_stream::next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double rng_stream::next_exp() { return -std::log1p(-next_unit()); }

double rng_stream::next_gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return gauss_spare_;
    }
    double u1 = next_unit_pos();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    gauss_spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t rng_stream::next_below(std::uint64_t n) {
    // Rejection on the top of the range keeps the draw exactly uniform.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x <= limit) return x % n;
    }
}

std::uint64_t rng_stream::next_poisson(double mean) {
    if (mean < 10.0) {
        // Inversion by multiplication of uniforms.
        double l = std::exp(-mean);
        double p = 1.0;
        std::uint64_t k = 0;
        do {
            p *= next_unit_pos();
            if (p <= l) return k;
            ++k;
        } while (k < 1000000);
        return k;
    }
    // Hormann's PTRS transformed-rejection sampler.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = next_unit() - 0.5;
        double v = next_unit_pos();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(kf);
    }
}

void rng_stream::next_direction(int d, double* dir) {
    if (d == 1) {
        dir[0] = next_unit() < 0.5 ? -1.0 : 1.0;
        return;
    }
    for (;;) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            dir[j] = next_gauss();
            s += dir[j] * dir[j];
        }
        if (s > 1e-300) {
            double inv = 1.0 / std::sqrt(s);
            for (int j = 0; j < d; ++j) dir[j] *= inv;
            return;
        }
    }
}

} // namespace nnlab
