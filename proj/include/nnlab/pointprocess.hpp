// Palm sampling of a unit-intensity Poisson process (extra point at the
// origin) on a d-dimensional torus, with deterministic per-trial streams.
#pragma once

#include "nnlab/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnlab {

// Realized point count below the window's guard; callers retry with a
// larger window rather than treating this as a hard failure.
struct undersized_sample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct window_spec {
    int d;
    double side;
    // Samples with fewer total points than this are rejected by the caller's
    // retry policy; 2 is the minimum for a nearest neighbor to exist.
    int min_points_guard = 2;
};

struct seed_spec {
    std::uint64_t base_seed;
    std::uint64_t trial_index;
    std::uint32_t attempt = 0;
};

struct sample {
    window_spec window;
    // Row-major: point i occupies coords[i*d .. i*d+d), all in [0, side).
    std::vector<double> coords;
    std::uint32_t n_points;
    std::uint32_t origin_index;

    const double* point(std::uint32_t i) const {
        return coords.data() + static_cast<std::size_t>(i) * window.d;
    }
};

// Window side so that the invalidation guards (side/4 extent, side/8 NN
// distance) fire on at most a few percent of first attempts; in units of the
// typical NN distance (1/pi_d)^{1/d}.
double default_side(int d);

// Poisson(side^d) uniform points plus the origin point appended last.
// Deterministic in (window, seed); throws if the realized count ends below
// window.min_points_guard.
sample sample_palm(const window_spec& window, const seed_spec& seed);

// Euclidean distance with per-coordinate wraparound.
double torus_distance(const double* p, const double* q, const window_spec& w);

// Distance to the origin point (the torus norm).
double torus_norm(const double* p, const window_spec& w);

// Debug dump format: {d, side, seed:{base,trial}, points:[[..],..],
// origin_index}. Round-trips exactly (shortest round-trip double form).
std::string sample_to_json(const sample& s, const seed_spec& seed);
sample sample_from_json(const std::string& text, seed_spec* seed_out = nullptr);

} // namespace nnlab
