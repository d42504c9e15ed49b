// Directed nearest-neighbor graph over a sample, the origin's component,
// and the structural observables behind every estimated quantity.
#pragma once

#include "nnlab/pointprocess.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nnlab {

struct nn_graph {
    std::vector<std::uint32_t> nn_index;
    std::vector<double> nn_d2;   // squared NN distance (exact kernel output)
    std::vector<double> nn_dist; // sqrt(nn_d2)
    std::vector<std::uint32_t> in_degree;
    // Points whose minimal distance is attained by more than one neighbor
    // (exact floating-point equality); the index rule resolved them.
    std::uint64_t tie_points = 0;
};

// Thrown when a proven structural fact fails (wrong mini-loop count in a
// component). Not recoverable: it means the build is wrong. The trial
// runner attaches the offending sample as JSON so the CLI can dump a
// replayable counterexample.
struct structural_violation : std::runtime_error {
    explicit structural_violation(const std::string& what,
                                  std::string counterexample = {})
        : std::runtime_error(what),
          counterexample_json(std::move(counterexample)) {}
    std::string counterexample_json;
};

// Grid-accelerated build; falls back to full scans for small or degenerate
// windows. Identical output to build_nn_graph_brute on every input.
nn_graph build_nn_graph(const sample& s);

// Full-scan build, kept as oracle and fallback.
nn_graph build_nn_graph_brute(const sample& s);

// Deliberately wrong rule (second-nearest neighbor) used by the check
// command to demonstrate that the structural suite catches violations.
nn_graph build_nn_graph_second_nn(const sample& s);

struct component_info {
    std::vector<std::uint32_t> members; // ascending point indices
    std::pair<std::uint32_t, std::uint32_t> loop_pair; // mutual pair, i < j
    // generation[k] belongs to members[k]; loop members have generation 1.
    std::vector<std::uint32_t> generation;
    double extent;         // max torus norm over members
    double max_nn_dist;    // max NN distance over members (window guard)
    std::uint32_t chain_points;
    std::uint32_t longest_path_points;
    std::uint32_t generation_of_origin;
};

// Connected component of the origin under undirected NN edges, with the
// mini-loop, generations (BFS from both loop vertices), extent, directed
// chain length, and longest simple path through the origin.
// Throws structural_violation if the member set has != 1 mutual-NN pair.
component_info origin_component(const nn_graph& g, const sample& s);

struct chain_result {
    std::uint32_t points_touched;  // distinct points after the origin
    std::vector<double> norms;     // torus norm of each, in visit order
    std::vector<double> step_dist; // edge lengths along the chain
};

// Follow nn_index from the origin until a point repeats (at the mini-loop).
chain_result directed_chain(std::uint32_t origin, const nn_graph& g,
                            const sample& s);

// Longest simple path through `origin` in the component tree (the 2-cycle
// collapsed): 1 + the two largest branch depths, in points.
std::uint32_t longest_path_through(std::uint32_t origin,
                                   const component_info& c, const nn_graph& g);

std::uint32_t max_in_degree(const nn_graph& g);

// Whole-graph structural scan used by the check command and the acceptance
// suite. Every counter other than `components`, `small_components_checked`
// and `max_in_degree` must be zero for a correct build.
struct structure_scan {
    std::uint64_t components = 0;
    std::uint64_t mutual_pair_violations = 0; // components with != 1 pair
    std::uint64_t long_cycles = 0;            // directed cycles, length >= 3
    std::uint64_t chain_increase_events = 0;  // non-loop edge not shrinking
    std::uint64_t orientation_violations = 0; // > 1 direction change on path
    std::uint64_t generation_mismatches = 0;  // BFS generation != chain length
    std::uint64_t small_components_checked = 0;
    std::uint32_t max_in_degree = 0;
};

structure_scan scan_structure(const nn_graph& g, const sample& s,
                              std::uint32_t small_component_cap = 12);

} // namespace nnlab
