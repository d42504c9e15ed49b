// Exact infinite-volume sampling of the directed NN chain from the origin.
//
// Points of a unit Poisson process are materialized lazily in growing annuli
// around each query point; candidates falling in the already-explored region
// are discarded (that part of the process is already determined), so the
// materialized set always equals the process restricted to the explored
// region. A nearest-neighbor answer is accepted only once it is closer than
// the explicitly explored radius, hence no unmaterialized point can beat it.
// No window, so no validity flags: chain observables are exact in law.
#pragma once

#include "nnlab/rng.hpp"

#include <cstdint>
#include <vector>

namespace nnlab {

struct local_chain {
    std::uint32_t points_touched; // distinct points after the origin
    std::vector<double> norms;    // Euclidean norm of each chain point
    std::vector<double> step_dist;
    std::uint32_t points_materialized;
};

local_chain sample_chain_infinite(int d, std::uint64_t base_seed,
                                  std::uint64_t trial_index);

} // namespace nnlab
