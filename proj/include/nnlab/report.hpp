// Result serialization (CSV and JSON lines, with reproducibility headers)
// and the estimate-vs-bound comparison report.
#pragma once

#include "nnlab/bounds.hpp"
#include "nnlab/estimators.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnlab {

struct run_header {
    std::string version;
    std::uint64_t base_seed = 0;
    std::uint64_t config_hash = 0;
    std::string rng;
};

std::uint64_t fnv1a(const std::string& text);

// "# ..." comment lines carrying version, seed, config hash, rng family.
std::string header_lines(const run_header& h);

// Probabilities at 6 significant digits; integers verbatim; unused
// parameter cells empty.
std::string estimates_csv(const std::vector<estimate_result>& rows,
                          const run_header& h);
std::string estimates_jsonl(const std::vector<estimate_result>& rows,
                            const run_header& h);

// One row per curve point:
// quantity,d,argument,bound,log_bound,r_star_or_theta_star,K_d_used.
std::string bounds_csv(const std::vector<bound_curve>& curves,
                       const run_header& h);
std::string bounds_jsonl(const std::vector<bound_curve>& curves,
                         const run_header& h);

struct bound_row {
    std::string quantity;
    int d = 0;
    double argument = 0.0;
    double bound = 0.0;
    double log_bound = 0.0;
    double param = 0.0; // 0 when the curve has no r*/theta*
    int K_used = 0;     // 0 when no kissing constant enters
};

std::vector<estimate_result> parse_estimates_csv(const std::string& text);
std::vector<bound_row> parse_bounds_csv(const std::string& text);

struct grid_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct report_row {
    std::string quantity;
    int d = 0;
    double argument = 0.0; // L, n, or k
    double estimate = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    // upper: flag when estimate - 3 SE > reference
    // lower: flag when estimate + 3 SE < reference (resolved rows only)
    // oracle: flag when |estimate - reference| > 3 SE
    // limit: informational, never flagged
    std::string kind;
    double margin_sigma = 0.0; // (estimate - reference) / SE, +inf/-inf safe
    bool flagged = false;
};

struct report_result {
    std::vector<report_row> rows;
    std::uint64_t n_flagged = 0;
    std::string csv;
    std::string summary; // plain-text digest
};

// Joins TAU rows against TAU_UPPER/TAU_LOWER, RHO against RHO_UPPER,
// G(k=1) against the mutual-NN closed form, and G against G_LIMIT
// (informational). Throws grid_mismatch when a quantity present on both
// sides cannot be joined on (d, argument).
report_result build_report(const std::vector<estimate_result>& estimates,
                           const std::vector<bound_row>& bounds);

} // namespace nnlab
