// Trial loop (with redouble-on-invalid retry policy and optional worker
// threads) and the binomial estimators on top of it.
#include "nnlab/estimators.hpp"

#include "nnlab/localsampler.hpp"
#include "nnlab/special.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nnlab {

std::uint64_t trial_set::n_invalid() const {
    std::uint64_t n = 0;
    for (const auto& t : trials)
        if (!t.valid)
            ++n;
    return n;
}

std::uint64_t trial_set::n_valid() const {
    return trials.size() - n_invalid();
}

namespace {

trial_stats run_torus_trial(const run_config& cfg, double base_side,
                            std::uint64_t trial_index) {
    trial_stats out;
    double side = base_side;
    for (int attempt = 0;; ++attempt) {
        window_spec w{cfg.d, side, 2};
        seed_spec seed{cfg.base_seed, trial_index,
                       static_cast<std::uint32_t>(attempt)};
        out.attempts = static_cast<std::uint32_t>(attempt);
        std::string reason;
        try {
            const sample s = sample_palm(w, seed);
            const nn_graph g = build_nn_graph(s);
            component_info c;
            try {
                c = origin_component(g, s);
            } catch (const structural_violation& v) {
                throw structural_violation(v.what(),
                                           sample_to_json(s, seed));
            }
            out.generation_of_origin = c.generation_of_origin;
            out.extent = c.extent;
            out.chain_points = c.chain_points;
            out.longest_path_points = c.longest_path_points;
            out.max_in_degree = max_in_degree(g);
            out.max_nn_dist = c.max_nn_dist;
            out.n_points = s.n_points;
            const chain_result chain =
                directed_chain(s.origin_index, g, s);
            out.chain_norms = chain.norms;
            if (out.extent > side / 4.0)
                reason = "extent beyond side/4";
            else if (out.max_nn_dist > side / 8.0)
                reason = "nn distance beyond side/8";
        } catch (const undersized_sample&) {
            reason = "undersized realization";
        }
        if (reason.empty()) {
            out.valid = true;
            out.invalid_reason.clear();
            return out;
        }
        if (attempt >= cfg.max_redoubles) {
            out.valid = false;
            out.invalid_reason = reason;
            return out;
        }
        side *= 2.0;
    }
}

trial_stats run_local_trial(const run_config& cfg,
                            std::uint64_t trial_index) {
    const local_chain c =
        sample_chain_infinite(cfg.d, cfg.base_seed, trial_index);
    trial_stats out;
    out.generation_of_origin = c.points_touched;
    out.chain_points = c.points_touched;
    out.chain_norms = c.norms;
    out.n_points = c.points_materialized;
    out.valid = true;
    return out;
}

} // namespace

trial_set run_trials(const run_config& config) {
    if (config.n_trials == 0)
        throw std::invalid_argument("run_trials: n_trials must be >= 1");
    if (config.d < 1)
        throw std::invalid_argument("run_trials: dimension must be >= 1");
    if (config.max_redoubles < 0)
        throw std::invalid_argument("run_trials: max_redoubles must be >= 0");
    if (config.workers < 1)
        throw std::invalid_argument("run_trials: workers must be >= 1");

    trial_set set;
    set.config = config;
    set.side_used =
        config.side > 0.0 ? config.side : default_side(config.d);
    set.has_component_observables = config.sampler == sampler_kind::torus;
    set.trials.resize(config.n_trials);

    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t i =
                next.fetch_add(1, std::memory_order_relaxed);
            if (i >= config.n_trials)
                return;
            try {
                set.trials[i] =
                    config.sampler == sampler_kind::torus
                        ? run_torus_trial(config, set.side_used, i)
                        : run_local_trial(config, i);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_lock);
                if (!first_error)
                    first_error = std::current_exception();
                next.store(config.n_trials, std::memory_order_relaxed);
                return;
            }
        }
    };

    const int n_threads = static_cast<int>(
        std::min<std::uint64_t>(config.workers, config.n_trials));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    set.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return set;
}

namespace {

estimate_result binomial_result(const trial_set& set, std::uint64_t hits,
                                std::uint64_t n_valid) {
    estimate_result r;
    r.d = set.config.d;
    r.n_trials = set.trials.size();
    r.n_invalid = set.trials.size() - n_valid;
    r.base_seed = set.config.base_seed;
    r.wall_time_s = set.wall_time_s;
    const double p = double(hits) / double(n_valid);
    r.estimate = p;
    r.std_error = std::sqrt(p * (1.0 - p) / double(n_valid));
    std::tie(r.ci_low, r.ci_high) = wilson_interval(hits, n_valid, 0.95);
    return r;
}

std::uint64_t require_valid_trials(const trial_set& set, const char* who) {
    std::uint64_t n = set.n_valid();
    if (set.trials.empty() || n == 0)
        throw std::invalid_argument(std::string(who) +
                                    ": no valid trials to aggregate");
    return n;
}

} // namespace

std::vector<estimate_result> estimate_g(const trial_set& set, int k_max) {
    if (k_max < 1)
        throw std::invalid_argument("estimate_g: k_max must be >= 1");
    const std::uint64_t n_valid = require_valid_trials(set, "estimate_g");

    std::vector<std::uint64_t> counts(std::size_t(k_max) + 2, 0);
    for (const auto& t : set.trials) {
        if (!t.valid)
            continue;
        const std::size_t k = t.generation_of_origin;
        ++counts[std::min<std::size_t>(k, std::size_t(k_max) + 1)];
    }
    std::vector<estimate_result> out;
    double partial = 0.0;
    for (int k = 1; k <= k_max + 1; ++k) {
        estimate_result r = binomial_result(set, counts[std::size_t(k)],
                                            n_valid);
        r.quantity = k <= k_max ? "G" : "G_TAIL";
        r.param_k = k;
        if (k <= k_max)
            partial += r.estimate;
        else
            // Complement instead of counts[k]/n (same value to an ulp),
            // so the buckets sum to exactly one in floating point.
            r.estimate = std::max(0.0, 1.0 - partial);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<estimate_result>
estimate_tau(const trial_set& set, const std::vector<double>& L_grid) {
    if (!set.has_component_observables)
        throw std::invalid_argument(
            "estimate_tau: trial set lacks component observables");
    const std::uint64_t n_valid = require_valid_trials(set, "estimate_tau");
    for (const double L : L_grid)
        if (!(L >= 0.0) || L >= set.side_used / 4.0)
            throw std::invalid_argument(
                "estimate_tau: L must lie in [0, side/4) of the smallest "
                "window");
    std::vector<estimate_result> out;
    for (const double L : L_grid) {
        std::uint64_t hits = 0;
        for (const auto& t : set.trials)
            if (t.valid && t.extent > L)
                ++hits;
        estimate_result r = binomial_result(set, hits, n_valid);
        r.quantity = "TAU";
        r.param_L = L;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<estimate_result>
estimate_rho(const trial_set& set, const std::vector<std::uint64_t>& n_grid) {
    if (!set.has_component_observables)
        throw std::invalid_argument(
            "estimate_rho: trial set lacks component observables");
    const std::uint64_t n_valid = require_valid_trials(set, "estimate_rho");
    for (const auto n : n_grid)
        if (n < 1)
            throw std::invalid_argument("estimate_rho: n must be >= 1");
    std::vector<estimate_result> out;
    for (const auto n : n_grid) {
        std::uint64_t hits = 0;
        for (const auto& t : set.trials)
            if (t.valid && t.longest_path_points > n)
                ++hits;
        estimate_result r = binomial_result(set, hits, n_valid);
        r.quantity = "RHO";
        r.param_n = std::int64_t(n);
        out.push_back(std::move(r));
    }
    return out;
}

estimate_result estimate_p(const trial_set& set, std::uint64_t n, double L) {
    if (n < 1)
        throw std::invalid_argument("estimate_p: n must be >= 1");
    if (L < 0.0)
        throw std::invalid_argument("estimate_p: L must be >= 0");
    const std::uint64_t n_valid = require_valid_trials(set, "estimate_p");
    std::uint64_t hits = 0;
    for (const auto& t : set.trials)
        if (t.valid && t.chain_norms.size() >= n &&
            t.chain_norms[std::size_t(n) - 1] > L)
            ++hits;
    estimate_result r = binomial_result(set, hits, n_valid);
    r.quantity = "P";
    r.param_n = std::int64_t(n);
    r.param_L = L;
    return r;
}

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials, double level) {
    if (trials == 0)
        throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (successes > trials)
        throw std::invalid_argument(
            "wilson_interval: successes exceed trials");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("wilson_interval: level must be in (0,1)");
    const double z = inverse_normal_cdf(0.5 + level / 2.0);
    const double n = double(trials);
    const double p = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The endpoints are exact at the degenerate counts; don't let floating
    // point residue put them a hair inside.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi =
        successes == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

} // namespace nnlab
