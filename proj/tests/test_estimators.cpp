// Trial runner and estimators: determinism across workers, window guards,
// bucket bookkeeping, and the serialization / comparison report round trip.
#include <doctest.h>

#include "nnlab/bounds.hpp"
#include "nnlab/estimators.hpp"
#include "nnlab/report.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

using namespace nnlab;
using doctest::Approx;

namespace {

bool same_trials(const trial_set& a, const trial_set& b) {
    if (a.trials.size() != b.trials.size())
        return false;
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        const trial_stats& x = a.trials[i];
        const trial_stats& y = b.trials[i];
        if (x.generation_of_origin != y.generation_of_origin ||
            x.extent != y.extent || x.chain_points != y.chain_points ||
            x.longest_path_points != y.longest_path_points ||
            x.max_in_degree != y.max_in_degree ||
            x.max_nn_dist != y.max_nn_dist ||
            x.chain_norms != y.chain_norms || x.n_points != y.n_points ||
            x.attempts != y.attempts || x.valid != y.valid ||
            x.invalid_reason != y.invalid_reason)
            return false;
    }
    return true;
}

trial_stats loop_trial(double extent) {
    trial_stats t;
    t.generation_of_origin = 1;
    t.chain_points = 1;
    t.extent = extent;
    t.longest_path_points = 2;
    t.max_in_degree = 1;
    t.max_nn_dist = extent;
    t.chain_norms = {extent};
    t.n_points = 2;
    t.valid = true;
    return t;
}

trial_set manual_set(std::vector<trial_stats> trials, double side) {
    trial_set set;
    set.config.d = 2;
    set.config.n_trials = trials.size();
    set.side_used = side;
    set.has_component_observables = true;
    set.trials = std::move(trials);
    return set;
}

} // namespace

TEST_CASE("runs are deterministic and worker-count independent") {
    run_config cfg;
    cfg.d = 2;
    cfg.n_trials = 400;
    cfg.base_seed = 77;
    const trial_set a = run_trials(cfg);
    const trial_set b = run_trials(cfg);
    CHECK(same_trials(a, b));

    run_config wide = cfg;
    wide.workers = 4;
    const trial_set c = run_trials(wide);
    CHECK(same_trials(a, c));
    CHECK(a.side_used == c.side_used);
}

TEST_CASE("config validation") {
    run_config cfg;
    cfg.n_trials = 0;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
    cfg.n_trials = 10;
    cfg.d = 0;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
    cfg.d = 2;
    cfg.workers = 0;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
    cfg.workers = 1;
    cfg.max_redoubles = -1;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
}

TEST_CASE("worker errors propagate to the caller") {
    run_config cfg;
    cfg.d = 1;
    cfg.side = 1.2; // expected count below the sampler's minimum
    cfg.n_trials = 8;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
    cfg.workers = 4;
    CHECK_THROWS_AS((void)run_trials(cfg), std::invalid_argument);
}

TEST_CASE("torus trials satisfy the component invariants") {
    run_config cfg;
    cfg.d = 2;
    cfg.n_trials = 2000;
    cfg.base_seed = 4242;
    const trial_set set = run_trials(cfg);
    REQUIRE(set.trials.size() == 2000);
    CHECK(set.has_component_observables);
    CHECK(set.side_used == Approx(default_side(2)));
    CHECK(set.n_valid() + set.n_invalid() == 2000);
    CHECK(set.n_invalid() <= 5); // redoubling absorbs the window guards

    for (const auto& t : set.trials) {
        if (!t.valid) {
            CHECK(!t.invalid_reason.empty());
            continue;
        }
        const double side = set.side_used * std::pow(2.0, t.attempts);
        CHECK(t.generation_of_origin == t.chain_points);
        CHECK(t.chain_norms.size() == t.chain_points);
        CHECK(t.longest_path_points >= t.chain_points + 1);
        CHECK(t.extent <= side / 4.0 + 1e-12);
        CHECK(t.max_nn_dist <= side / 8.0 + 1e-12);
        CHECK(t.n_points >= 2);
        CHECK(t.attempts <= std::uint32_t(cfg.max_redoubles));
    }
}

TEST_CASE("small windows redouble until the guards pass") {
    run_config cfg;
    cfg.d = 2;
    cfg.side = 3.0;
    cfg.n_trials = 300;
    cfg.base_seed = 99;
    const trial_set set = run_trials(cfg);
    CHECK(set.side_used == 3.0);
    std::uint64_t redoubled = 0;
    for (const auto& t : set.trials)
        redoubled += t.valid && t.attempts > 0;
    CHECK(redoubled > 0);
}

TEST_CASE("generation buckets partition the valid trials") {
    run_config cfg;
    cfg.d = 2;
    cfg.n_trials = 2000;
    cfg.base_seed = 4242;
    const trial_set set = run_trials(cfg);

    const auto rows = estimate_g(set, 3);
    REQUIRE(rows.size() == 4);
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        CHECK(r.quantity == (i < 3 ? "G" : "G_TAIL"));
        CHECK(r.param_k == std::int64_t(i) + 1);
        CHECK(r.d == 2);
        CHECK(r.estimate >= 0.0);
        CHECK(r.estimate <= 1.0);
        CHECK(r.ci_low <= r.estimate + 1e-12);
        CHECK(r.ci_high >= r.estimate - 1e-12);
        CHECK(r.n_trials == 2000);
        sum += r.estimate;
    }
    CHECK(sum == 1.0); // the tail bucket is the exact complement

    // The mini-loop frequency has a closed form.
    const double p = mutual_nn_prob(2);
    CHECK(std::abs(rows[0].estimate - p) < 4.0 * rows[0].std_error);

    CHECK_THROWS_AS((void)estimate_g(set, 0), std::invalid_argument);
}

TEST_CASE("degenerate bucket layouts") {
    const trial_set all_loops =
        manual_set({loop_trial(0.5), loop_trial(0.6), loop_trial(0.7)}, 100.0);
    const auto rows = estimate_g(all_loops, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].estimate == 1.0);
    CHECK(rows[0].std_error == 0.0);
    CHECK(rows[0].ci_high == 1.0);
    CHECK(rows[0].ci_low < 1.0);
    CHECK(rows[1].estimate == 0.0);
    CHECK(rows[2].estimate == 0.0);

    // Invalid trials are excluded, and an all-invalid set cannot estimate.
    trial_stats bad;
    bad.valid = false;
    bad.invalid_reason = "undersized realization";
    trial_set mixed = manual_set({loop_trial(0.5), bad, bad}, 100.0);
    const auto mixed_rows = estimate_g(mixed, 1);
    CHECK(mixed_rows[0].estimate == 1.0);
    CHECK(mixed_rows[0].n_trials == 3);
    CHECK(mixed_rows[0].n_invalid == 2);

    trial_set hopeless = manual_set({bad, bad}, 100.0);
    CHECK_THROWS_AS((void)estimate_g(hopeless, 1), std::invalid_argument);
}

TEST_CASE("extent and path tails count exactly") {
    std::vector<trial_stats> trials;
    for (int i = 1; i <= 10; ++i) {
        trial_stats t = loop_trial(0.1 * double(i));
        t.longest_path_points = 2 + (i % 3); // 2, 3, or 4
        trials.push_back(t);
    }
    const trial_set set = manual_set(std::move(trials), 100.0);

    const auto tau = estimate_tau(set, {0.0, 0.45, 0.95});
    REQUIRE(tau.size() == 3);
    CHECK(tau[0].quantity == "TAU");
    CHECK(tau[0].estimate == 1.0);
    CHECK(tau[1].estimate == Approx(0.6));
    CHECK(tau[2].estimate == Approx(0.1));
    CHECK(tau[0].param_L == 0.0);
    CHECK(tau[1].param_L == 0.45);

    const auto rho = estimate_rho(set, {1, 2, 3});
    REQUIRE(rho.size() == 3);
    CHECK(rho[0].quantity == "RHO");
    CHECK(rho[0].estimate == 1.0);               // every path has >= 2 points
    CHECK(rho[1].estimate == Approx(7.0 / 10.0)); // paths of 3 or 4 points
    CHECK(rho[2].estimate == Approx(3.0 / 10.0));
    CHECK(rho[1].param_n == 2);

    // The chain event is never more likely than the extent event.
    const estimate_result p = estimate_p(set, 1, 0.45);
    CHECK(p.quantity == "P");
    CHECK(p.estimate == Approx(0.6));
    CHECK(p.estimate <= tau[1].estimate + 1e-15);

    CHECK_THROWS_AS((void)estimate_tau(set, {-0.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_tau(set, {25.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_rho(set, {0}), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_p(set, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_p(set, 1, -1.0), std::invalid_argument);
}

TEST_CASE("local-sampler sets expose chain quantities only") {
    run_config cfg;
    cfg.d = 10;
    cfg.n_trials = 2000;
    cfg.base_seed = 11;
    cfg.sampler = sampler_kind::local;
    const trial_set set = run_trials(cfg);
    CHECK_FALSE(set.has_component_observables);
    CHECK(set.n_invalid() == 0);

    const auto rows = estimate_g(set, 3);
    const double p = mutual_nn_prob(10);
    CHECK(std::abs(rows[0].estimate - p) < 4.0 * rows[0].std_error);

    CHECK(estimate_p(set, 1, 0.0).estimate == 1.0);
    CHECK_THROWS_AS((void)estimate_tau(set, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_rho(set, {2}), std::invalid_argument);
}

TEST_CASE("wilson interval") {
    const auto none = wilson_interval(0, 10, 0.95);
    CHECK(none.first == 0.0);
    CHECK(none.second > 0.0);
    const auto all = wilson_interval(10, 10, 0.95);
    CHECK(all.first < 1.0);
    CHECK(all.second == 1.0);
    const auto half = wilson_interval(50, 100, 0.95);
    CHECK(half.first == Approx(0.4038315304).epsilon(1e-9));
    CHECK(half.second == Approx(0.5961684696).epsilon(1e-9));
    CHECK(half.first < 0.5);
    CHECK(half.second > 0.5);

    CHECK_THROWS_AS((void)wilson_interval(1, 0, 0.95),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)wilson_interval(5, 4, 0.95),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)wilson_interval(1, 4, 1.0),
                    std::invalid_argument);
}

TEST_CASE("csv round trip preserves every row") {
    run_config cfg;
    cfg.d = 2;
    cfg.n_trials = 500;
    cfg.base_seed = 2024;
    const trial_set set = run_trials(cfg);
    std::vector<estimate_result> rows = estimate_g(set, 2);
    const auto tau = estimate_tau(set, {1.0, 2.0});
    rows.insert(rows.end(), tau.begin(), tau.end());
    const auto rho = estimate_rho(set, {2, 4});
    rows.insert(rows.end(), rho.begin(), rho.end());
    rows.push_back(estimate_p(set, 2, 1.0));

    run_header h;
    h.version = "0.1.0";
    h.base_seed = 2024;
    h.config_hash = fnv1a("estimate d=2");
    h.rng = "philox4x64-10";

    const std::string csv = estimates_csv(rows, h);
    CHECK(csv.find("# seed 2024") != std::string::npos);
    const auto parsed = parse_estimates_csv(csv);
    REQUIRE(parsed.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].quantity == rows[i].quantity);
        CHECK(parsed[i].d == rows[i].d);
        CHECK(parsed[i].param_k == rows[i].param_k);
        CHECK(parsed[i].param_n == rows[i].param_n);
        if (rows[i].param_L >= 0.0)
            CHECK(parsed[i].param_L ==
                  Approx(rows[i].param_L).epsilon(1e-9));
        else
            CHECK(parsed[i].param_L == -1.0); // sentinel survives the trip
        CHECK(parsed[i].estimate ==
              Approx(rows[i].estimate).epsilon(1e-5).scale(1.0));
        CHECK(parsed[i].std_error ==
              Approx(rows[i].std_error).epsilon(1e-5).scale(1.0));
        CHECK(parsed[i].n_trials == rows[i].n_trials);
        CHECK(parsed[i].n_invalid == rows[i].n_invalid);
        CHECK(parsed[i].base_seed == rows[i].base_seed);
    }

    CHECK_THROWS((void)parse_estimates_csv("quantity,bad\nG,2\n"));
}

TEST_CASE("bound curves survive their csv round trip") {
    const kissing_table kt = kissing_table::defaults();
    bound_curve tau_upper;
    tau_upper.quantity = "TAU_UPPER";
    tau_upper.d = 2;
    tau_upper.K_used = kt.K(2);
    for (const double L : {1.0, 2.0}) {
        const tail_bound tb = compound_tail_bound(2, L, kt);
        tau_upper.points.push_back({L, tb.bound, tb.log_bound, tb.r_star});
    }
    bound_curve g_limit;
    g_limit.quantity = "G_LIMIT";
    g_limit.d = 2;
    g_limit.K_used = 0;
    g_limit.points.push_back(
        {1.0, leading_term(1), std::log(leading_term(1)), 0.0});

    run_header h;
    h.version = "0.1.0";
    h.rng = "philox4x64-10";
    const std::string csv = bounds_csv({tau_upper, g_limit}, h);
    const auto parsed = parse_bounds_csv(csv);
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0].quantity == "TAU_UPPER");
    CHECK(parsed[0].d == 2);
    CHECK(parsed[0].argument == 1.0);
    CHECK(parsed[0].bound == 1.0);
    CHECK(parsed[0].K_used == 6);
    CHECK(parsed[1].param > 0.0);
    CHECK(parsed[2].quantity == "G_LIMIT");
    CHECK(parsed[2].K_used == 0);
    CHECK(parsed[2].bound == Approx(0.5));
}

TEST_CASE("comparison report joins, flags, and refuses bad grids") {
    // Consistent data: nothing may be flagged.
    run_config cfg;
    cfg.d = 2;
    cfg.n_trials = 2000;
    cfg.base_seed = 31415;
    const trial_set set = run_trials(cfg);
    std::vector<estimate_result> est = estimate_g(set, 2);
    const auto tau = estimate_tau(set, {1.0, 2.0});
    est.insert(est.end(), tau.begin(), tau.end());
    const auto rho = estimate_rho(set, {2, 4});
    est.insert(est.end(), rho.begin(), rho.end());

    const kissing_table kt = kissing_table::defaults();
    std::vector<bound_row> bounds;
    for (const double L : {1.0, 2.0}) {
        const tail_bound tb = compound_tail_bound(2, L, kt);
        bounds.push_back(
            {"TAU_UPPER", 2, L, tb.bound, tb.log_bound, tb.r_star, tb.K_used});
    }
    const envelope_result env = lower_envelope(2, 2.0);
    bounds.push_back(
        {"TAU_LOWER", 2, 2.0, env.bound, env.log_bound, env.theta_star, 0});
    for (const std::uint64_t n : {2, 4}) {
        bounds.push_back({"RHO_UPPER", 2, double(n), rho_upper(2, n, kt),
                          rho_upper_log(2, n, kt), 0.0, kt.K(2)});
    }
    for (const int k : {1, 2}) {
        bounds.push_back({"G_LIMIT", 2, double(k), leading_term(k),
                          std::log(leading_term(k)), 0.0, 0});
    }

    const report_result rep = build_report(est, bounds);
    CHECK(rep.n_flagged == 0);
    CHECK(rep.rows.size() >= est.size()); // G(1) joins twice: oracle + limit
    bool saw_oracle = false, saw_limit = false, saw_upper = false;
    for (const auto& row : rep.rows) {
        CHECK_FALSE(row.flagged);
        if (row.kind == "oracle") {
            saw_oracle = true;
            CHECK(row.reference == Approx(mutual_nn_prob(2)));
            CHECK(std::abs(row.margin_sigma) < 4.0);
        }
        saw_limit = saw_limit || row.kind == "limit";
        saw_upper = saw_upper || row.kind == "upper";
    }
    CHECK(saw_oracle);
    CHECK(saw_limit);
    CHECK(saw_upper);
    CHECK(rep.csv.find("quantity,") != std::string::npos);
    CHECK(!rep.summary.empty());

    // Inconsistent estimates get flagged in the right directions.
    std::vector<estimate_result> fake;
    estimate_result g1;
    g1.quantity = "G";
    g1.d = 2;
    g1.param_k = 1;
    g1.estimate = 0.9; // far above the mutual-NN closed form
    g1.std_error = 0.001;
    g1.n_trials = 1000000;
    fake.push_back(g1);
    estimate_result t1;
    t1.quantity = "TAU";
    t1.d = 2;
    t1.param_L = 2.0;
    t1.estimate = 1e-6; // resolved, yet far below the lower envelope
    t1.std_error = 1e-7;
    t1.n_trials = 100000000;
    fake.push_back(t1);
    std::vector<bound_row> fake_bounds;
    fake_bounds.push_back({"TAU_UPPER", 2, 2.0, 1e-8, std::log(1e-8), 1.0, 6});
    fake_bounds.push_back({"TAU_LOWER", 2, 2.0, 1e-3, std::log(1e-3), 0.5, 0});
    const report_result flagged = build_report(fake, fake_bounds);
    CHECK(flagged.n_flagged == 3); // oracle, upper, and lower all fire
    for (const auto& row : flagged.rows)
        CHECK(row.flagged);

    // Same estimate, too few trials to resolve the lower comparison.
    fake[1].estimate = 1e-6;
    fake[1].std_error = 1e-3;
    fake[1].n_trials = 1000;
    fake_bounds[0].bound = 1.0; // put the upper bound out of the way
    fake_bounds[0].log_bound = 0.0;
    const report_result soft = build_report(fake, fake_bounds);
    std::uint64_t lower_flags = 0;
    for (const auto& row : soft.rows)
        lower_flags += row.kind == "lower" && row.flagged;
    CHECK(lower_flags == 0);

    // A bound grid that misses an estimated argument cannot be reported.
    std::vector<estimate_result> est_l3 = {fake[1]};
    est_l3[0].param_L = 3.0;
    CHECK_THROWS_AS((void)build_report(est_l3, fake_bounds), grid_mismatch);
}
