// nnlab command line: estimation campaigns, bound curves, the structural
// check suite, and estimate-vs-bound reports.
//
// Exit codes: 0 success, 2 configuration error, 3 invariant or acceptance
// violation (with a replayable counterexample dump where applicable).
#include "nnlab/bounds.hpp"
#include "nnlab/estimators.hpp"
#include "nnlab/geometry.hpp"
#include "nnlab/localsampler.hpp"
#include "nnlab/nngraph.hpp"
#include "nnlab/pointprocess.hpp"
#include "nnlab/report.hpp"
#include "nnlab/rng.hpp"
#include "nnlab/special.hpp"
#include "nnlab/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_violation = 3;

// Expected point count above which a torus campaign is refused; the local
// sampler covers high dimensions instead.
constexpr double max_expected_points = 3.0e5;

struct cli_options {
    std::vector<int> dims;
    std::uint64_t trials = 0;
    bool trials_given = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    double side = 0.0;
    int g_kmax = 8;
    std::string L_grid_str;
    std::string n_grid_str;
    int theta_grid = 16;
    std::string kissing_str;
    std::string sampler_str = "auto";
    std::string format = "csv";
    std::string out_dir;
    std::string mutate;
    std::string replay_file;
    std::string estimates_file;
    std::string bounds_file;
};

// "v", "a:b" (step 1) or "a:b:c"; endpoints included within half a step.
std::vector<double> parse_grid(const std::string& text) {
    if (text.empty())
        return {};
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument("grid: bad number '" + tok + "'");
        parts.push_back(v);
    }
    if (parts.size() == 1)
        return parts;
    if (parts.size() > 3)
        throw std::invalid_argument("grid: expected start:stop:step");
    const double start = parts[0];
    const double stop = parts[1];
    const double step = parts.size() == 3 ? parts[2] : 1.0;
    if (!(step > 0.0) || stop < start)
        throw std::invalid_argument("grid: need stop >= start and step > 0");
    std::vector<double> out;
    for (double v = start; v <= stop + step / 2.0; v += step)
        out.push_back(v);
    return out;
}

std::vector<std::uint64_t> parse_int_grid(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const double v : parse_grid(text)) {
        const auto n = static_cast<std::int64_t>(std::llround(v));
        if (n < 1 || std::fabs(v - double(n)) > 1e-9)
            throw std::invalid_argument("grid: expected integers >= 1");
        if (out.empty() || out.back() != std::uint64_t(n))
            out.push_back(std::uint64_t(n));
    }
    return out;
}

nnlab::kissing_table parse_kissing(const std::string& text) {
    auto kt = nnlab::kissing_table::defaults();
    if (text.empty())
        return kt;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("kissing: expected d=K pairs");
        kt.set(std::stoi(tok.substr(0, eq)),
               std::stoi(tok.substr(eq + 1)));
    }
    return kt;
}

std::uint64_t env_seed_fallback(const cli_options& opt) {
    if (opt.seed_given)
        return opt.seed;
    if (const char* env = std::getenv("NNLAB_SEED"))
        return std::stoull(env);
    return 0;
}

std::string canonical_config(const std::string& command,
                             const cli_options& opt, std::uint64_t seed) {
    std::ostringstream s;
    s << command;
    for (const int d : opt.dims)
        s << " d=" << d;
    s << " trials=" << opt.trials << " seed=" << seed
      << " side=" << opt.side << " gkmax=" << opt.g_kmax << " L="
      << opt.L_grid_str << " n=" << opt.n_grid_str << " thetagrid="
      << opt.theta_grid << " kissing=" << opt.kissing_str << " sampler="
      << opt.sampler_str << " mutate=" << opt.mutate << " replay="
      << opt.replay_file;
    return s.str();
}

nnlab::run_header make_header(const std::string& command,
                              const cli_options& opt, std::uint64_t seed) {
    nnlab::run_header h;
    h.version = nnlab::version_string;
    h.base_seed = seed;
    h.config_hash = nnlab::fnv1a(canonical_config(command, opt, seed));
    h.rng = nnlab::rng_family;
    return h;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    std::cerr << "wrote " << path.string() << "\n";
}

nnlab::sampler_kind pick_sampler(const cli_options& opt, int d, bool* ok) {
    *ok = true;
    if (opt.sampler_str == "torus")
        return nnlab::sampler_kind::torus;
    if (opt.sampler_str == "local")
        return nnlab::sampler_kind::local;
    if (opt.sampler_str == "auto")
        return d <= 5 ? nnlab::sampler_kind::torus
                      : nnlab::sampler_kind::local;
    *ok = false;
    return nnlab::sampler_kind::torus;
}

int cmd_estimate(const cli_options& opt) {
    const std::uint64_t seed = env_seed_fallback(opt);
    if (!opt.trials_given || opt.trials == 0) {
        std::cerr << "estimate: --trials must be >= 1\n";
        return exit_config;
    }
    std::vector<double> L_grid;
    std::vector<std::uint64_t> n_grid;
    try {
        L_grid = parse_grid(opt.L_grid_str);
        n_grid = parse_int_grid(opt.n_grid_str);
    } catch (const std::exception& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return exit_config;
    }
    if (opt.g_kmax < 1) {
        std::cerr << "estimate: --g-kmax must be >= 1\n";
        return exit_config;
    }

    const nnlab::run_header header = make_header("estimate", opt, seed);
    std::vector<nnlab::estimate_result> all;
    for (const int d : opt.dims) {
        bool sampler_ok = true;
        nnlab::run_config cfg;
        cfg.d = d;
        cfg.n_trials = opt.trials;
        cfg.base_seed = seed;
        cfg.side = opt.side;
        cfg.workers = opt.workers;
        cfg.sampler = pick_sampler(opt, d, &sampler_ok);
        if (!sampler_ok) {
            std::cerr << "estimate: unknown sampler '" << opt.sampler_str
                      << "'\n";
            return exit_config;
        }
        if (cfg.sampler == nnlab::sampler_kind::torus) {
            const double side =
                cfg.side > 0.0 ? cfg.side : nnlab::default_side(d);
            const double expected = std::pow(side, double(d));
            if (expected > max_expected_points) {
                std::cerr << "estimate: expected point count "
                          << std::scientific << expected
                          << " exceeds the torus budget; use --sampler "
                             "local or a smaller --side\n";
                return exit_config;
            }
        }
        if (cfg.sampler == nnlab::sampler_kind::local &&
            (!L_grid.empty() || !n_grid.empty())) {
            std::cerr << "estimate: extent (--L) and path (--n) campaigns "
                         "need the torus sampler at d="
                      << d << "\n";
            return exit_config;
        }

        try {
            const nnlab::trial_set set = nnlab::run_trials(cfg);
            for (auto& r : nnlab::estimate_g(set, opt.g_kmax))
                all.push_back(std::move(r));
            if (!L_grid.empty())
                for (auto& r : nnlab::estimate_tau(set, L_grid))
                    all.push_back(std::move(r));
            if (!n_grid.empty())
                for (auto& r : nnlab::estimate_rho(set, n_grid))
                    all.push_back(std::move(r));
            if (!L_grid.empty() && !n_grid.empty())
                for (const auto n : n_grid)
                    for (const double L : L_grid)
                        all.push_back(nnlab::estimate_p(set, n, L));
        } catch (const nnlab::structural_violation& v) {
            std::cerr << "structural violation: " << v.what() << "\n";
            if (!v.counterexample_json.empty()) {
                const std::string dir =
                    opt.out_dir.empty() ? "." : opt.out_dir;
                write_file(dir, "counterexample.json",
                           v.counterexample_json);
            }
            return exit_violation;
        } catch (const std::exception& e) {
            std::cerr << "estimate: " << e.what() << "\n";
            return exit_config;
        }
    }

    const std::string csv = nnlab::estimates_csv(all, header);
    const std::string jsonl = nnlab::estimates_jsonl(all, header);
    if (opt.format == "json")
        std::cout << nnlab::header_lines(header) << jsonl;
    else
        std::cout << csv;
    if (!opt.out_dir.empty()) {
        write_file(opt.out_dir, "estimates.csv", csv);
        write_file(opt.out_dir, "estimates.jsonl", jsonl);
    }
    return exit_ok;
}

int cmd_bounds(const cli_options& opt) {
    const std::uint64_t seed = env_seed_fallback(opt);
    nnlab::kissing_table kt;
    std::vector<double> L_grid;
    std::vector<std::uint64_t> n_grid;
    try {
        kt = parse_kissing(opt.kissing_str);
        L_grid = opt.L_grid_str.empty() ? parse_grid("1:10:1")
                                        : parse_grid(opt.L_grid_str);
        n_grid = opt.n_grid_str.empty() ? parse_int_grid("2:40:2")
                                        : parse_int_grid(opt.n_grid_str);
    } catch (const std::exception& e) {
        std::cerr << "bounds: " << e.what() << "\n";
        return exit_config;
    }
    if (opt.theta_grid < 1 || opt.g_kmax < 1) {
        std::cerr << "bounds: --theta-grid and --g-kmax must be >= 1\n";
        return exit_config;
    }

    const nnlab::run_header header = make_header("bounds", opt, seed);
    std::vector<nnlab::bound_curve> curves;
    for (const int d : opt.dims) {
        if (!kt.has(d)) {
            std::cerr << "bounds: no kissing constant for d=" << d
                      << "; supply --kissing " << d << "=K\n";
            return exit_config;
        }
        nnlab::bound_curve upper{"TAU_UPPER", d, kt.K(d), {}};
        nnlab::bound_curve lower{"TAU_LOWER", d, 0, {}};
        for (const double L : L_grid) {
            if (L <= 0.0) {
                std::cerr << "bounds: --L values must be > 0\n";
                return exit_config;
            }
            const nnlab::tail_bound tb =
                nnlab::compound_tail_bound(d, L, kt);
            upper.points.push_back({L, tb.bound, tb.log_bound, tb.r_star});
            if (L >= 2.0) {
                const nnlab::envelope_result env =
                    nnlab::lower_envelope(d, L, opt.theta_grid);
                lower.points.push_back(
                    {L, env.bound, env.log_bound, env.theta_star});
            }
        }
        nnlab::bound_curve rho{"RHO_UPPER", d, kt.K(d), {}};
        for (const auto n : n_grid)
            rho.points.push_back({double(n), nnlab::rho_upper(d, n, kt),
                                  nnlab::rho_upper_log(d, n, kt), 0.0});
        curves.push_back(std::move(upper));
        curves.push_back(std::move(lower));
        curves.push_back(std::move(rho));

        nnlab::bound_curve limit{"G_LIMIT", d, 0, {}};
        for (int k = 1; k <= opt.g_kmax; ++k) {
            const double v = nnlab::leading_term(k);
            limit.points.push_back({double(k), v, std::log(v), 0.0});
        }
        curves.push_back(std::move(limit));
    }

    const std::string csv = nnlab::bounds_csv(curves, header);
    if (opt.format == "json")
        std::cout << nnlab::header_lines(header)
                  << nnlab::bounds_jsonl(curves, header);
    else
        std::cout << csv;
    if (!opt.out_dir.empty())
        write_file(opt.out_dir, "bounds.csv", csv);
    return exit_ok;
}

// One Kolmogorov-Smirnov distance against a closed-form CDF.
double ks_distance(std::vector<double> xs,
                   const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        ks = std::max(ks, std::fabs(F - double(i) / n));
        ks = std::max(ks, std::fabs(double(i + 1) / n - F));
    }
    return ks;
}

int cmd_check(const cli_options& opt) {
    const std::uint64_t seed = env_seed_fallback(opt);
    const std::uint64_t trials = opt.trials_given ? opt.trials : 1000;
    if (trials == 0) {
        std::cerr << "check: --trials must be >= 1\n";
        return exit_config;
    }
    const bool mutate = opt.mutate == "second_nn";
    if (!opt.mutate.empty() && !mutate) {
        std::cerr << "check: unknown mutation '" << opt.mutate << "'\n";
        return exit_config;
    }
    const nnlab::run_header header = make_header("check", opt, seed);
    std::cout << nnlab::header_lines(header);

    auto build = [&](const nnlab::sample& s) {
        return mutate ? nnlab::build_nn_graph_second_nn(s)
                      : nnlab::build_nn_graph(s);
    };

    bool all_ok = true;
    std::string counterexample;

    // Replay mode: load one sample, run the full pipeline on it.
    if (!opt.replay_file.empty()) {
        std::ifstream in(opt.replay_file, std::ios::binary);
        if (!in) {
            std::cerr << "check: cannot read " << opt.replay_file << "\n";
            return exit_config;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            const nnlab::sample s = nnlab::sample_from_json(buf.str());
            const nnlab::nn_graph g = build(s);
            const nnlab::structure_scan scan = nnlab::scan_structure(g, s);
            const bool ok = scan.mutual_pair_violations == 0 &&
                            scan.long_cycles == 0 &&
                            scan.chain_increase_events == 0 &&
                            scan.orientation_violations == 0 &&
                            scan.generation_mismatches == 0;
            std::cout << (ok ? "PASS" : "FAIL") << " replay "
                      << opt.replay_file << " components="
                      << scan.components << " violations="
                      << scan.mutual_pair_violations + scan.long_cycles +
                             scan.chain_increase_events +
                             scan.orientation_violations +
                             scan.generation_mismatches
                      << "\n";
            return ok ? exit_ok : exit_violation;
        } catch (const std::exception& e) {
            std::cerr << "check: replay failed: " << e.what() << "\n";
            return exit_config;
        }
    }

    // Structural suite over fresh trials.
    for (const int d : opt.dims) {
        nnlab::structure_scan total;
        std::uint64_t n_done = 0;
        const double side = opt.side > 0.0 ? opt.side
                                           : nnlab::default_side(d);
        if (std::pow(side, double(d)) > max_expected_points) {
            std::cerr << "check: window too large at d=" << d << "\n";
            return exit_config;
        }
        for (std::uint64_t t = 0; t < trials; ++t) {
            const nnlab::window_spec w{d, side, 2};
            const nnlab::seed_spec sp{seed, t, 0};
            nnlab::sample s;
            try {
                s = nnlab::sample_palm(w, sp);
            } catch (const nnlab::undersized_sample&) {
                continue;
            }
            const nnlab::nn_graph g = build(s);
            const nnlab::structure_scan scan = nnlab::scan_structure(g, s);
            total.components += scan.components;
            total.mutual_pair_violations += scan.mutual_pair_violations;
            total.long_cycles += scan.long_cycles;
            total.chain_increase_events += scan.chain_increase_events;
            total.orientation_violations += scan.orientation_violations;
            total.generation_mismatches += scan.generation_mismatches;
            total.small_components_checked += scan.small_components_checked;
            total.max_in_degree =
                std::max(total.max_in_degree, scan.max_in_degree);
            ++n_done;
            const bool bad = scan.mutual_pair_violations ||
                             scan.long_cycles ||
                             scan.chain_increase_events ||
                             scan.orientation_violations ||
                             scan.generation_mismatches;
            if (bad && counterexample.empty())
                counterexample = nnlab::sample_to_json(s, sp);
        }
        const std::uint64_t violations =
            total.mutual_pair_violations + total.long_cycles +
            total.chain_increase_events + total.orientation_violations +
            total.generation_mismatches;
        const bool ok = violations == 0;
        all_ok = all_ok && ok;
        std::cout << (ok ? "PASS" : "FAIL") << " structure d=" << d
                  << " trials=" << n_done << " components="
                  << total.components << " pair_violations="
                  << total.mutual_pair_violations << " long_cycles="
                  << total.long_cycles << " chain_increases="
                  << total.chain_increase_events << " orientation="
                  << total.orientation_violations << " generation="
                  << total.generation_mismatches << " max_in_degree="
                  << total.max_in_degree << "\n";
    }

    // Distributional identities (skipped under mutation: the graph rule
    // does not affect them, and the point is to fail fast above).
    if (!mutate) {
        {
            // Void probability: P(|NN(origin)| > r) = exp(-pi_2 r^2).
            const int d = 2;
            const double side = nnlab::default_side(d);
            const std::uint64_t n = std::max<std::uint64_t>(trials, 2000);
            std::vector<double> y;
            y.reserve(n);
            for (std::uint64_t t = 0; t < n; ++t) {
                nnlab::sample s;
                try {
                    s = nnlab::sample_palm({d, side, 2}, {seed, t, 0});
                } catch (const nnlab::undersized_sample&) {
                    continue;
                }
                const nnlab::nn_graph g = nnlab::build_nn_graph(s);
                const double r = g.nn_dist[s.origin_index];
                y.push_back(nnlab::unit_ball_volume(d) * r * r);
            }
            const double ks = ks_distance(
                y, [](double v) { return 1.0 - std::exp(-v); });
            const double crit = 1.62762 / std::sqrt(double(y.size()));
            const bool ok = ks < crit;
            all_ok = all_ok && ok;
            std::cout << (ok ? "PASS" : "FAIL")
                      << " nn_void_probability d=2 ks=" << ks
                      << " critical=" << crit << "\n";
        }
        {
            // Radial identity: pi_d |W|^d is Exp(1).
            const int d = 3;
            nnlab::rng_stream rng(seed, nnlab::rng_domain::test, 0);
            std::vector<double> y(20000);
            for (auto& v : y) {
                const double w = nnlab::sample_absW(d, rng);
                v = nnlab::unit_ball_volume(d) * std::pow(w, double(d));
            }
            const double ks = ks_distance(
                y, [](double v) { return 1.0 - std::exp(-v); });
            const double crit = 1.62762 / std::sqrt(double(y.size()));
            const bool ok = ks < crit;
            all_ok = all_ok && ok;
            std::cout << (ok ? "PASS" : "FAIL")
                      << " radial_exponential d=3 ks=" << ks
                      << " critical=" << crit << "\n";
        }
        {
            // Compound MGF identity at small r.
            const auto kt = nnlab::kissing_table::defaults();
            const double exact = nnlab::compound_mgf_exact(2, 0.1, kt);
            const nnlab::mc_estimate mc =
                nnlab::compound_mgf_mc(2, 0.1, kt, 200000, seed);
            const double rel = std::fabs(mc.value - exact) / exact;
            const bool ok = rel < 0.01;
            all_ok = all_ok && ok;
            std::cout << (ok ? "PASS" : "FAIL")
                      << " compound_mgf_identity r=0.1 rel_err=" << rel
                      << "\n";
        }
        {
            // Accelerated NN equals brute force.
            std::uint64_t mismatches = 0, configs = 0;
            for (const int d : {1, 2, 3}) {
                for (std::uint64_t t = 0; t < 8; ++t) {
                    const double side =
                        std::pow(120.0 + double(t) * 40.0, 1.0 / double(d));
                    nnlab::sample s;
                    try {
                        s = nnlab::sample_palm({d, side, 2},
                                               {seed ^ 0x9e37, t, 0});
                    } catch (const nnlab::undersized_sample&) {
                        continue;
                    }
                    const auto a = nnlab::build_nn_graph(s);
                    const auto b = nnlab::build_nn_graph_brute(s);
                    if (a.nn_index != b.nn_index)
                        ++mismatches;
                    ++configs;
                }
            }
            const bool ok = mismatches == 0;
            all_ok = all_ok && ok;
            std::cout << (ok ? "PASS" : "FAIL")
                      << " grid_vs_brute configs=" << configs
                      << " mismatches=" << mismatches << "\n";
        }
    }

    if (!all_ok && !counterexample.empty()) {
        const std::string dir = opt.out_dir.empty() ? "." : opt.out_dir;
        write_file(dir, "counterexample.json", counterexample);
        std::cerr << "replay with: nnlab check --replay "
                  << (std::filesystem::path(dir) / "counterexample.json")
                         .string()
                  << (mutate ? " --mutate second_nn" : "") << "\n";
    }
    return all_ok ? exit_ok : exit_violation;
}

int cmd_report(const cli_options& opt) {
    if (opt.estimates_file.empty() || opt.bounds_file.empty()) {
        std::cerr << "report: --estimates and --bounds are required\n";
        return exit_config;
    }
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    try {
        const auto estimates =
            nnlab::parse_estimates_csv(slurp(opt.estimates_file));
        const auto bounds = nnlab::parse_bounds_csv(slurp(opt.bounds_file));
        const nnlab::report_result rep =
            nnlab::build_report(estimates, bounds);
        std::cout << rep.csv << "\n" << rep.summary;
        if (!opt.out_dir.empty())
            write_file(opt.out_dir, "report.csv", rep.csv);
        return rep.n_flagged == 0 ? exit_ok : exit_violation;
    } catch (const nnlab::grid_mismatch& e) {
        std::cerr << "report: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "report: " << e.what() << "\n";
        return exit_config;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nearest-neighbor graph laws on a Poisson process: "
                 "estimators, bounds, checks"};
    app.require_subcommand(1);

    cli_options opt;
    auto add_common = [&](CLI::App* cmd, bool with_campaign) {
        cmd->add_option("--dim", opt.dims, "dimension(s) to run");
        cmd->add_option("--seed", opt.seed, "base seed (env NNLAB_SEED)")
            ->each([&](const std::string&) { opt.seed_given = true; });
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--format", opt.format, "stdout format")
            ->check(CLI::IsMember({"csv", "json"}));
        if (with_campaign) {
            cmd->add_option("--trials", opt.trials, "trials per dimension")
                ->each([&](const std::string&) { opt.trials_given = true; });
            cmd->add_option("--workers", opt.workers, "worker threads")
                ->check(CLI::Range(1, 256));
            cmd->add_option("--side", opt.side, "window side override");
        }
    };

    CLI::App* est = app.add_subcommand("estimate", "Monte Carlo estimates");
    add_common(est, true);
    est->add_option("--g-kmax", opt.g_kmax, "top generation bucket");
    est->add_option("--L", opt.L_grid_str, "extent grid start:stop:step");
    est->add_option("--n", opt.n_grid_str, "path grid start:stop:step");
    est->add_option("--sampler", opt.sampler_str,
                    "auto|torus|local (auto: torus up to d=5)")
        ->check(CLI::IsMember({"auto", "torus", "local"}));

    CLI::App* bnd = app.add_subcommand("bounds", "analytic bound curves");
    add_common(bnd, false);
    bnd->add_option("--g-kmax", opt.g_kmax, "leading-term table size");
    bnd->add_option("--L", opt.L_grid_str, "extent grid start:stop:step");
    bnd->add_option("--n", opt.n_grid_str, "path grid start:stop:step");
    bnd->add_option("--theta-grid", opt.theta_grid,
                    "cone angle grid points in (0, pi/4]");
    bnd->add_option("--kissing", opt.kissing_str,
                    "override table, e.g. 9=272,10=336");

    CLI::App* chk = app.add_subcommand("check", "structural invariant suite");
    add_common(chk, true);
    chk->add_option("--mutate", opt.mutate,
                    "inject a wrong rule (second_nn) to prove detection");
    chk->add_option("--replay", opt.replay_file,
                    "re-run the pipeline on a dumped counterexample");

    CLI::App* rep = app.add_subcommand("report", "join estimates and bounds");
    add_common(rep, false);
    rep->add_option("--estimates", opt.estimates_file, "estimates CSV path");
    rep->add_option("--bounds", opt.bounds_file, "bounds CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (opt.dims.empty()) {
        if (chk->parsed())
            opt.dims = {1, 2, 3};
        else
            opt.dims = {2};
    }
    for (const int d : opt.dims) {
        if (d < 1) {
            std::cerr << "--dim must be >= 1\n";
            return exit_config;
        }
    }

    try {
        if (est->parsed())
            return cmd_estimate(opt);
        if (bnd->parsed())
            return cmd_bounds(opt);
        if (chk->parsed())
            return cmd_check(opt);
        return cmd_report(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
}
