// Chernoff machinery, chain lower bound, path-count bound, and the
// generation-law constants.
#include "nnlab/bounds.hpp"

#include "nnlab/geometry.hpp"
#include "nnlab/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nnlab {

kissing_table kissing_table::defaults() {
    kissing_table t;
    t.entries_[1] = {2, "exact"};
    t.entries_[2] = {6, "exact"};
    t.entries_[3] = {12, "exact"};
    t.entries_[4] = {24, "exact"};
    t.entries_[5] = {40, "best known"};
    t.entries_[6] = {72, "best known"};
    t.entries_[7] = {126, "best known"};
    t.entries_[8] = {240, "exact"};
    return t;
}

void kissing_table::set(int d, int K) {
    if (d < 1)
        throw std::invalid_argument("kissing_table: dimension must be >= 1");
    if (K < 2)
        throw std::invalid_argument("kissing_table: K must be >= 2");
    entries_[d] = {K, "user"};
}

bool kissing_table::has(int d) const { return entries_.count(d) != 0; }

int kissing_table::K(int d) const { return entries_.at(d).first; }

const std::string& kissing_table::source(int d) const {
    return entries_.at(d).second;
}

std::vector<int> kissing_table::dims() const {
    std::vector<int> out;
    for (const auto& [d, v] : entries_) {
        (void)v;
        out.push_back(d);
    }
    return out;
}

double sample_absW(int d, rng_stream& rng) {
    // pi_d |W|^d ~ Exp(1), so |W| = (E / pi_d)^{1/d}.
    const double e = rng.next_exp();
    return std::pow(e / unit_ball_volume(d), 1.0 / double(d));
}

double mgf_absW(int d, double r) {
    if (d < 1)
        throw std::invalid_argument("mgf_absW: dimension must be >= 1");
    if (r < 0.0)
        throw std::invalid_argument("mgf_absW: r must be >= 0");
    if (r == 0.0)
        return 1.0;
    // With y = pi_d |W|^d, |W| = (y/pi_d)^{1/d} and y ~ Exp(1):
    //   M(r) = int_0^inf exp(r (y/pi_d)^{1/d} - y) dy.
    // For d = 1 the exponent grows like (r/pi_1 - 1) y = (r/2 - 1) y, so the
    // integral diverges once r >= 2.
    const double vd = unit_ball_volume(d);
    if (d == 1 && r >= 2.0)
        throw std::domain_error("mgf_absW: diverges for d=1, r>=2");
    const double inv_d = 1.0 / double(d);
    auto f = [&](double y) {
        return std::exp(r * std::pow(y / vd, inv_d) - y);
    };
    return integrate_to_inf(f, 0.0, 1e-12);
}

double compound_mgf_exact(int d, double r, const kissing_table& kt) {
    const double twoK = 2.0 * double(kt.K(d));
    return std::exp(twoK * (mgf_absW(d, r) - 1.0));
}

tail_bound compound_tail_bound(int d, double L, const kissing_table& kt) {
    if (L <= 0.0)
        throw std::invalid_argument("compound_tail_bound: L must be > 0");
    if (!kt.has(d))
        throw std::out_of_range("compound_tail_bound: no kissing constant");
    const int K = kt.K(d);
    const double twoK = 2.0 * double(K);
    const double c2 = std::pow(double(K), -1.0 / double(d));
    const double target = c2 * L;

    // Chernoff exponent phi(r) = 2K(M(r)-1) - r c2 L, minimized over r > 0.
    // M is finite for all r except d=1, r>=2, and blows up doubly fast in r
    // for d >= 2, so the minimizer is bracketed before M overflows.
    const double r_cap = (d == 1) ? 2.0 - 1e-9
                                  : std::numeric_limits<double>::infinity();
    auto phi = [&](double lr) {
        const double r = std::exp(lr);
        if (r >= r_cap)
            return std::numeric_limits<double>::infinity();
        double m;
        try {
            m = mgf_absW(d, r);
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(m) || m > 1e290)
            return std::numeric_limits<double>::infinity();
        return twoK * (m - 1.0) - r * target;
    };

    // Bracket: expand upward from lr = -12 until phi turns back up.
    double lo = -12.0, hi = -12.0;
    double prev = phi(lo);
    for (int i = 0; i < 200; ++i) {
        const double next_lr = hi + 0.5;
        const double v = phi(next_lr);
        if (v > prev) {
            hi = next_lr;
            break;
        }
        lo = hi;
        hi = next_lr;
        prev = v;
    }
    const double lr_star = golden_min(phi, lo - 0.5, hi + 0.5, 1e-10);
    const double r_star = std::exp(lr_star);
    const double exponent = phi(lr_star);

    tail_bound out;
    out.K_used = K;
    out.r_star = r_star;
    out.log_bound = twoK + exponent; // e^{2K} prefactor
    out.bound = out.log_bound >= 0.0 ? 1.0 : std::exp(out.log_bound);
    return out;
}

mc_estimate compound_tail_mc(int d, double L, const kissing_table& kt,
                             std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples == 0)
        throw std::invalid_argument("compound_tail_mc: n_samples must be > 0");
    const int K = kt.K(d);
    const double twoK = 2.0 * double(K);
    const double target = std::pow(double(K), -1.0 / double(d)) * L;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        rng_stream rng(seed, rng_domain::bounds_mc, i);
        const std::uint64_t n = rng.next_poisson(twoK);
        double s = 0.0;
        for (std::uint64_t j = 0; j < n && s < target; ++j)
            s += sample_absW(d, rng);
        if (s >= target)
            ++hits;
    }
    mc_estimate out;
    out.n_samples = n_samples;
    out.value = double(hits) / double(n_samples);
    out.std_error =
        std::sqrt(std::max(out.value * (1.0 - out.value), 1e-300) /
                  double(n_samples));
    return out;
}

namespace {

// Poisson pmf in log space, stable for large n.
double log_poisson_pmf(std::uint64_t n, double mu) {
    return double(n) * std::log(mu) - mu - std::lgamma(double(n) + 1.0);
}

} // namespace

mc_estimate compound_mgf_mc(int d, double r, const kissing_table& kt,
                            std::uint64_t n_target, std::uint64_t seed) {
    const double twoK = 2.0 * double(kt.K(d));
    const double m1 = mgf_absW(d, r);

    // Stratify on the Poisson count N. Stratum n contributes
    // P(N=n) E[e^{r S_n}] with S_n a sum of n iid |W|; its per-sample
    // variance is M(2r)^n - M(r)^{2n} when M(2r) exists.
    double m2 = std::numeric_limits<double>::infinity();
    bool have_m2 = true;
    try {
        m2 = mgf_absW(d, 2.0 * r);
        if (!std::isfinite(m2))
            have_m2 = false;
    } catch (const std::domain_error&) {
        have_m2 = false;
    }

    const std::uint64_t n_max = 80;
    if (have_m2 && m2 < 1e280) {
        std::vector<double> pmf(n_max + 1), sd(n_max + 1);
        double total_weight = 0.0;
        for (std::uint64_t n = 0; n <= n_max; ++n) {
            pmf[n] = std::exp(log_poisson_pmf(n, twoK));
            const double var = std::pow(m2, double(n)) -
                               std::pow(m1, 2.0 * double(n));
            sd[n] = std::sqrt(std::max(var, 0.0));
            total_weight += pmf[n] * sd[n];
        }
        std::uint64_t budget = n_target;
        if (budget == 0) {
            // Size for a 0.29% relative SE on the known mean.
            const double mean = std::exp(twoK * (m1 - 1.0));
            double var_sum = 0.0;
            for (std::uint64_t n = 0; n <= n_max; ++n)
                var_sum += pmf[n] * sd[n];
            const double rel = var_sum / mean; // sqrt(total var) upper proxy
            budget = std::uint64_t(
                std::clamp(rel * rel * 1.2e5, 2.0e5, 2.0e7));
        }
        double est = 0.0, var_est = 0.0;
        std::uint64_t used = 0;
        std::uint64_t stream = 0;
        for (std::uint64_t n = 0; n <= n_max; ++n) {
            if (pmf[n] <= 0.0)
                continue;
            std::uint64_t nk;
            if (sd[n] == 0.0 || total_weight == 0.0)
                nk = 2; // deterministic stratum, still sampled for form
            else
                nk = std::max<std::uint64_t>(
                    16, std::uint64_t(double(budget) * pmf[n] * sd[n] /
                                      total_weight));
            if (n == 0) {
                est += pmf[0]; // e^{r*0} = 1 exactly
                continue;
            }
            double sum = 0.0, sumsq = 0.0;
            rng_stream rng(seed, rng_domain::bounds_mc, stream++);
            for (std::uint64_t i = 0; i < nk; ++i) {
                double s = 0.0;
                for (std::uint64_t j = 0; j < n; ++j)
                    s += sample_absW(d, rng);
                const double v = std::exp(r * s);
                sum += v;
                sumsq += v * v;
            }
            const double mean_n = sum / double(nk);
            const double var_n = std::max(
                0.0, sumsq / double(nk) - mean_n * mean_n);
            est += pmf[n] * mean_n;
            var_est += pmf[n] * pmf[n] * var_n / double(nk);
            used += nk;
        }
        mc_estimate out;
        out.value = est;
        out.std_error = std::sqrt(var_est);
        out.n_samples = used;
        return out;
    }

    // Plain Monte Carlo fallback when M(2r) is unavailable: size the run
    // from a trimmed relative-variance guess and accept the longer wall
    // time.
    std::uint64_t n = n_target;
    if (n == 0)
        n = 4000000;
    double sum = 0.0, sumsq = 0.0;
    rng_stream rng(seed, rng_domain::bounds_mc, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t cnt = rng.next_poisson(twoK);
        double s = 0.0;
        for (std::uint64_t j = 0; j < cnt; ++j)
            s += sample_absW(d, rng);
        const double v = std::exp(r * s);
        sum += v;
        sumsq += v * v;
    }
    mc_estimate out;
    out.value = sum / double(n);
    const double var =
        std::max(0.0, sumsq / double(n) - out.value * out.value);
    out.std_error = std::sqrt(var / double(n));
    out.n_samples = n;
    return out;
}

double lower_bound_p_log(int d, std::uint64_t n, double L, double theta) {
    if (n == 0)
        throw std::invalid_argument("lower_bound_p_log: n must be >= 1");
    if (L <= 0.0)
        throw std::invalid_argument("lower_bound_p_log: L must be > 0");
    if (!(theta > 0.0) || theta > (std::numbers::pi / 4.0) + 1e-15)
        throw std::invalid_argument(
            "lower_bound_p_log: theta must lie in (0, pi/4]");
    // b(theta)^n / n! times the void factor exp(-(pi_d/cos^d theta) n (L/n)^d):
    // n points stacked in a cone of half-angle theta with strictly
    // decreasing step lengths form a chain reaching past L; the three
    // factors are the angular fraction, the ordering, and the void term.
    const double b = cap_fraction(d, theta);
    const double cosd = std::pow(std::cos(theta), double(d));
    const double vd = unit_ball_volume(d);
    return double(n) * std::log(b) - std::lgamma(double(n) + 1.0) -
           (vd / cosd) * double(n) * std::pow(L / double(n), double(d));
}

double lower_bound_p(int d, std::uint64_t n, double L, double theta) {
    return std::exp(lower_bound_p_log(d, n, L, theta));
}

envelope_result lower_envelope(int d, double L, int theta_grid) {
    if (L < 2.0)
        throw std::invalid_argument("lower_envelope: L must be >= 2");
    if (theta_grid < 1)
        throw std::invalid_argument("lower_envelope: theta_grid must be >= 1");

    // Center the n window on L / (log L)^{1/d}, scan a log-spaced grid over
    // [n0/4, 4 n0], then refine around the winner on the integers.
    const double n0 =
        L / std::pow(std::max(std::log(L), 1e-9), 1.0 / double(d));
    std::uint64_t n_lo = std::uint64_t(std::max(1.0, std::floor(n0 / 4.0)));
    std::uint64_t n_hi = std::uint64_t(std::max(2.0, std::ceil(n0 * 4.0)));
    if (n_hi <= n_lo)
        n_hi = n_lo + 1;

    std::vector<std::uint64_t> ns;
    const std::size_t max_grid = 256;
    const double log_lo = std::log(double(n_lo));
    const double log_hi = std::log(double(n_hi));
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < max_grid; ++i) {
        const double t = max_grid == 1
                             ? 0.0
                             : double(i) / double(max_grid - 1);
        const auto n = std::uint64_t(
            std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
        if (n > prev) {
            ns.push_back(n);
            prev = n;
        }
    }

    envelope_result best;
    best.log_bound = -std::numeric_limits<double>::infinity();
    best.bound = 0.0;
    best.n_star = 0;
    best.theta_star = 0.0;
    auto consider = [&](std::uint64_t n, double theta) {
        const double lb = lower_bound_p_log(d, n, L, theta);
        if (lb > best.log_bound) {
            best.log_bound = lb;
            best.n_star = n;
            best.theta_star = theta;
        }
    };
    for (int ti = 1; ti <= theta_grid; ++ti) {
        const double theta = (std::numbers::pi / 4.0) * double(ti) / double(theta_grid);
        for (const auto n : ns)
            consider(n, theta);
    }
    // Integer refinement around the winner.
    const std::uint64_t c = best.n_star;
    for (std::uint64_t n = (c > 3 ? c - 3 : 1); n <= c + 3; ++n)
        for (int ti = 1; ti <= theta_grid; ++ti)
            consider(n, (std::numbers::pi / 4.0) * double(ti) / double(theta_grid));
    best.bound = std::exp(best.log_bound);
    return best;
}

double rho_upper_log(int d, std::uint64_t n, const kissing_table& kt) {
    if (!kt.has(d))
        throw std::out_of_range("rho_upper_log: no kissing constant");
    const double twoK = 2.0 * double(kt.K(d));
    const double m = std::floor(double(n) / 2.0);
    return m * std::log(twoK) - std::lgamma(m + 1.0);
}

double rho_upper(int d, std::uint64_t n, const kissing_table& kt) {
    const double lb = rho_upper_log(d, n, kt);
    return lb >= 0.0 ? 1.0 : std::exp(lb);
}

double leading_term(int k) {
    if (k < 1)
        throw std::invalid_argument("leading_term: k must be >= 1");
    return double(k) / std::exp(std::lgamma(double(k) + 2.0));
}

mc_estimate leading_term_mc(int k, std::uint64_t n_samples,
                            std::uint64_t seed) {
    if (k < 1)
        throw std::invalid_argument("leading_term_mc: k must be >= 1");
    if (n_samples == 0)
        throw std::invalid_argument("leading_term_mc: n_samples must be > 0");
    // The ordered-spacings representation: the generation-k event carries
    // probability (1/2) P(Y_1 >= ... >= Y_k) with unit-rate Y_1..Y_{k-1}
    // and a rate-2 last variable.
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        rng_stream rng(seed, rng_domain::bounds_mc, i);
        bool ordered = true;
        double prevv = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
            double y = rng.next_exp();
            if (j == k - 1)
                y *= 0.5;
            if (y > prevv) {
                ordered = false;
                break;
            }
            prevv = y;
        }
        if (ordered)
            ++hits;
    }
    mc_estimate out;
    out.n_samples = n_samples;
    const double p = double(hits) / double(n_samples);
    out.value = 0.5 * p;
    // p(1-p) is exactly zero at the degenerate counts, and the SE should be
    // too (k = 1 always hits).
    out.std_error = 0.5 * std::sqrt(p * (1.0 - p) / double(n_samples));
    return out;
}

double mutual_nn_prob(int d) {
    // Condition on the NN distance R of the origin: the partner reciprocates
    // when the ball around it of radius R, minus the already-empty ball
    // around the origin, is void. Integrating the Exp(1) density of
    // pi_d R^d against exp(-(pi_d - L_d(R,R,R)/R^d scaling)) collapses to
    // 1 / (2 - ell) with ell = L_d(1,1,1)/pi_d by scale invariance.
    const double ell =
        lens_volume({1.0, 1.0, 1.0}, d) / unit_ball_volume(d);
    return 1.0 / (2.0 - ell);
}

} // namespace nnlab
