// Analytic bounds and limit constants for the NN-graph component laws:
// the chain lower bound, the compound-Poisson upper bound machinery, the
// path-count bound, the generation-law leading term, and the mutual-NN
// closed form used as the g(1) oracle.
#pragma once

#include "nnlab/rng.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nnlab {

class kissing_table {
  public:
    // K_1..K_4 and K_8 are exact; K_5..K_7 are the best known values.
    // Dimensions above 8 must be supplied by the caller.
    static kissing_table defaults();

    void set(int d, int K); // user override, tagged "user"
    bool has(int d) const;
    int K(int d) const;     // throws std::out_of_range when absent
    const std::string& source(int d) const;
    std::vector<int> dims() const;

  private:
    std::map<int, std::pair<int, std::string>> entries_;
};

struct mc_estimate {
    double value;
    double std_error;
    std::uint64_t n_samples;
};

// |W| with pi_d |W|^d standard exponential.
double sample_absW(int d, rng_stream& rng);

// E exp(r |W|) by adaptive quadrature; requires r < 2 when d = 1.
double mgf_absW(int d, double r);

struct tail_bound {
    double bound;     // clamped to <= 1
    double log_bound; // unclamped exponent, base e
    double r_star;    // minimizer of the Chernoff exponent
    int K_used;
};

// P(component reaches beyond L) <= e^{2K} exp(inf_r {2K(M(r)-1) - r c2 L}),
// c2 = K^{-1/d}; the infimum solved by golden section over log r.
tail_bound compound_tail_bound(int d, double L, const kissing_table& kt);

// Direct Monte Carlo of P(U >= c2 L), U a compound Poisson(2K) sum of |W|.
mc_estimate compound_tail_mc(int d, double L, const kissing_table& kt,
                             std::uint64_t n_samples, std::uint64_t seed);

// Monte Carlo of E exp(rU), stratified over the Poisson count with
// variance-optimal allocation (strata above 80 are dropped; their relative
// contribution is below 1e-7 at every r this build evaluates). n_target = 0
// sizes the run from the analytic relative variance for a 0.29% SE.
mc_estimate compound_mgf_mc(int d, double r, const kissing_table& kt,
                            std::uint64_t n_target, std::uint64_t seed);

// exp(2K(mgf_absW(r) - 1)): the compound-Poisson MGF identity baseline.
double compound_mgf_exact(int d, double r, const kissing_table& kt);

// log of cap_fraction(d,theta)^n / n! * exp(-(pi_d/cos^d theta) n (L/n)^d).
double lower_bound_p_log(int d, std::uint64_t n, double L, double theta);
double lower_bound_p(int d, std::uint64_t n, double L, double theta);

struct envelope_result {
    double bound;
    double log_bound;
    std::uint64_t n_star;
    double theta_star;
};

// Best chain lower bound over n near L/(log L)^{1/d} and theta on a grid in
// (0, pi/4]; L >= 2.
envelope_result lower_envelope(int d, double L, int theta_grid = 16);

// min(1, (2K)^{floor(n/2)} / floor(n/2)!), evaluated in log space.
double rho_upper_log(int d, std::uint64_t n, const kissing_table& kt);
double rho_upper(int d, std::uint64_t n, const kissing_table& kt);

// Limit law of the origin's generation number: k/(k+1)!.
double leading_term(int k);

// (1/2) P(Y_1 >= ... >= Y_k), Y_1..Y_{k-1} ~ Exp(1), Y_k ~ Exp(2).
mc_estimate leading_term_mc(int k, std::uint64_t n_samples,
                            std::uint64_t seed);

// Palm probability that the origin and its NN are mutual NNs:
// integrating the NN-distance density against the void probability of the
// uncovered region gives 1 / (2 - L_d(1,1,1)/pi_d).
double mutual_nn_prob(int d);

struct bound_point {
    double argument;  // L or n
    double bound;     // clamped
    double log_bound; // unclamped
    double param;     // r* or theta* (0 when not applicable)
};

struct bound_curve {
    std::string quantity; // TAU_UPPER, TAU_LOWER, RHO_UPPER, G_LIMIT
    int d;
    int K_used; // 0 when the curve does not use a kissing constant
    std::vector<bound_point> points;
};

} // namespace nnlab
