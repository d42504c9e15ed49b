// Small numeric toolbox: incomplete beta, inverse normal CDF, adaptive
// quadrature, golden-section minimization.
#pragma once

#include <functional>

namespace nnlab {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// Relative accuracy ~1e-14 over a, b <= ~1e4.
double ibeta(double a, double b, double x);

// Inverse standard normal CDF (Acklam's rational approximation with one
// Halley refinement step; |rel err| < 1e-15 over (0, 1)).
double inverse_normal_cdf(double p);

// Adaptive Simpson on [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

// Semi-infinite integral of f over [a, inf) for integrands with exponential
// tails: maps the tail through x = a + t/(1-t) and integrates adaptively.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double tol);

// Golden-section minimum of a unimodal f on [lo, hi]; returns argmin, and the
// minimum value through *fmin if non-null.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol, double* fmin = nullptr);

} // namespace nnlab
