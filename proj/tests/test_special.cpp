// Numeric toolbox spot checks against closed forms.
#include <doctest.h>

#include "nnlab/special.hpp"

#include <cmath>
#include <numbers>

using namespace nnlab;
using doctest::Approx;

TEST_CASE("ibeta closed forms") {
    // I_x(1, 1) = x
    CHECK(ibeta(1.0, 1.0, 0.37) == Approx(0.37).epsilon(1e-14));
    // I_x(1, b) = 1 - (1-x)^b
    CHECK(ibeta(1.0, 4.0, 0.2) ==
          Approx(1.0 - std::pow(0.8, 4.0)).epsilon(1e-14));
    // I_x(a, 1) = x^a
    CHECK(ibeta(3.0, 1.0, 0.5) == Approx(0.125).epsilon(1e-14));
    // Symmetry: I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(ibeta(2.5, 3.5, 0.3) ==
          Approx(1.0 - ibeta(3.5, 2.5, 0.7)).epsilon(1e-13));
    // I_{1/2}(a, a) = 1/2
    for (const double a : {0.5, 1.0, 2.0, 7.5})
        CHECK(ibeta(a, a, 0.5) == Approx(0.5).epsilon(1e-13));
    // Endpoints
    CHECK(ibeta(2.0, 3.0, 0.0) == 0.0);
    CHECK(ibeta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("ibeta half-integer value used by cap fractions") {
    // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
    const double x = 0.42;
    CHECK(ibeta(0.5, 0.5, x) ==
          Approx(2.0 / std::numbers::pi * std::asin(std::sqrt(x)))
              .epsilon(1e-12));
}

TEST_CASE("inverse normal cdf round trip") {
    // Classic two-sided z values.
    CHECK(inverse_normal_cdf(0.975) == Approx(1.959963985).epsilon(1e-9));
    CHECK(inverse_normal_cdf(0.995) == Approx(2.575829304).epsilon(1e-9));
    CHECK(inverse_normal_cdf(0.5) == Approx(0.0).epsilon(1e-15));
    // Round trip through erfc on a wide grid.
    for (double p = 1e-10; p < 1.0; p *= 3.7) {
        const double z = inverse_normal_cdf(p);
        const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
        CHECK(back == Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("adaptive simpson on analytic integrals") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0,
                    std::numbers::pi, 1e-12) == Approx(2.0).epsilon(1e-11));
    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0, 1e-12) ==
          Approx(9.0).epsilon(1e-12));
}

TEST_CASE("semi-infinite quadrature on exponential tails") {
    CHECK(integrate_to_inf([](double x) { return std::exp(-x); }, 0.0,
                           1e-12) == Approx(1.0).epsilon(1e-10));
    // Gamma(3) = 2
    CHECK(integrate_to_inf([](double x) { return x * x * std::exp(-x); },
                           0.0, 1e-12) == Approx(2.0).epsilon(1e-9));
    // Shifted start: int_2^inf e^-x = e^-2
    CHECK(integrate_to_inf([](double x) { return std::exp(-x); }, 2.0,
                           1e-13) == Approx(std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("golden section finds interior minima") {
    double fmin = 0.0;
    const double x = golden_min(
        [](double t) { return (t - 1.3) * (t - 1.3) + 0.25; }, -4.0, 6.0,
        1e-10, &fmin);
    CHECK(x == Approx(1.3).epsilon(1e-7));
    CHECK(fmin == Approx(0.25).epsilon(1e-12));

    // Asymmetric unimodal: x - log x over (0.1, 9), minimum at 1.
    const double y =
        golden_min([](double t) { return t - std::log(t); }, 0.1, 9.0,
                   1e-12);
    CHECK(y == Approx(1.0).epsilon(1e-8));
}
