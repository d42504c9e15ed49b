// d-dimensional geometry: ball volumes, spherical-cap fractions, lens
// (two-ball intersection) volumes.
#pragma once

#include <utility>
#include <vector>

namespace nnlab {

struct lens_spec {
    double a; // first radius, > 0
    double b; // second radius, > 0
    double y; // center separation, >= 0
};

// Volume of the unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

// Fraction of surface measure on S^{d-1} with first coordinate >= cos(theta),
// theta in (0, pi/2]. Constant 1/2 at d = 1; in (0, 1/2] always.
double cap_fraction(int d, double theta);

// Volume of a spherical cap of height h (0 <= h <= 2R) of a radius-R ball.
double cap_volume(int d, double R, double h);

// Volume of the intersection of balls with radii a and b at center distance
// y: 0 when y >= a + b, the smaller ball when y <= |a - b|, otherwise two
// caps split at the radical hyperplane.
double lens_volume(const lens_spec& spec, int d);

// (d, L_d(1, y, y) / pi_d) for d = 1..d_max.
std::vector<std::pair<int, double>> lens_ratio_sequence(double y, int d_max);

} // namespace nnlab
