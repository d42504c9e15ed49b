#include "nnlab/geometry.hpp"

#include "nnlab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace nnlab {

namespace {
constexpr double PI = 3.14159265358979323846;
}

double unit_ball_volume(int d) {
    if (d < 1) throw std::invalid_argument("unit_ball_volume: d >= 1");
    return std::exp(0.5 * d * std::log(PI) - std::lgamma(0.5 * d + 1.0));
}

double cap_fraction(int d, double theta) {
    if (d < 1) throw std::invalid_argument("cap_fraction: d >= 1");
    if (!(theta > 0.0) || theta > PI / 2.0 + 1e-15)
        throw std::invalid_argument("cap_fraction: theta in (0, pi/2]");
    if (d == 1) return 0.5;
    double s = std::sin(theta);
    return 0.5 * ibeta(0.5 * (d - 1), 0.5, s * s);
}

double cap_volume(int d, double R, double h) {
    if (h <= 0.0) return 0.0;
    double full = unit_ball_volume(d) * std::pow(R, d);
    if (h >= 2.0 * R) return full;
    if (h > R) return full - cap_volume(d, R, 2.0 * R - h);
    double x = (2.0 * R * h - h * h) / (R * R);
    return 0.5 * full * ibeta(0.5 * (d + 1), 0.5, x);
}

double lens_volume(const lens_spec& spec, int d) {
    if (!(spec.a > 0.0) || !(spec.b > 0.0) || spec.y < 0.0)
        throw std::invalid_argument("lens_volume: a > 0, b > 0, y >= 0");
    double a = spec.a, b = spec.b, y = spec.y;
    if (y >= a + b) return 0.0;
    double small = a < b ? a : b;
    if (y <= std::fabs(a - b)) return unit_ball_volume(d) * std::pow(small, d);
    // Radical hyperplane: signed distance x from the first center satisfies
    // a^2 - x^2 = b^2 - (y - x)^2.
    double x = (y * y + a * a - b * b) / (2.0 * y);
    return cap_volume(d, a, a - x) + cap_volume(d, b, b - (y - x));
}

std::vector<std::pair<int, double>> lens_ratio_sequence(double y, int d_max) {
    if (!(y >= 1.0) || d_max < 1)
        throw std::invalid_argument("lens_ratio_sequence: y >= 1, d_max >= 1");
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(d_max));
    for (int d = 1; d <= d_max; ++d) {
        double r = lens_volume({1.0, y, y}, d) / unit_ball_volume(d);
        out.emplace_back(d, r);
    }
    return out;
}

} // namespace nnlab
