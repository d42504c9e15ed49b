#include "nnlab/localsampler.hpp"

#include "nnlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nnlab {

namespace {

struct explored_ball {
    std::vector<double> center;
    double radius;
};

class local_process {
  public:
    local_process(int d, std::uint64_t base_seed, std::uint64_t trial)
        : d_(d), rng_(base_seed, rng_domain::local, trial),
          pi_d_(unit_ball_volume(d)),
          scale_(std::pow(1.0 / unit_ball_volume(d), 1.0 / d)) {
        pts_.assign(static_cast<std::size_t>(d), 0.0); // the origin
        n_ = 1;
    }

    std::uint32_t n_points() const { return n_; }

    double dist(std::uint32_t i, const double* q) const {
        const double* p = &pts_[static_cast<std::size_t>(i) * d_];
        double acc = 0.0;
        for (int j = 0; j < d_; ++j) {
            double dx = p[j] - q[j];
            acc += dx * dx;
        }
        return std::sqrt(acc);
    }

    const double* point(std::uint32_t i) const {
        return &pts_[static_cast<std::size_t>(i) * d_];
    }

    // Index of the nearest materialized-or-new process point to pts_[i].
    std::uint32_t nearest(std::uint32_t i) {
        // Copy the center: explore_annulus grows pts_, which would invalidate
        // a pointer into it.
        const std::vector<double> qv(point(i), point(i) + d_);
        const double* q = qv.data();
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_idx = std::numeric_limits<std::uint32_t>::max();
        for (std::uint32_t k = 0; k < n_; ++k) {
            if (k == i) continue;
            double dk = dist(k, q);
            if (dk < best) {
                best = dk;
                best_idx = k;
            }
        }
        // Radius around q already inside some explored ball.
        double rho = 0.0;
        for (const auto& b : balls_) {
            double inner = b.radius - euclid(b.center.data(), q);
            if (inner > rho) rho = inner;
        }
        while (best > rho) {
            double target = std::max(rho * 1.3, 0.9 * scale_);
            if (target <= rho) target = rho * 1.3 + 0.1 * scale_;
            std::uint32_t first_new = n_;
            explore_annulus(q, rho, target);
            for (std::uint32_t k = first_new; k < n_; ++k) {
                double dk = dist(k, q);
                if (dk < best) {
                    best = dk;
                    best_idx = k;
                }
            }
            rho = target;
        }
        return best_idx;
    }

  private:
    static double euclid_sq(const double* a, const double* b, int d) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) {
            double dx = a[j] - b[j];
            acc += dx * dx;
        }
        return acc;
    }
    double euclid(const double* a, const double* b) const {
        return std::sqrt(euclid_sq(a, b, d_));
    }

    bool in_explored(const double* x) const {
        for (const auto& b : balls_) {
            double rr = b.radius * b.radius;
            if (euclid_sq(b.center.data(), x, d_) <= rr) return true;
        }
        return false;
    }

    void explore_annulus(const double* q, double rho, double target) {
        double vol = pi_d_ * (std::pow(target, d_) - std::pow(rho, d_));
        std::uint64_t count = rng_.next_poisson(vol);
        std::vector<double> dir(static_cast<std::size_t>(d_));
        std::vector<double> cand(static_cast<std::size_t>(d_));
        double rho_d = std::pow(rho, d_);
        double span_d = std::pow(target, d_) - rho_d;
        for (std::uint64_t c = 0; c < count; ++c) {
            double u = rng_.next_unit();
            double r = std::pow(rho_d + u * span_d, 1.0 / d_);
            rng_.next_direction(d_, dir.data());
            for (int j = 0; j < d_; ++j) cand[j] = q[j] + r * dir[j];
            if (in_explored(cand.data())) continue;
            pts_.insert(pts_.end(), cand.begin(), cand.end());
            ++n_;
        }
        explored_ball b;
        b.center.assign(q, q + d_);
        b.radius = target;
        balls_.push_back(std::move(b));
    }

    int d_;
    rng_stream rng_;
    double pi_d_;
    double scale_;
    std::vector<double> pts_;
    std::uint32_t n_ = 0;
    std::vector<explored_ball> balls_;
};

} // namespace

local_chain sample_chain_infinite(int d, std::uint64_t base_seed,
                                  std::uint64_t trial_index) {
    if (d < 1) throw std::invalid_argument("sample_chain_infinite: d >= 1");
    local_process proc(d, base_seed, trial_index);
    local_chain out;
    out.points_touched = 0;

    std::vector<std::uint32_t> visited = {0};
    std::uint32_t cur = 0;
    for (std::uint32_t step = 0; step < 100000; ++step) {
        std::uint32_t nxt = proc.nearest(cur);
        if (std::find(visited.begin(), visited.end(), nxt) != visited.end())
            break;
        double edge = proc.dist(nxt, proc.point(cur));
        visited.push_back(nxt);
        double nrm = 0.0;
        const double* p = proc.point(nxt);
        for (int j = 0; j < d; ++j) nrm += p[j] * p[j];
        out.norms.push_back(std::sqrt(nrm));
        out.step_dist.push_back(edge);
        cur = nxt;
    }
    out.points_touched = static_cast<std::uint32_t>(visited.size()) - 1;
    out.points_materialized = proc.n_points();
    return out;
}

} // namespace nnlab
