#include "nnlab/pointprocess.hpp"

#include "nnlab/geometry.hpp"
#include "nnlab/kernels.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace nnlab {

double default_side(int d) {
    // Scales chosen so the side/4 extent guard fires on ~2-7% of first
    // attempts (measured), making invalid-after-redouble negligible. 1-D
    // components are long, so the 1-D window is proportionally wider.
    double scales;
    switch (d) {
        case 1: scales = 40.0; break;
        case 2: scales = 20.0; break;
        case 3: scales = 40.0 / 3.0; break;
        default: scales = 12.0; break;
    }
    return scales * std::pow(1.0 / unit_ball_volume(d), 1.0 / d);
}

sample sample_palm(const window_spec& window, const seed_spec& seed) {
    if (window.d < 1) throw std::invalid_argument("sample_palm: d >= 1");
    double mean = std::pow(window.side, window.d);
    if (!(window.side > 0.0) || !(mean >= 2.0))
        throw std::invalid_argument("sample_palm: need side^d >= 2");

    rng_stream rng(seed.base_seed, rng_domain::points, seed.trial_index,
                   seed.attempt);
    std::uint64_t n = rng.next_poisson(mean);
    int guard = window.min_points_guard < 2 ? 2 : window.min_points_guard;
    if (n + 1 < static_cast<std::uint64_t>(guard))
        throw undersized_sample("sample_palm: undersized realization");

    sample s;
    s.window = window;
    s.n_points = static_cast<std::uint32_t>(n) + 1;
    std::size_t nd = static_cast<std::size_t>(n) * window.d;
    std::vector<std::uint64_t> raw(nd);
    rng.fill_u64(raw.data(), nd);
    s.coords.resize(nd + window.d);
    kernels::active().u64_scale(raw.data(), s.coords.data(), nd, window.side);
    for (int j = 0; j < window.d; ++j) s.coords[nd + j] = 0.0;
    s.origin_index = static_cast<std::uint32_t>(n);
    return s;
}

double torus_distance(const double* p, const double* q, const window_spec& w) {
    double acc = 0.0;
    for (int j = 0; j < w.d; ++j) {
        double dx = std::fabs(p[j] - q[j]);
        double alt = w.side - dx;
        dx = dx < alt ? dx : alt;
        acc = std::fma(dx, dx, acc);
    }
    return std::sqrt(acc);
}

double torus_norm(const double* p, const window_spec& w) {
    double acc = 0.0;
    for (int j = 0; j < w.d; ++j) {
        double dx = std::fabs(p[j]);
        double alt = w.side - dx;
        dx = dx < alt ? dx : alt;
        acc = std::fma(dx, dx, acc);
    }
    return std::sqrt(acc);
}

std::string sample_to_json(const sample& s, const seed_spec& seed) {
    nlohmann::json j;
    j["d"] = s.window.d;
    j["side"] = s.window.side;
    j["seed"] = {{"base", seed.base_seed},
                 {"trial", seed.trial_index},
                 {"attempt", seed.attempt}};
    nlohmann::json pts = nlohmann::json::array();
    for (std::uint32_t i = 0; i < s.n_points; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < s.window.d; ++k) row.push_back(s.point(i)[k]);
        pts.push_back(std::move(row));
    }
    j["points"] = std::move(pts);
    j["origin_index"] = s.origin_index;
    return j.dump();
}

sample sample_from_json(const std::string& text, seed_spec* seed_out) {
    nlohmann::json j = nlohmann::json::parse(text);
    sample s;
    s.window.d = j.at("d").get<int>();
    s.window.side = j.at("side").get<double>();
    const auto& pts = j.at("points");
    s.n_points = static_cast<std::uint32_t>(pts.size());
    if (s.n_points < 2) throw std::runtime_error("sample_from_json: < 2 points");
    s.coords.reserve(static_cast<std::size_t>(s.n_points) * s.window.d);
    for (const auto& row : pts) {
        if (static_cast<int>(row.size()) != s.window.d)
            throw std::runtime_error("sample_from_json: bad point arity");
        for (const auto& c : row) {
            double v = c.get<double>();
            if (!(v >= 0.0) || !(v < s.window.side))
                throw std::runtime_error("sample_from_json: coordinate range");
            s.coords.push_back(v);
        }
    }
    s.origin_index = j.at("origin_index").get<std::uint32_t>();
    if (s.origin_index >= s.n_points)
        throw std::runtime_error("sample_from_json: origin index range");
    for (int k = 0; k < s.window.d; ++k)
        if (s.point(s.origin_index)[k] != 0.0)
            throw std::runtime_error("sample_from_json: origin not at zero");
    if (seed_out != nullptr && j.contains("seed")) {
        seed_out->base_seed = j["seed"].at("base").get<std::uint64_t>();
        seed_out->trial_index = j["seed"].at("trial").get<std::uint64_t>();
        seed_out->attempt = j["seed"].value("attempt", 0u);
    }
    return s;
}

} // namespace nnlab
