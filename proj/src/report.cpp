// CSV/JSONL emission, parsing, and the comparison report.
#include "nnlab/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nnlab {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_prob(double v) { return fmt("%.6g", v); }
std::string fmt_wide(double v) { return fmt("%.10g", v); }

} // namespace

std::string header_lines(const run_header& h) {
    std::ostringstream out;
    out << "# nnlab " << h.version << "\n";
    out << "# seed " << h.base_seed << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h.config_hash));
    out << "# config " << buf << "\n";
    out << "# rng " << h.rng << "\n";
    return out.str();
}

std::string estimates_csv(const std::vector<estimate_result>& rows,
                          const run_header& h) {
    std::ostringstream out;
    out << header_lines(h);
    out << "quantity,d,param_k,param_L,param_n,estimate,std_error,ci_low,"
           "ci_high,n_trials,n_invalid,base_seed,wall_time_s\n";
    for (const auto& r : rows) {
        out << r.quantity << ',' << r.d << ',';
        if (r.param_k >= 0)
            out << r.param_k;
        out << ',';
        if (r.param_L >= 0.0)
            out << fmt_wide(r.param_L);
        out << ',';
        if (r.param_n >= 0)
            out << r.param_n;
        out << ',' << fmt_prob(r.estimate) << ',' << fmt_prob(r.std_error)
            << ',' << fmt_prob(r.ci_low) << ',' << fmt_prob(r.ci_high) << ','
            << r.n_trials << ',' << r.n_invalid << ',' << r.base_seed << ','
            << fmt("%.3f", r.wall_time_s) << '\n';
    }
    return out.str();
}

std::string estimates_jsonl(const std::vector<estimate_result>& rows,
                            const run_header& h) {
    std::ostringstream out;
    for (const auto& r : rows) {
        nlohmann::json j;
        j["quantity"] = r.quantity;
        j["d"] = r.d;
        if (r.param_k >= 0)
            j["param_k"] = r.param_k;
        if (r.param_L >= 0.0)
            j["param_L"] = r.param_L;
        if (r.param_n >= 0)
            j["param_n"] = r.param_n;
        j["estimate"] = r.estimate;
        j["std_error"] = r.std_error;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        j["n_trials"] = r.n_trials;
        j["n_invalid"] = r.n_invalid;
        j["base_seed"] = r.base_seed;
        j["wall_time_s"] = r.wall_time_s;
        j["version"] = h.version;
        j["rng"] = h.rng;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::string bounds_csv(const std::vector<bound_curve>& curves,
                       const run_header& h) {
    std::ostringstream out;
    out << header_lines(h);
    out << "quantity,d,argument,bound,log_bound,r_star_or_theta_star,"
           "K_d_used\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            out << c.quantity << ',' << c.d << ',' << fmt_wide(p.argument)
                << ',' << fmt_prob(p.bound) << ',' << fmt_wide(p.log_bound)
                << ',';
            if (p.param != 0.0)
                out << fmt_wide(p.param);
            out << ',';
            if (c.K_used != 0)
                out << c.K_used;
            out << '\n';
        }
    }
    return out.str();
}

std::string bounds_jsonl(const std::vector<bound_curve>& curves,
                         const run_header& h) {
    std::ostringstream out;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            nlohmann::json j;
            j["quantity"] = c.quantity;
            j["d"] = c.d;
            j["argument"] = p.argument;
            j["bound"] = p.bound;
            j["log_bound"] = p.log_bound;
            if (p.param != 0.0)
                j["r_star_or_theta_star"] = p.param;
            if (c.K_used != 0)
                j["K_d_used"] = c.K_used;
            j["version"] = h.version;
            j["rng"] = h.rng;
            out << j.dump() << '\n';
        }
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

// Data lines only: headers, comments and blanks skipped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text,
                                               const char* expect_header,
                                               std::size_t n_cols) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!saw_header) {
            saw_header = true;
            if (line.rfind(expect_header, 0) != 0)
                throw std::runtime_error("csv: unexpected header: " + line);
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != n_cols)
            throw std::runtime_error("csv: wrong column count: " + line);
        rows.push_back(std::move(cells));
    }
    if (!saw_header)
        throw std::runtime_error("csv: no header found");
    return rows;
}

} // namespace

std::vector<estimate_result> parse_estimates_csv(const std::string& text) {
    std::vector<estimate_result> out;
    for (const auto& c : csv_rows(text, "quantity,d,param_k", 13)) {
        estimate_result r;
        r.quantity = c[0];
        r.d = std::stoi(c[1]);
        r.param_k = c[2].empty() ? -1 : std::stoll(c[2]);
        r.param_L = c[3].empty() ? -1.0 : std::stod(c[3]);
        r.param_n = c[4].empty() ? -1 : std::stoll(c[4]);
        r.estimate = std::stod(c[5]);
        r.std_error = std::stod(c[6]);
        r.ci_low = std::stod(c[7]);
        r.ci_high = std::stod(c[8]);
        r.n_trials = std::stoull(c[9]);
        r.n_invalid = std::stoull(c[10]);
        r.base_seed = std::stoull(c[11]);
        r.wall_time_s = std::stod(c[12]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<bound_row> parse_bounds_csv(const std::string& text) {
    std::vector<bound_row> out;
    for (const auto& c : csv_rows(text, "quantity,d,argument", 7)) {
        bound_row r;
        r.quantity = c[0];
        r.d = std::stoi(c[1]);
        r.argument = std::stod(c[2]);
        r.bound = std::stod(c[3]);
        r.log_bound = std::stod(c[4]);
        r.param = c[5].empty() ? 0.0 : std::stod(c[5]);
        r.K_used = c[6].empty() ? 0 : std::stoi(c[6]);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

bool args_match(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) <= 1e-9 * scale;
}

const bound_row* find_bound(const std::vector<bound_row>& bounds,
                            const std::string& quantity, int d,
                            double argument, bool* any_of_kind) {
    const bound_row* hit = nullptr;
    *any_of_kind = false;
    for (const auto& b : bounds) {
        if (b.quantity != quantity || b.d != d)
            continue;
        *any_of_kind = true;
        if (args_match(b.argument, argument))
            hit = &b;
    }
    return hit;
}

double margin_sigma(double estimate, double reference, double se) {
    if (se > 0.0)
        return (estimate - reference) / se;
    if (estimate == reference)
        return 0.0;
    return estimate > reference ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
}

report_row make_row(const estimate_result& e, double argument,
                    double reference, const char* kind) {
    report_row r;
    r.quantity = e.quantity;
    r.d = e.d;
    r.argument = argument;
    r.estimate = e.estimate;
    r.std_error = e.std_error;
    r.reference = reference;
    r.kind = kind;
    r.margin_sigma = margin_sigma(e.estimate, reference, e.std_error);
    return r;
}

// A lower bound can only be checked where the estimator resolves the
// event at all; ten observed hits is the cutoff.
bool resolved(const estimate_result& e) {
    const double n = double(e.n_trials - e.n_invalid);
    return e.estimate * n >= 10.0;
}

} // namespace

report_result build_report(const std::vector<estimate_result>& estimates,
                           const std::vector<bound_row>& bounds) {
    report_result out;
    auto join = [&](const estimate_result& e, double argument,
                    const char* bound_quantity, const char* kind) {
        bool any = false;
        const bound_row* b =
            find_bound(bounds, bound_quantity, e.d, argument, &any);
        if (!b) {
            if (any)
                throw grid_mismatch(std::string("report: no ") +
                                    bound_quantity + " row at argument " +
                                    fmt_wide(argument) + " for d=" +
                                    std::to_string(e.d));
            return; // bounds file has no such curve; comparison skipped
        }
        report_row r = make_row(e, argument, b->bound, kind);
        if (r.kind == "upper")
            r.flagged = r.margin_sigma > 3.0;
        else if (r.kind == "lower")
            r.flagged = resolved(e) && r.margin_sigma < -3.0;
        out.rows.push_back(std::move(r));
    };

    for (const auto& e : estimates) {
        if (e.quantity == "TAU") {
            join(e, e.param_L, "TAU_UPPER", "upper");
            if (e.param_L >= 2.0) // lower envelope's domain
                join(e, e.param_L, "TAU_LOWER", "lower");
        } else if (e.quantity == "RHO") {
            join(e, double(e.param_n), "RHO_UPPER", "upper");
        } else if (e.quantity == "G") {
            if (e.param_k == 1) {
                report_row r = make_row(e, 1.0, mutual_nn_prob(e.d),
                                        "oracle");
                r.flagged = std::fabs(r.margin_sigma) > 3.0;
                out.rows.push_back(std::move(r));
            }
            bool any = false;
            const bound_row* b = find_bound(bounds, "G_LIMIT", e.d,
                                            double(e.param_k), &any);
            if (b)
                out.rows.push_back(
                    make_row(e, double(e.param_k), b->bound, "limit"));
        }
    }

    for (const auto& r : out.rows)
        if (r.flagged)
            ++out.n_flagged;

    std::ostringstream csv;
    csv << "quantity,d,argument,estimate,std_error,reference,kind,"
           "margin_sigma,flag\n";
    for (const auto& r : out.rows) {
        csv << r.quantity << ',' << r.d << ',' << fmt_wide(r.argument) << ','
            << fmt_prob(r.estimate) << ',' << fmt_prob(r.std_error) << ','
            << fmt_prob(r.reference) << ',' << r.kind << ','
            << fmt("%.3f", r.margin_sigma) << ',' << (r.flagged ? 1 : 0)
            << '\n';
    }
    out.csv = csv.str();

    std::ostringstream sum;
    sum << "report: " << out.rows.size() << " comparisons, " << out.n_flagged
        << " flagged\n";
    for (const auto& r : out.rows)
        if (r.flagged)
            sum << "  FLAG " << r.quantity << " d=" << r.d << " arg="
                << fmt_wide(r.argument) << " estimate=" << fmt_prob(r.estimate)
                << " vs " << r.kind << " reference=" << fmt_prob(r.reference)
                << " (" << fmt("%.2f", r.margin_sigma) << " sigma)\n";
    out.summary = sum.str();
    return out;
}

} // namespace nnlab
