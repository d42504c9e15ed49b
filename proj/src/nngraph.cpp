#include "nnlab/nngraph.hpp"

#include "nnlab/geometry.hpp"
#include "nnlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace nnlab {

namespace {

// The stopping and tie-window rules shrink thresholds by this factor so a
// point assigned to a cell one ulp across a boundary can never be missed.
constexpr double ring_margin = 1.0 - 1e-9;

struct searcher {
    const sample* s;
    int d;
    double side;
    std::uint32_t m;

    bool gridded = false;
    int c = 0;        // cells per axis
    double cell = 0.0;
    std::vector<std::uint32_t> cell_start; // CSR over cells, size n_cells+1
    std::vector<std::uint32_t> orig;       // slot -> original index
    std::vector<double> soa;               // soa[j*m + slot]

    explicit searcher(const sample& smp, bool accelerated) : s(&smp) {
        d = smp.window.d;
        side = smp.window.side;
        m = smp.n_points;

        // SoA layout feeds the scan kernels for both paths.
        soa.resize(static_cast<std::size_t>(m) * d);
        orig.resize(m);

        double cell_target =
            1.5 * std::pow(1.0 / unit_ball_volume(d), 1.0 / d);
        int want = static_cast<int>(std::floor(side / cell_target));
        // Keep the cell table proportionate to the point count.
        int cap = static_cast<int>(std::floor(std::pow(8.0 * m, 1.0 / d)));
        if (want > cap) want = cap;
        gridded = accelerated && m >= 96 && want >= 5;

        if (!gridded) {
            for (std::uint32_t i = 0; i < m; ++i) orig[i] = i;
            for (int j = 0; j < d; ++j)
                for (std::uint32_t i = 0; i < m; ++i)
                    soa[static_cast<std::size_t>(j) * m + i] = smp.point(i)[j];
            return;
        }

        c = want;
        cell = side / c;
        std::size_t n_cells = 1;
        for (int j = 0; j < d; ++j) n_cells *= static_cast<std::size_t>(c);

        std::vector<std::uint32_t> cell_of(m);
        for (std::uint32_t i = 0; i < m; ++i)
            cell_of[i] = cell_id_of_point(smp.point(i));

        cell_start.assign(n_cells + 1, 0);
        for (std::uint32_t i = 0; i < m; ++i) ++cell_start[cell_of[i] + 1];
        for (std::size_t k = 1; k <= n_cells; ++k)
            cell_start[k] += cell_start[k - 1];
        // Fill in ascending original index so in-cell slots stay sorted.
        std::vector<std::uint32_t> cursor(cell_start.begin(),
                                          cell_start.end() - 1);
        for (std::uint32_t i = 0; i < m; ++i) orig[cursor[cell_of[i]]++] = i;
        for (int j = 0; j < d; ++j)
            for (std::uint32_t slot = 0; slot < m; ++slot)
                soa[static_cast<std::size_t>(j) * m + slot] =
                    smp.point(orig[slot])[j];
    }

    std::uint32_t axis_cell(double x) const {
        int v = static_cast<int>(x / cell);
        if (v >= c) v = c - 1;
        if (v < 0) v = 0;
        return static_cast<std::uint32_t>(v);
    }

    // Axis 0 is the most significant digit; visit_ring accumulates in the
    // same order.
    std::uint32_t cell_id_of_point(const double* p) const {
        std::uint32_t id = 0;
        for (int j = 0; j < d; ++j)
            id = id * static_cast<std::uint32_t>(c) + axis_cell(p[j]);
        return id;
    }

    // Visit every cell at Chebyshev ring distance exactly k from qc. Only
    // called while 2k+1 <= c, so wrapped offsets land in distinct cells.
    template <typename Fn>
    void for_ring(const std::uint32_t* qc, int k, Fn&& fn) const {
        visit_ring(qc, k, 0, false, 0, fn);
    }

    template <typename Fn>
    void visit_ring(const std::uint32_t* qc, int k, int axis, bool extreme,
                    std::uint32_t partial, Fn&& fn) const {
        if (axis == d - 1) {
            auto emit = [&](int o) {
                int idx = static_cast<int>(qc[axis]) + o;
                if (idx < 0) idx += c;
                if (idx >= c) idx -= c;
                fn(partial * static_cast<std::uint32_t>(c) +
                   static_cast<std::uint32_t>(idx));
            };
            if (extreme || k == 0) {
                for (int o = -k; o <= k; ++o) emit(o);
            } else {
                emit(-k);
                emit(k);
            }
            return;
        }
        for (int o = -k; o <= k; ++o) {
            int idx = static_cast<int>(qc[axis]) + o;
            if (idx < 0) idx += c;
            if (idx >= c) idx -= c;
            visit_ring(qc, k, axis + 1, extreme || o == -k || o == k,
                       partial * static_cast<std::uint32_t>(c) +
                           static_cast<std::uint32_t>(idx),
                       fn);
        }
    }

    std::pair<double, std::uint32_t> nearest(const double* q,
                                             std::uint32_t skip) const {
        const auto& K = kernels::active();
        double best_d2 = std::numeric_limits<double>::infinity();
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        if (!gridded) {
            K.nn_scan(soa.data(), orig.data(), m, 0, m, q, d, side, skip,
                      &best_d2, &best);
            return {best_d2, best};
        }
        std::vector<std::uint32_t> qcell(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) qcell[static_cast<std::size_t>(j)] = axis_cell(q[j]);
        for (int k = 0;; ++k) {
            if (2 * k + 1 > c) {
                K.nn_scan(soa.data(), orig.data(), m, 0, m, q, d, side, skip,
                          &best_d2, &best);
                break;
            }
            for_ring(qcell.data(), k, [&](std::uint32_t cid) {
                std::uint32_t b = cell_start[cid];
                std::uint32_t e = cell_start[cid + 1];
                if (b != e)
                    K.nn_scan(soa.data(), orig.data(), m, b, e, q, d, side,
                              skip, &best_d2, &best);
            });
            double thr = static_cast<double>(k) * cell * ring_margin;
            if (best != std::numeric_limits<std::uint32_t>::max() &&
                best_d2 < thr * thr)
                break;
        }
        return {best_d2, best};
    }

    std::size_t count_at(const double* q, std::uint32_t skip, double target_d2,
                         double dist_hint) const {
        const auto& K = kernels::active();
        if (!gridded)
            return K.count_equal(soa.data(), orig.data(), m, 0, m, q, d, side,
                                 skip, target_d2);
        int kmax = static_cast<int>(std::floor(dist_hint / cell)) + 2;
        if (2 * kmax + 1 > c)
            return K.count_equal(soa.data(), orig.data(), m, 0, m, q, d, side,
                                 skip, target_d2);
        std::vector<std::uint32_t> qcell(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) qcell[static_cast<std::size_t>(j)] = axis_cell(q[j]);
        std::size_t count = 0;
        for (int k = 0; k <= kmax; ++k) {
            for_ring(qcell.data(), k, [&](std::uint32_t cid) {
                std::uint32_t b = cell_start[cid];
                std::uint32_t e = cell_start[cid + 1];
                if (b != e)
                    count += K.count_equal(soa.data(), orig.data(), m, b, e, q,
                                           d, side, skip, target_d2);
            });
        }
        return count;
    }
};

nn_graph build_with(const sample& s, bool accelerated) {
    if (s.n_points < 2)
        throw std::invalid_argument("build_nn_graph: need >= 2 points");
    searcher idx(s, accelerated);
    nn_graph g;
    g.nn_index.resize(s.n_points);
    g.nn_d2.resize(s.n_points);
    g.nn_dist.resize(s.n_points);
    g.in_degree.assign(s.n_points, 0);
    for (std::uint32_t i = 0; i < s.n_points; ++i) {
        auto [d2, j] = idx.nearest(s.point(i), i);
        g.nn_index[i] = j;
        g.nn_d2[i] = d2;
        g.nn_dist[i] = std::sqrt(d2);
    }
    for (std::uint32_t i = 0; i < s.n_points; ++i) ++g.in_degree[g.nn_index[i]];
    for (std::uint32_t i = 0; i < s.n_points; ++i) {
        std::size_t eq =
            idx.count_at(s.point(i), i, g.nn_d2[i], g.nn_dist[i]);
        if (eq > 1) ++g.tie_points;
    }
    return g;
}

} // namespace

nn_graph build_nn_graph(const sample& s) { return build_with(s, true); }

nn_graph build_nn_graph_brute(const sample& s) { return build_with(s, false); }

nn_graph build_nn_graph_second_nn(const sample& s) {
    if (s.n_points < 3)
        throw std::invalid_argument("build_nn_graph_second_nn: >= 3 points");
    nn_graph g;
    std::uint32_t m = s.n_points;
    g.nn_index.resize(m);
    g.nn_d2.resize(m);
    g.nn_dist.resize(m);
    g.in_degree.assign(m, 0);
    for (std::uint32_t i = 0; i < m; ++i) {
        double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
        std::uint32_t i1 = m, i2 = m;
        for (std::uint32_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double dist = torus_distance(s.point(i), s.point(j), s.window);
            double d2 = dist * dist;
            if (d2 < b1 || (d2 == b1 && j < i1)) {
                b2 = b1;
                i2 = i1;
                b1 = d2;
                i1 = j;
            } else if (d2 < b2 || (d2 == b2 && j < i2)) {
                b2 = d2;
                i2 = j;
            }
        }
        g.nn_index[i] = i2;
        g.nn_d2[i] = b2;
        g.nn_dist[i] = std::sqrt(b2);
    }
    for (std::uint32_t i = 0; i < m; ++i) ++g.in_degree[g.nn_index[i]];
    return g;
}

chain_result directed_chain(std::uint32_t origin, const nn_graph& g,
                            const sample& s) {
    chain_result r;
    r.points_touched = 0;
    std::vector<std::uint32_t> visited;
    visited.push_back(origin);
    std::uint32_t cur = origin;
    for (std::uint32_t step = 0; step < g.nn_index.size(); ++step) {
        std::uint32_t nxt = g.nn_index[cur];
        if (std::find(visited.begin(), visited.end(), nxt) != visited.end())
            break;
        visited.push_back(nxt);
        r.norms.push_back(torus_norm(s.point(nxt), s.window));
        r.step_dist.push_back(g.nn_dist[cur]);
        cur = nxt;
    }
    r.points_touched = static_cast<std::uint32_t>(visited.size()) - 1;
    return r;
}

namespace {

// Undirected edge list of a member set, the mutual pair's duplicate edge
// removed. Local indices follow the order of `members`.
struct local_graph {
    std::vector<std::uint32_t> adj;   // concatenated neighbor lists
    std::vector<std::uint32_t> start; // CSR offsets
};

local_graph build_local(const std::vector<std::uint32_t>& members,
                        const nn_graph& g,
                        const std::vector<std::uint32_t>& pos) {
    std::size_t n = members.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(n);
    for (std::uint32_t li = 0; li < n; ++li) {
        std::uint32_t i = members[li];
        std::uint32_t j = g.nn_index[i];
        if (g.nn_index[j] == i && j < i) continue; // mutual pair counted once
        edges.emplace_back(li, pos[j]);
    }
    local_graph lg;
    lg.start.assign(n + 1, 0);
    for (auto& e : edges) {
        ++lg.start[e.first + 1];
        ++lg.start[e.second + 1];
    }
    for (std::size_t k = 1; k <= n; ++k) lg.start[k] += lg.start[k - 1];
    lg.adj.resize(lg.start[n]);
    std::vector<std::uint32_t> cur(lg.start.begin(), lg.start.end() - 1);
    for (auto& e : edges) {
        lg.adj[cur[e.first]++] = e.second;
        lg.adj[cur[e.second]++] = e.first;
    }
    return lg;
}

// Longest simple path through local vertex `root` of a tree, in points.
std::uint32_t longest_path_local(const local_graph& lg, std::uint32_t root) {
    std::size_t n = lg.start.size() - 1;
    // Post-order depths via iterative DFS.
    std::vector<std::uint32_t> depth(n, 0);
    std::vector<std::uint32_t> parent(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::vector<std::uint32_t> stack = {root};
    std::vector<char> seen(n, 0);
    seen[root] = 1;
    while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (std::uint32_t e = lg.start[v]; e < lg.start[v + 1]; ++e) {
            std::uint32_t w = lg.adj[e];
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = v;
                stack.push_back(w);
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::uint32_t v = *it;
        if (v == root) continue;
        std::uint32_t p = parent[v];
        if (p != root && depth[v] + 1 > depth[p]) depth[p] = depth[v] + 1;
    }
    // Branch lengths at the root are 1 + child depth; take the two largest.
    std::uint32_t top1 = 0, top2 = 0;
    for (std::uint32_t e = lg.start[root]; e < lg.start[root + 1]; ++e) {
        std::uint32_t w = lg.adj[e];
        if (parent[w] != root) continue;
        std::uint32_t len = 1 + depth[w];
        if (len > top1) {
            top2 = top1;
            top1 = len;
        } else if (len > top2) {
            top2 = len;
        }
    }
    return 1 + top1 + top2;
}

} // namespace

std::uint32_t longest_path_through(std::uint32_t origin,
                                   const component_info& c,
                                   const nn_graph& g) {
    std::vector<std::uint32_t> pos(g.nn_index.size(), 0);
    for (std::uint32_t li = 0; li < c.members.size(); ++li)
        pos[c.members[li]] = li;
    local_graph lg = build_local(c.members, g, pos);
    auto it = std::lower_bound(c.members.begin(), c.members.end(), origin);
    return longest_path_local(
        lg, static_cast<std::uint32_t>(it - c.members.begin()));
}

component_info origin_component(const nn_graph& g, const sample& s) {
    std::uint32_t m = s.n_points;
    std::uint32_t origin = s.origin_index;

    // Undirected closure of the origin: i ~ nn[i], CSR over all points.
    std::vector<std::uint32_t> adj_start(m + 1, 0);
    for (std::uint32_t i = 0; i < m; ++i) {
        ++adj_start[i + 1];
        ++adj_start[g.nn_index[i] + 1];
    }
    for (std::uint32_t k = 1; k <= m; ++k) adj_start[k] += adj_start[k - 1];
    std::vector<std::uint32_t> adj(adj_start[m]);
    {
        std::vector<std::uint32_t> cur(adj_start.begin(), adj_start.end() - 1);
        for (std::uint32_t i = 0; i < m; ++i) {
            std::uint32_t j = g.nn_index[i];
            adj[cur[i]++] = j;
            adj[cur[j]++] = i;
        }
    }
    std::vector<char> in_comp(m, 0);
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> queue = {origin};
    in_comp[origin] = 1;
    while (!queue.empty()) {
        std::uint32_t v = queue.back();
        queue.pop_back();
        members.push_back(v);
        for (std::uint32_t e = adj_start[v]; e < adj_start[v + 1]; ++e) {
            std::uint32_t w = adj[e];
            if (!in_comp[w]) {
                in_comp[w] = 1;
                queue.push_back(w);
            }
        }
    }
    std::sort(members.begin(), members.end());

    component_info info;
    info.members = std::move(members);

    std::uint32_t pairs = 0;
    for (std::uint32_t i : info.members) {
        std::uint32_t j = g.nn_index[i];
        if (j > i && g.nn_index[j] == i) {
            ++pairs;
            info.loop_pair = {i, j};
        }
    }
    if (pairs != 1)
        throw structural_violation(
            "origin component has " + std::to_string(pairs) +
            " mutual-NN pairs, expected exactly 1");

    // Generations: BFS layers from both loop vertices at 1.
    std::vector<std::uint32_t> pos(m, 0);
    for (std::uint32_t li = 0; li < info.members.size(); ++li)
        pos[info.members[li]] = li;
    std::size_t n = info.members.size();
    info.generation.assign(n, 0);
    std::vector<std::uint32_t> bfs;
    bfs.reserve(n);
    auto push_gen = [&](std::uint32_t idx, std::uint32_t gen) {
        std::uint32_t li = pos[idx];
        if (info.generation[li] == 0) {
            info.generation[li] = gen;
            bfs.push_back(idx);
        }
    };
    push_gen(info.loop_pair.first, 1);
    push_gen(info.loop_pair.second, 1);
    for (std::size_t head = 0; head < bfs.size(); ++head) {
        std::uint32_t v = bfs[head];
        std::uint32_t gv = info.generation[pos[v]];
        for (std::uint32_t e = adj_start[v]; e < adj_start[v + 1]; ++e)
            if (in_comp[adj[e]]) push_gen(adj[e], gv + 1);
    }

    info.extent = 0.0;
    info.max_nn_dist = 0.0;
    for (std::uint32_t i : info.members) {
        double nrm = torus_norm(s.point(i), s.window);
        if (nrm > info.extent) info.extent = nrm;
        if (g.nn_dist[i] > info.max_nn_dist) info.max_nn_dist = g.nn_dist[i];
    }

    info.chain_points = directed_chain(origin, g, s).points_touched;
    info.generation_of_origin = info.generation[pos[origin]];

    local_graph lg = build_local(info.members, g, pos);
    info.longest_path_points = longest_path_local(lg, pos[origin]);
    return info;
}

std::uint32_t max_in_degree(const nn_graph& g) {
    std::uint32_t mx = 0;
    for (std::uint32_t v : g.in_degree)
        if (v > mx) mx = v;
    return mx;
}

namespace {

struct union_find {
    std::vector<std::uint32_t> parent;
    explicit union_find(std::uint32_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a < b ? b : a] = a < b ? a : b;
    }
};

} // namespace

structure_scan scan_structure(const nn_graph& g, const sample& s,
                              std::uint32_t small_component_cap) {
    structure_scan out;
    std::uint32_t m = s.n_points;
    out.max_in_degree = max_in_degree(g);

    union_find uf(m);
    for (std::uint32_t i = 0; i < m; ++i) uf.unite(i, g.nn_index[i]);

    std::vector<std::uint32_t> pair_count(m, 0);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::uint32_t j = g.nn_index[i];
        if (j > i && g.nn_index[j] == i) ++pair_count[uf.find(i)];
    }
    std::vector<std::vector<std::uint32_t>> comp_members(m);
    for (std::uint32_t i = 0; i < m; ++i) comp_members[uf.find(i)].push_back(i);
    for (std::uint32_t r = 0; r < m; ++r) {
        if (comp_members[r].empty()) continue;
        ++out.components;
        if (pair_count[r] != 1) ++out.mutual_pair_violations;
    }

    // Directed cycles of the functional graph i -> nn[i].
    std::vector<std::uint8_t> state(m, 0);
    std::vector<std::uint32_t> path, path_pos(m, 0);
    for (std::uint32_t start = 0; start < m; ++start) {
        if (state[start] != 0) continue;
        path.clear();
        std::uint32_t cur = start;
        while (state[cur] == 0) {
            state[cur] = 1;
            path_pos[cur] = static_cast<std::uint32_t>(path.size());
            path.push_back(cur);
            cur = g.nn_index[cur];
        }
        if (state[cur] == 1) {
            std::uint32_t len =
                static_cast<std::uint32_t>(path.size()) - path_pos[cur];
            if (len >= 3) ++out.long_cycles;
        }
        for (std::uint32_t v : path) state[v] = 2;
    }

    // Strict decrease along chains, loop-closing edge exempt.
    for (std::uint32_t i = 0; i < m; ++i) {
        std::uint32_t j = g.nn_index[i];
        if (g.nn_index[j] == i) continue;
        if (!(g.nn_dist[j] < g.nn_dist[i])) ++out.chain_increase_events;
    }

    // Generation-vs-chain agreement and small-component path orientations.
    std::vector<std::uint32_t> pos(m, 0);
    for (std::uint32_t r = 0; r < m; ++r) {
        const auto& mem = comp_members[r];
        if (mem.empty()) continue;
        if (pair_count[r] != 1) continue; // already counted as violation
        for (std::uint32_t li = 0; li < mem.size(); ++li) pos[mem[li]] = li;

        std::pair<std::uint32_t, std::uint32_t> loop{0, 0};
        for (std::uint32_t i : mem) {
            std::uint32_t j = g.nn_index[i];
            if (j > i && g.nn_index[j] == i) loop = {i, j};
        }
        std::size_t n = mem.size();
        std::vector<std::uint32_t> gen(n, 0);
        local_graph lg = build_local(mem, g, pos);
        std::vector<std::uint32_t> bfs;
        auto push = [&](std::uint32_t li, std::uint32_t v) {
            if (gen[li] == 0) {
                gen[li] = v;
                bfs.push_back(li);
            }
        };
        push(pos[loop.first], 1);
        push(pos[loop.second], 1);
        for (std::size_t head = 0; head < bfs.size(); ++head) {
            std::uint32_t v = bfs[head];
            for (std::uint32_t e = lg.start[v]; e < lg.start[v + 1]; ++e)
                push(lg.adj[e], gen[v] + 1);
        }
        for (std::uint32_t i : mem) {
            std::uint32_t walked = directed_chain(i, g, s).points_touched;
            if (walked != gen[pos[i]]) ++out.generation_mismatches;
        }

        if (n < 2 || n > small_component_cap) continue;
        ++out.small_components_checked;
        // Unique tree paths between all local pairs; label each edge with its
        // orientation along the traversal (+1 forward, -1 backward, 0 both).
        for (std::uint32_t a = 0; a < n; ++a) {
            std::vector<std::uint32_t> par(n, std::numeric_limits<std::uint32_t>::max());
            std::vector<char> vis(n, 0);
            std::vector<std::uint32_t> q = {a};
            vis[a] = 1;
            for (std::size_t h = 0; h < q.size(); ++h) {
                std::uint32_t v = q[h];
                for (std::uint32_t e = lg.start[v]; e < lg.start[v + 1]; ++e) {
                    std::uint32_t w = lg.adj[e];
                    if (!vis[w]) {
                        vis[w] = 1;
                        par[w] = v;
                        q.push_back(w);
                    }
                }
            }
            for (std::uint32_t b = a + 1; b < n; ++b) {
                // Walk b up to a collecting labels, then check ordering.
                std::vector<int> labels;
                for (std::uint32_t v = b; v != a; v = par[v]) {
                    std::uint32_t u = par[v]; // traversal direction u -> v
                    std::uint32_t gu = mem[u], gv = mem[v];
                    bool fwd = g.nn_index[gu] == gv;
                    bool bwd = g.nn_index[gv] == gu;
                    labels.push_back(fwd && bwd ? 0 : (fwd ? 1 : -1));
                }
                std::reverse(labels.begin(), labels.end());
                bool seen_back = false;
                for (int lab : labels) {
                    if (lab == -1) seen_back = true;
                    if (lab == 1 && seen_back) {
                        ++out.orientation_violations;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

} // namespace nnlab
