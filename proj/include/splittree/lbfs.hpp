#pragma once

#include <cstdint>
#include <limits>
#include <list>
#include <set>
#include <stdexcept>
#include <vector>

#include "splittree/graph.hpp"
#include "splittree/split_tree.hpp"

namespace splittree {

// A linear ordering of the vertices: order[i] is the i-th vertex, position[v]
// its 0-based position.
struct ordering {
    std::vector<int> order;
    std::vector<int> position;

    static ordering from_order(std::vector<int> ord) {
        ordering s;
        s.position.assign(ord.size(), -1);
        for (std::size_t i = 0; i < ord.size(); ++i) {
            int v = ord[i];
            if (v < 0 || v >= static_cast<int>(ord.size()) ||
                s.position[static_cast<std::size_t>(v)] != -1)
                throw std::invalid_argument("ordering: not a permutation");
            s.position[static_cast<std::size_t>(v)] = static_cast<int>(i);
        }
        s.order = std::move(ord);
        return s;
    }
};

// Lexicographic BFS by partition refinement. Ties (vertices whose labels are
// all lexicographically largest) break to the lowest vertex id, so the result
// is deterministic given (g, start).
inline ordering lbfs_order(const graph& g, int start = -1) {
    int n = g.vertex_count();
    if (!is_connected(g)) throw std::invalid_argument("lbfs_order: disconnected graph");
    if (start != -1 && (start < 0 || start >= n))
        throw std::invalid_argument("lbfs_order: invalid start vertex");

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 0) return ordering::from_order(out);

    struct cell {
        std::set<int> verts;
        uint32_t partner_round = 0;
        std::list<cell>::iterator partner{};
    };
    // cells hold unnumbered vertices; the front cell always has the largest label
    std::list<cell> cells;
    using cell_it = std::list<cell>::iterator;
    std::vector<cell_it> cell_of(static_cast<std::size_t>(n));

    cells.emplace_back();
    for (int v = 0; v < n; ++v)
        if (v != start) cells.back().verts.insert(v);
    if (start != -1) {
        cells.emplace_front();
        cells.front().verts.insert(start);
        if (cells.back().verts.empty()) cells.pop_back();
    }
    for (auto it = cells.begin(); it != cells.end(); ++it)
        for (int v : it->verts) cell_of[static_cast<std::size_t>(v)] = it;

    std::vector<char> numbered(static_cast<std::size_t>(n), 0);
    for (uint32_t round = 1; round <= static_cast<uint32_t>(n); ++round) {
        int v = *cells.front().verts.begin();
        cells.front().verts.erase(cells.front().verts.begin());
        if (cells.front().verts.empty()) cells.pop_front();
        numbered[static_cast<std::size_t>(v)] = 1;
        out.push_back(v);

        // move each unnumbered neighbour into the split partner just before its cell
        for (int w : g.neighbors(v)) {
            if (numbered[static_cast<std::size_t>(w)]) continue;
            cell_it c = cell_of[static_cast<std::size_t>(w)];
            if (c->partner_round != round) {
                c->partner = cells.insert(c, cell{});
                c->partner_round = round;
            }
            cell_it partner = c->partner;
            c->verts.erase(w);
            partner->verts.insert(w);
            cell_of[static_cast<std::size_t>(w)] = partner;
            if (c->verts.empty()) cells.erase(c);
        }
    }
    return ordering::from_order(out);
}

// Deliberately naive LBFS check via the 4-vertex characterization: for every
// a < b < c in sigma with ac an edge and ab not, some d before a must see b
// and miss c. Cubic; meant for tests up to a few hundred vertices.
inline bool verify_lbfs(const graph& g, const ordering& sigma) {
    int n = g.vertex_count();
    if (static_cast<int>(sigma.order.size()) != n)
        throw std::invalid_argument("verify_lbfs: ordering size mismatch");
    ordering::from_order(sigma.order); // permutation check
    if (n < 3) return true;

    // wit[b][c]: smallest position of a vertex adjacent to b but not to c
    const int inf = n + 1;
    std::vector<std::vector<int>> wit(static_cast<std::size_t>(n),
                                      std::vector<int>(static_cast<std::size_t>(n), inf));
    for (int b = 0; b < n; ++b) {
        std::vector<int> nbrs(g.neighbors(b).begin(), g.neighbors(b).end());
        std::sort(nbrs.begin(), nbrs.end(), [&](int x, int y) {
            return sigma.position[static_cast<std::size_t>(x)] <
                   sigma.position[static_cast<std::size_t>(y)];
        });
        for (int d : nbrs) {
            int pd = sigma.position[static_cast<std::size_t>(d)];
            for (int c = 0; c < n; ++c)
                if (!g.adjacent(d, c) &&
                    wit[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] == inf)
                    wit[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = pd;
        }
    }
    for (int pa = 0; pa < n; ++pa)
        for (int pb = pa + 1; pb < n; ++pb)
            for (int pc = pb + 1; pc < n; ++pc) {
                int a = sigma.order[static_cast<std::size_t>(pa)];
                int b = sigma.order[static_cast<std::size_t>(pb)];
                int c = sigma.order[static_cast<std::size_t>(pc)];
                if (!g.adjacent(a, c) || g.adjacent(a, b)) continue;
                if (wit[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] >= pa)
                    return false;
            }
    return true;
}

// The ordering sigma induces on the markers of node u: q precedes r when the
// earliest vertex of A(q) precedes the earliest vertex of A(r). Oracle-only.
inline std::vector<ext_id> induced_order(const split_tree& t, node_id u, const ordering& sigma) {
    if (u < 0 || u >= t.node_arena_size() || !t.node_at(u).alive)
        throw std::invalid_argument("induced_order: not a live node");
    auto owner = t.build_marker_owner_map();
    std::vector<std::pair<int, ext_id>> keyed;
    for (ext_id m : t.markers_of(u)) {
        int best = std::numeric_limits<int>::max();
        for (int v : t.accessible_set(m, owner))
            best = std::min(best, sigma.position.at(static_cast<std::size_t>(v)));
        keyed.push_back({best, m});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<ext_id> out;
    for (auto& [k, m] : keyed) out.push_back(m);
    return out;
}

} // namespace splittree
